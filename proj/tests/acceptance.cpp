// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exit code is the number of failed gating criteria. Criterion 8
// is a reported trend check and never gates.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qspirl/agents.hpp"
#include "qspirl/encoding.hpp"
#include "qspirl/evaluation.hpp"
#include "qspirl/qtable.hpp"
#include "qspirl/serialize.hpp"
#include "qspirl/training.hpp"

using namespace qspirl;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool pass, const std::string &detail, bool gating = true) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : (gating ? "FAIL" : "MISS"),
                criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass && gating) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ dense-matrix oracle

using Mat = std::vector<std::vector<Complex>>;

Mat identity_mat(std::size_t n) {
    Mat m(n, std::vector<Complex>(n, {0, 0}));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = {1, 0};
    return m;
}

Mat kron(const Mat &a, const Mat &b) {
    const std::size_t ra = a.size(), ca = a[0].size(), rb = b.size(), cb = b[0].size();
    Mat m(ra * rb, std::vector<Complex>(ca * cb, {0, 0}));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l) m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return m;
}

Mat one_qubit_operator(int qubits, const Gate2 &g, int target) {
    Mat m = identity_mat(1);
    const Mat gm{{g.m00, g.m01}, {g.m10, g.m11}};
    for (int q = qubits - 1; q >= 0; --q) m = kron(m, q == target ? gm : identity_mat(2));
    return m;
}

Mat controlled_operator(int qubits, const Gate2 &g, int control, int target) {
    const std::size_t n = std::size_t{1} << qubits;
    Mat m = identity_mat(n);
    const Mat u = one_qubit_operator(qubits, g, target);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i >> control) & 1 && (j >> control) & 1) m[i][j] = u[i][j];
            else if (((i >> control) & 1) != ((j >> control) & 1)) m[i][j] = {0, 0};
    return m;
}

std::vector<Complex> matvec(const Mat &m, const std::vector<Complex> &v) {
    std::vector<Complex> out(m.size(), {0, 0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

// ------------------------------------------------------------------ gradient checking

// Central finite differences over the given parameter blocks of a frozen-rng
// scalar loss. Hybrid tolerance: |fd - g| <= tol * max(1, |fd|, |g|).
struct GradCheck {
    double worst = 0.0;
    int checked = 0;
    bool ok(double tol) const { return checked > 0 && worst <= tol; }
};

template <typename LossFn>
GradCheck check_blocks(const std::vector<std::span<double>> &params,
                       const std::vector<std::span<double>> &grads,
                       const std::vector<std::size_t> &block_ids, LossFn loss, double h = 1e-5) {
    GradCheck result;
    for (std::size_t bi : block_ids) {
        for (std::size_t k = 0; k < params[bi].size(); ++k) {
            const double orig = params[bi][k];
            params[bi][k] = orig + h;
            const double up = loss();
            params[bi][k] = orig - h;
            const double down = loss();
            params[bi][k] = orig;
            const double fd = (up - down) / (2.0 * h);
            const double g = grads[bi][k];
            const double err = std::abs(fd - g) / std::max({1.0, std::abs(fd), std::abs(g)});
            result.worst = std::max(result.worst, err);
            ++result.checked;
        }
    }
    return result;
}

std::vector<std::size_t> all_blocks(std::size_t n) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return ids;
}

double sq_loss(const QValues &q) {
    double s = 0.0;
    for (double v : q) s += v * v;
    return s;
}

// ------------------------------------------------------------------ criteria

void criterion_1_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    long total = 0;
    bool pass = true;

    // dense backward: full MLP agents with smooth activations
    for (int inst = 0; inst < 20; ++inst) {
        Rng init(100 + inst);
        AgentConfig cfg;
        cfg.activation = (inst % 2 == 0) ? Activation::tanh : Activation::sigmoid;
        MlpAgent agent(cfg, init);
        const ObsState obs = state_from_index(static_cast<int>(init.uniform_int(kNumStates)));
        Rng r(0);
        const QValues q = agent.forward_train(obs, r);
        QValues gout{};
        for (int a = 0; a < kNumActions; ++a) gout[a] = 2.0 * q[a];
        agent.zero_grad();
        agent.backward_train(gout);
        auto gc = check_blocks(agent.param_blocks(), agent.grad_blocks(),
                               all_blocks(agent.param_blocks().size()),
                               [&]() { Rng rr(0); return sq_loss(agent.q_values(obs, rr)); });
        worst = std::max(worst, gc.worst);
        total += gc.checked;
        pass = pass && gc.ok(1e-4);
    }

    // spiking readout layers behind a frozen encoding draw
    for (int inst = 0; inst < 20; ++inst) {
        Rng init(300 + inst);
        AgentConfig cfg;
        cfg.timesteps = 6;
        cfg.dt = 0.01;
        SnnAgent agent(cfg, init);
        const ObsState obs = state_from_index(static_cast<int>(init.uniform_int(kNumStates)));
        const std::uint64_t enc_seed = 7000 + inst;
        Rng r(enc_seed);
        const QValues q = agent.forward_train(obs, r);
        QValues gout{};
        for (int a = 0; a < kNumActions; ++a) gout[a] = 2.0 * q[a];
        agent.zero_grad();
        agent.backward_train(gout);
        // blocks 4,5 are the readout weights and bias (see param_blocks)
        auto gc = check_blocks(agent.param_blocks(), agent.grad_blocks(), {4, 5}, [&]() {
            Rng rr(enc_seed);
            return sq_loss(agent.q_values(obs, rr));
        });
        worst = std::max(worst, gc.worst);
        total += gc.checked;
        pass = pass && gc.ok(1e-4);
    }

    // full hybrid QMLP: classical chain through parameter-shift gradients,
    // every one of the 1977 parameters (sigmoid keeps the encoder input
    // strictly inside (0,1), so the whole pipeline is smooth)
    for (int inst = 0; inst < 20; ++inst) {
        Rng init(500 + inst);
        AgentConfig cfg;
        cfg.activation = Activation::sigmoid;
        QmlpAgent agent(cfg, init);
        const ObsState obs = state_from_index(static_cast<int>(init.uniform_int(kNumStates)));
        Rng r(0);
        const QValues q = agent.forward_train(obs, r);
        QValues gout{};
        for (int a = 0; a < kNumActions; ++a) gout[a] = 2.0 * q[a];
        agent.zero_grad();
        agent.backward_train(gout);
        auto gc = check_blocks(agent.param_blocks(), agent.grad_blocks(),
                               all_blocks(agent.param_blocks().size()),
                               [&]() { Rng rr(0); return sq_loss(agent.q_values(obs, rr)); });
        worst = std::max(worst, gc.worst);
        total += gc.checked;
        pass = pass && gc.ok(1e-4);
    }

    // QSNN hybrid: the spiking front end is piecewise constant in its
    // parameters, so finite differences are valid only for the smooth part
    // of the chain (variational angles and post-quantum layers) behind a
    // frozen spike realization.
    for (int inst = 0; inst < 20; ++inst) {
        Rng init(700 + inst);
        AgentConfig cfg;
        cfg.timesteps = 5;
        cfg.dt = 0.01;
        QsnnAgent agent(cfg, init);
        const ObsState obs = state_from_index(static_cast<int>(init.uniform_int(kNumStates)));
        const std::uint64_t enc_seed = 9000 + inst;
        Rng r(enc_seed);
        const QValues q = agent.forward_train(obs, r);
        QValues gout{};
        for (int a = 0; a < kNumActions; ++a) gout[a] = 2.0 * q[a];
        agent.zero_grad();
        agent.backward_train(gout);
        auto params = agent.param_blocks();
        std::vector<std::size_t> smooth;
        for (std::size_t bi = 4; bi < params.size(); ++bi) smooth.push_back(bi);
        auto gc = check_blocks(params, agent.grad_blocks(), smooth, [&]() {
            Rng rr(enc_seed);
            return sq_loss(agent.q_values(obs, rr));
        });
        worst = std::max(worst, gc.worst);
        total += gc.checked;
        pass = pass && gc.ok(1e-4);
    }

    const double secs = elapsed_s(t0);
    pass = pass && secs < 60.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "gradient integrity: %ld directions, worst rel err %.2e (tol 1e-4), %.1fs",
                  total, worst, secs);
    report(1, pass, buf);
}

void criterion_2_quantum_oracle() {
    bool pass = true;
    double worst_amp = 0.0;

    // statevector vs dense-matrix oracle on 4 qubits
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        StateVector s(4);
        std::vector<Complex> dense(16, {0, 0});
        dense[0] = {1, 0};
        for (int g = 0; g < 25; ++g) {
            const int target = static_cast<int>(rng.uniform_int(4));
            const int kind = static_cast<int>(rng.uniform_int(3));
            const Gate2 gate =
                kind == 0 ? gate_h()
                          : gate_rot(rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                     rng.uniform(-kPi, kPi));
            if (kind == 2) {
                const int control = (target + 1 + static_cast<int>(rng.uniform_int(3))) % 4;
                apply_controlled(s, gate, control, target);
                dense = matvec(controlled_operator(4, gate, control, target), dense);
            } else {
                apply_1q(s, gate, target);
                dense = matvec(one_qubit_operator(4, gate, target), dense);
            }
        }
        for (int i = 0; i < 16; ++i) worst_amp = std::max(worst_amp, std::abs(s.amps[i] - dense[i]));
    }
    pass = pass && worst_amp <= 1e-12;

    // norm drift over 1000 random gates
    StateVector s(4);
    for (int g = 0; g < 1000; ++g) {
        const int target = static_cast<int>(rng.uniform_int(4));
        switch (rng.uniform_int(3)) {
        case 0: apply_1q(s, gate_h(), target); break;
        case 1:
            apply_1q(s, gate_rot(rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                 rng.uniform(-kPi, kPi)),
                     target);
            break;
        default:
            apply_controlled(s, gate_ry(rng.uniform(-kPi, kPi)), (target + 1) % 4, target);
            break;
        }
    }
    const double drift = std::abs(s.norm() - 1.0);
    pass = pass && drift <= 1e-10;

    // <Z> of RY(theta)|0> across a sweep
    double worst_z = 0.0;
    for (double theta = -2.0 * kPi; theta <= 2.0 * kPi; theta += 0.05) {
        StateVector q1(1);
        apply_1q(q1, gate_ry(theta), 0);
        worst_z = std::max(worst_z, std::abs(z_expectation(q1, 0) - std::cos(theta)));
    }
    pass = pass && worst_z <= 1e-12;

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "quantum oracle: amp err %.1e (tol 1e-12), norm drift %.1e (tol 1e-10), "
                  "RY sweep err %.1e (tol 1e-12)",
                  worst_amp, drift, worst_z);
    report(2, pass, buf);
}

void criterion_3_parameter_counts() {
    Rng rng(1);
    AgentConfig cfg;
    const int mlp = build_agent(AgentKind::mlp, cfg, rng)->param_count();
    const int snn = build_agent(AgentKind::snn, cfg, rng)->param_count();
    const int qmlp = build_agent(AgentKind::qmlp, cfg, rng)->param_count();
    const int qsnn = build_agent(AgentKind::qsnn, cfg, rng)->param_count();
    const bool pass = mlp == 1985 && snn == 1985 && qmlp == 1977 && qsnn == 1977;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "parameter counts: mlp=%d snn=%d (want 1985), qmlp=%d qsnn=%d (want 1977)",
                  mlp, snn, qmlp, qsnn);
    report(3, pass, buf);
}

void criterion_4_environment_suite() {
    bool pass = true;
    std::string fail;

    // state index bijection and ranges
    std::set<int> seen;
    for (int i = 0; i < kNumStates; ++i) {
        const ObsState s = state_from_index(i);
        if (!s.valid() || state_index(s) != i) {
            pass = false;
            fail = "state bijection";
            break;
        }
        seen.insert(i);
    }
    pass = pass && seen.size() == kNumStates;

    // one-hot: exactly four ones on every state
    for (int i = 0; i < kNumStates && pass; ++i) {
        const OneHotVec x = one_hot(state_from_index(i));
        int ones = 0;
        for (double v : x) ones += v == 1.0;
        if (ones != 4) {
            pass = false;
            fail = "one-hot";
        }
    }

    // Poisson empirical rate within 3 sigma over 1e5 draws
    {
        const double p = spike_probability(100.0, 0.01);
        const int draws = 100000;
        Rng rng(42);
        const OneHotVec x = one_hot(ObsState{1, 0, 1, 1});
        long count = 0;
        for (int i = 0; i < draws; ++i)
            count += poisson_encode(x, 100.0, 1, 0.01, rng).at(0, 0) == 1.0;
        const double sigma = std::sqrt(p * (1.0 - p) / draws);
        if (std::abs(double(count) / draws - p) > 3.0 * sigma) {
            pass = false;
            fail = "poisson rate";
        }
    }

    // dynamic obstacles confined to the grid over 1e6 updates
    {
        GridWorld env(GridSpec::preset(40), RewardParams{});
        long updates = 0;
        Rng seeds(3);
        while (updates < 1000000) {
            env.reset(seeds.next_u64());
            for (int i = 0; i < 5000; ++i) {
                env.advance_dynamics();
                ++updates;
            }
            for (const Obstacle &o : env.obstacles())
                if (!env.spec().inside(o.cell)) {
                    pass = false;
                    fail = "dynamics left the grid";
                    updates = 1000000;
                    break;
                }
        }
    }

    report(4, pass,
           pass ? "environment suite: bijection, one-hot, poisson 3-sigma, 1e6 dynamic updates"
                : "environment suite failed at: " + fail);
}

void criterion_5_metric_suite() {
    bool pass = true;
    std::string fail;

    auto record = [](bool success, double length, double l_star) {
        EpisodeRecord r;
        r.success = success;
        r.path_length = length;
        r.l_star = l_star;
        r.actions = {kForwardAction};
        return r;
    };

    // SPL <= SR on randomized synthetic episode sets
    Rng rng(5);
    for (int trial = 0; trial < 500 && pass; ++trial) {
        std::vector<EpisodeRecord> records;
        const int n = 1 + static_cast<int>(rng.uniform_int(30));
        int successes = 0;
        for (int i = 0; i < n; ++i) {
            const bool s = rng.bernoulli(0.5);
            const double l_star = rng.uniform(1.0, 40.0);
            records.push_back(record(s, l_star * rng.uniform(1.0, 3.0), l_star));
            successes += s;
        }
        if (compute_spl(records) > double(successes) / n + 1e-12) {
            pass = false;
            fail = "SPL > SR";
        }
    }

    // SPL = 1 iff all episodes succeed at optimal length
    {
        std::vector<EpisodeRecord> perfect{record(true, 7.0, 7.0), record(true, 3.0, 3.0)};
        std::vector<EpisodeRecord> off{record(true, 7.5, 7.0), record(true, 3.0, 3.0)};
        std::vector<EpisodeRecord> failed{record(true, 7.0, 7.0), record(false, 3.0, 3.0)};
        if (std::abs(compute_spl(perfect) - 1.0) > 1e-12 || compute_spl(off) >= 1.0 ||
            compute_spl(failed) >= 1.0) {
            pass = false;
            fail = "SPL=1 characterization";
        }
    }

    // TR of all-forward trajectories
    {
        EpisodeRecord r;
        r.actions.assign(25, kForwardAction);
        if (compute_turn_rate(r) != 0.0) {
            pass = false;
            fail = "TR all-forward";
        }
    }

    // Dijkstra equals brute-force enumeration on 50 random 8x8 instances
    struct Brute {
        int g;
        std::vector<char> blocked;
        Cell goal;
        double best;
        double octile(Cell a, Cell b) const {
            const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
            return std::sqrt(2.0) * std::min(dx, dy) + std::abs(dx - dy);
        }
        void dfs(Cell at, double cost, double bound, std::vector<char> &on_path) {
            if (cost + octile(at, goal) > bound + 1e-9) return;
            if (at == goal) {
                best = std::min(best, cost);
                return;
            }
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const Cell next{at.x + dx, at.y + dy};
                    if (next.x < 0 || next.x >= g || next.y < 0 || next.y >= g) continue;
                    const int id = next.y * g + next.x;
                    if (blocked[id] || on_path[id]) continue;
                    on_path[id] = 1;
                    dfs(next, cost + ((dx && dy) ? std::sqrt(2.0) : 1.0), bound, on_path);
                    on_path[id] = 0;
                }
        }
    };
    Rng brng(77);
    for (int trial = 0; trial < 50 && pass; ++trial) {
        GridSpec spec;
        spec.size = 8;
        spec.start = {0, 0};
        spec.goal = {7, 7};
        std::vector<Cell> obstacles;
        std::vector<char> blocked(64, 0);
        const int count = 5 + static_cast<int>(brng.uniform_int(9));
        for (int i = 0; i < count; ++i) {
            const Cell c{static_cast<int>(brng.uniform_int(8)),
                         static_cast<int>(brng.uniform_int(8))};
            if (c == spec.start || c == spec.goal) continue;
            obstacles.push_back(c);
            blocked[c.y * 8 + c.x] = 1;
        }
        const double dijkstra = shortest_path(spec, obstacles);
        Brute brute{8, blocked, spec.goal, std::numeric_limits<double>::infinity()};
        std::vector<char> on_path(64, 0);
        on_path[0] = 1;
        brute.dfs(spec.start, 0.0, 12.0, on_path);
        if (std::isfinite(brute.best)) {
            if (std::abs(dijkstra - brute.best) > 1e-9) {
                pass = false;
                fail = "dijkstra != brute force";
            }
        } else if (dijkstra <= 12.0 - 1e-9) {
            pass = false;
            fail = "dijkstra found a path the enumeration excluded";
        }
    }

    // PL of a pure-diagonal k-step path
    {
        QTable forward_table;
        for (int s = 0; s < kNumStates; ++s)
            forward_table.values[std::size_t(s) * kNumActions + kForwardAction] = 1.0f;
        GridSpec spec = GridSpec::preset(20);
        spec.n_static = 0;
        spec.n_dynamic = 0;
        const MetricsReport r = run_protocol(forward_table, spec, {2000});
        const int k = spec.goal.x - spec.start.x;
        if (r.episodes[0].outcome != Terminal::goal ||
            std::abs(r.episodes[0].path_length - k * std::sqrt(2.0)) > 1e-12) {
            pass = false;
            fail = "diagonal PL";
        }
    }

    report(5, pass,
           pass ? "metric suite: SPL bounds, TR, dijkstra-vs-enumeration, diagonal PL"
                : "metric suite failed at: " + fail);
}

void criterion_6_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qspirl_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto slurp = [](const fs::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    bool pass = true;
    std::string detail;
    for (AgentKind kind : {AgentKind::mlp, AgentKind::snn}) {
        const GridSpec spec = GridSpec::preset(10, false);
        TrainConfig cfg = TrainConfig::defaults_for(kind, 10);
        cfg.episodes = kind == AgentKind::mlp ? 25 : 12;
        cfg.learning_start = 50; // cover gradient updates, not just rollouts
        std::vector<std::string> model_bytes, table_bytes, report_bytes;
        for (int run = 0; run < 2; ++run) {
            EpisodeLog log;
            auto agent = train_run(kind, spec, cfg, 77, &log);
            const fs::path model_path = dir / (std::string(agent_kind_name(kind)) + ".qsm");
            save_model(*agent, spec, cfg, model_path.string());

            QTable table = build_qtable(*agent, 5);
            const fs::path table_path = dir / (std::string(agent_kind_name(kind)) + ".qtable");
            save_qtable(table, table_path.string());

            const MetricsReport rep = run_protocol(table, spec);
            const fs::path report_path = dir / (std::string(agent_kind_name(kind)) + ".json");
            write_report(rep, report_path.string());

            model_bytes.push_back(slurp(model_path));
            table_bytes.push_back(slurp(table_path));
            report_bytes.push_back(slurp(report_path));
        }
        if (model_bytes[0] != model_bytes[1] || table_bytes[0] != table_bytes[1] ||
            report_bytes[0] != report_bytes[1]) {
            pass = false;
            detail = std::string("re-run differs for ") + agent_kind_name(kind);
        }
        // two evaluations of one table are byte-identical (checked above via
        // run 2's table equality; also compare fresh double evaluation)
        QTable table = load_qtable((dir / (std::string(agent_kind_name(kind)) + ".qtable"))
                                       .string());
        const std::string r1 = report_to_json(run_protocol(table, spec));
        const std::string r2 = report_to_json(run_protocol(table, spec));
        if (r1 != r2) {
            pass = false;
            detail = "double evaluation differs";
        }
    }
    fs::remove_all(dir);
    report(6, pass,
           pass ? "determinism: train/convert/eval reruns byte-identical (mlp, snn)"
                : "determinism: " + detail);
}

struct TrendRow {
    std::string name;
    double sr = 0.0, tr = 0.0;
    bool valid = false;
};

TrendRow g_trend_tabular; // reused by criterion 8

void criterion_7_desk_scale() {
    const auto t0 = std::chrono::steady_clock::now();

    // tabular on the full 20x20 preset, 800 episodes, pinned seed
    GridSpec spec20 = GridSpec::preset(20, true);
    TrainConfig tab_cfg = TrainConfig::defaults_for(AgentKind::qtable, 20);
    auto tabular = train_run(AgentKind::qtable, spec20, tab_cfg, 8);
    const QTable tab_table = build_qtable(*tabular, 0);
    const MetricsReport tab_report = run_protocol(tab_table, GridSpec::preset(20, false));
    g_trend_tabular = {"qtable", tab_report.sr, tab_report.tr_mean, tab_report.any_success};

    // MLP and SNN on the reduced 10x10 preset, 400 episodes, pinned seeds
    const GridSpec spec10 = GridSpec::preset(10, false);
    TrainConfig mlp_cfg = TrainConfig::defaults_for(AgentKind::mlp, 10);
    mlp_cfg.episodes = 400;
    auto mlp = train_run(AgentKind::mlp, spec10, mlp_cfg, 1);
    const MetricsReport mlp_report = run_protocol(build_qtable(*mlp, 0), spec10);

    TrainConfig snn_cfg = TrainConfig::defaults_for(AgentKind::snn, 10);
    snn_cfg.episodes = 400;
    auto snn = train_run(AgentKind::snn, spec10, snn_cfg, 2);
    const MetricsReport snn_report = run_protocol(build_qtable(*snn, 3), spec10);

    const double secs = elapsed_s(t0);
    const bool pass = tab_report.sr >= 0.80 && mlp_report.sr >= 0.70 && snn_report.sr >= 0.70 &&
                      secs < 900.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "desk-scale learning: tabular 20x20 SR=%.2f (>=0.80), mlp 10x10 SR=%.2f "
                  "(>=0.70), snn 10x10 SR=%.2f (>=0.70), %.0fs (<900)",
                  tab_report.sr, mlp_report.sr, snn_report.sr, secs);
    report(7, pass, buf);
}

void criterion_8_trend() {
    // Non-gating report: turn-rate comparison of the trained agents at the
    // 20x20 scale. Parameter-shift gradients make full 800-episode QMLP/QSNN
    // training cost several orders more circuit evaluations than this suite
    // can spend, so the dense and spiking classical agents stand in for the
    // neural family here.
    const GridSpec train_spec = GridSpec::preset(20, true);
    const GridSpec eval_spec = GridSpec::preset(20, false);

    std::vector<TrendRow> rows;
    rows.push_back(g_trend_tabular);

    for (AgentKind kind : {AgentKind::mlp, AgentKind::snn}) {
        TrainConfig cfg = TrainConfig::defaults_for(kind, 20);
        auto agent = train_run(kind, train_spec, cfg, 1);
        const MetricsReport r = run_protocol(build_qtable(*agent, 0), eval_spec);
        rows.push_back({agent_kind_name(kind), r.sr, r.tr_mean, r.any_success});
    }

    bool trend = rows[0].valid;
    std::string detail = "turn-rate trend (tabular should exceed neural):";
    for (const TrendRow &row : rows) {
        char item[64];
        std::snprintf(item, sizeof(item), " %s SR=%.2f TR=%.3f", row.name.c_str(), row.sr,
                      row.tr);
        detail += item;
        if (row.valid && &row != &rows[0]) trend = trend && rows[0].tr > row.tr;
    }
    report(8, trend, detail + (trend ? "" : " (trend not reproduced at desk scale)"),
           /*gating=*/false);
}

void criterion_9_shot_statistics() {
    Rng rng(2026);
    const CircuitSpec spec{8, 3};
    int within = 0;
    const int circuits = 1000;
    for (int c = 0; c < circuits; ++c) {
        std::vector<double> x(8), theta(spec.param_count());
        for (double &v : x) v = rng.uniform();
        for (double &v : theta) v = rng.uniform(-kPi, kPi);
        const std::vector<double> analytic = run_circuit(spec, x, theta);
        const std::vector<double> sampled = sampled_expectation(spec, x, theta, 1024, rng);
        bool ok = true;
        for (int q = 0; q < 8; ++q) ok = ok && std::abs(sampled[q] - analytic[q]) <= 0.125;
        within += ok;
    }
    const double frac = double(within) / circuits;
    const bool pass = frac >= 0.99;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "shot-mode statistics: %.1f%% of 1000 random circuits within 0.125 per qubit "
                  "at 1024 shots (need >=99%%)",
                  100.0 * frac);
    report(9, pass, buf);
}

} // namespace

int main() {
    std::printf("acceptance suite (9 criteria; criterion 8 is reported, not gating)\n");
    criterion_1_gradients();
    criterion_2_quantum_oracle();
    criterion_3_parameter_counts();
    criterion_4_environment_suite();
    criterion_5_metric_suite();
    criterion_6_determinism();
    criterion_7_desk_scale();
    criterion_8_trend();
    criterion_9_shot_statistics();
    if (g_failures == 0)
        std::printf("acceptance suite: all gating criteria passed\n");
    else
        std::printf("acceptance suite: %d gating criteria FAILED\n", g_failures);
    return g_failures;
}
