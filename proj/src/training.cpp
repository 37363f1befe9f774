#include "qspirl/training.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <thread>

#include "qspirl/errors.hpp"
#include "qspirl/evaluation.hpp"
#include "qspirl/qtable.hpp"

namespace qspirl {

namespace {

// rng stream ids within one training run
enum : std::uint64_t { kInitStream = 0, kEnvStream = 1, kActionStream = 2, kEncStream = 3,
                       kReplayStream = 4, kConvertStream = 99 };

void append_double(std::string &out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

TrainConfig TrainConfig::defaults_for(AgentKind kind, int grid_size) {
    TrainConfig cfg;
    cfg.agent.activation = Activation::relu; // selected for every MLP/QMLP setting
    const bool quantum = is_quantum(kind);
    // grid-search selected spiking/temporal values per environment scale;
    // the reduced 10x10 setting has its own selection since selections do
    // not transfer across scales
    struct Row { double f_max; int T; double dt, tau_mem, tau_syn; };
    Row row{100.0, 10, 0.20, 0.02, 0.01}; // classical 20x20
    if (!quantum) {
        if (grid_size == 10) row = {100.0, 10, 0.01, 0.02, 0.01};
        else if (grid_size == 30) row = {100.0, 5, 0.05, 0.01, 0.005};
        else if (grid_size == 40) row = {100.0, 20, 0.20, 0.04, 0.02};
    } else {
        row = {100.0, 10, 0.10, 0.04, 0.01}; // quantum 20x20
        if (grid_size == 10) row = {100.0, 10, 0.01, 0.02, 0.01};
        else if (grid_size == 30) row = {100.0, 20, 0.05, 0.02, 0.005};
        else if (grid_size == 40) row = {200.0, 5, 0.01, 0.01, 0.005};
    }
    cfg.agent.f_max = row.f_max;
    cfg.agent.timesteps = row.T;
    cfg.agent.dt = row.dt;
    cfg.agent.tau_mem = row.tau_mem;
    cfg.agent.tau_syn = row.tau_syn;
    return cfg;
}

void TrainConfig::validate() const {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0, 1]");
    if (buffer_capacity < 1 || batch_size < 1) throw ConfigError("buffer/batch must be positive");
    if (target_update < 1 || learning_start < 0) throw ConfigError("bad DQN schedule");
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must lie in [0, 1]");
    if (!(temp_decay > 0.0 && temp_decay < 1.0)) throw ConfigError("temp_decay must lie in (0,1)");
    if (t0 <= 0.0 || t_min <= 0.0) throw ConfigError("temperatures must be positive");
    reward.validate();
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {
    if (capacity < 1) throw UsageError("replay capacity must be positive");
    ring_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(const Transition &t) {
    if (size_ < capacity_) {
        ring_.push_back(t);
        ++size_;
    } else {
        ring_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition &ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw UsageError("replay index out of range");
    if (size_ < capacity_) return ring_[i]; // not yet wrapped, head_ is 0
    return ring_[(head_ + i) % capacity_];
}

QValues boltzmann_probs(const QValues &q, double temperature) {
    QValues p{};
    double mx = q[0];
    for (double v : q) mx = std::max(mx, v);
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        p[a] = std::exp((q[a] - mx) / temperature);
        sum += p[a];
    }
    for (double &v : p) v /= sum;
    return p;
}

QValues action_probabilities(const QValues &q, double temperature, double epsilon) {
    QValues p = boltzmann_probs(q, temperature);
    for (double &v : p) v = epsilon / kNumActions + (1.0 - epsilon) * v;
    return p;
}

double temperature_at(const TrainConfig &cfg, int episode) {
    return std::max(cfg.t_min, cfg.t0 * std::pow(cfg.temp_decay, static_cast<double>(episode)));
}

int select_action(QFunction &agent, const ObsState &obs, int episode, const TrainConfig &cfg,
                  Rng &action_rng, Rng &enc_rng) {
    if (action_rng.uniform() < cfg.epsilon)
        return static_cast<int>(action_rng.uniform_int(kNumActions));
    const QValues q = agent.q_values(obs, enc_rng);
    const double temperature = temperature_at(cfg, episode);
    if (temperature < 1e-12) {
        // T -> 0 limit: argmax with the deployed-table tie-break
        int best = 0;
        for (int a = 1; a < kNumActions; ++a)
            if (q[a] > q[best]) best = a;
        return best;
    }
    const QValues probs = boltzmann_probs(q, temperature);
    const double u = action_rng.uniform();
    double acc = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        acc += probs[a];
        if (u < acc) return a;
    }
    return kNumActions - 1;
}

namespace {

void dqn_update(QFunction &agent, QFunction &target, const ReplayBuffer &buffer,
                const TrainConfig &cfg, AdamState &adam, Rng &replay_rng, Rng &enc_rng) {
    agent.zero_grad();
    double loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
        const Transition &tr = buffer.at(replay_rng.uniform_int(buffer.size()));
        double y = tr.reward;
        if (!tr.terminal) {
            const QValues qn = target.q_values(tr.next, enc_rng);
            y += cfg.gamma * *std::max_element(qn.begin(), qn.end());
        }
        const QValues q = agent.forward_train(tr.s, enc_rng);
        const double diff = q[tr.action] - y;
        loss += diff * diff / cfg.batch_size;
        QValues g{};
        g[tr.action] = 2.0 * diff / cfg.batch_size;
        agent.backward_train(g);
    }
    if (!std::isfinite(loss)) throw TrainingError("non-finite DQN loss");
    adam_step(agent.param_blocks(), agent.grad_blocks(), adam);
}

} // namespace

EpisodeLog train_dqn(QFunction &agent, const GridSpec &spec, const TrainConfig &cfg,
                     std::uint64_t seed) {
    cfg.validate();
    if (agent.kind() == AgentKind::qtable)
        throw UsageError("train_dqn expects a neural agent; use train_tabular");
    if (agent.eval_shots() != 0) throw UsageError("shot mode is evaluation-only");

    Rng env_seeds = Rng::derive(seed, kEnvStream);
    Rng action_rng = Rng::derive(seed, kActionStream);
    Rng enc_rng = Rng::derive(seed, kEncStream);
    Rng replay_rng = Rng::derive(seed, kReplayStream);

    GridWorld env(spec, cfg.reward);
    ReplayBuffer buffer(cfg.buffer_capacity);
    std::unique_ptr<QFunction> target = agent.clone();
    AdamState adam;
    adam.lr = cfg.lr;
    adam.clip_norm = cfg.grad_clip;

    EpisodeLog log;
    log.reserve(cfg.episodes);
    long total_steps = 0;
    for (int e = 0; e < cfg.episodes; ++e) {
        ObsState obs = env.reset(env_seeds.next_u64());
        EpisodeStats stats;
        stats.episode = e;
        while (!env.done()) {
            const int action = select_action(agent, obs, e, cfg, action_rng, enc_rng);
            const StepOutcome out = env.step(action);
            buffer.push({obs, action, out.reward, out.obs, out.terminal != Terminal::none});
            obs = out.obs;
            stats.episode_return += out.reward;
            ++stats.steps;
            ++total_steps;
            if (total_steps >= cfg.learning_start)
                dqn_update(agent, *target, buffer, cfg, adam, replay_rng, enc_rng);
            if (total_steps % cfg.target_update == 0) target = agent.clone();
        }
        stats.outcome = env.terminal();
        log.push_back(stats);
    }
    return log;
}

EpisodeLog train_tabular(TabularAgent &agent, const GridSpec &spec, const TrainConfig &cfg,
                         std::uint64_t seed) {
    cfg.validate();
    Rng env_seeds = Rng::derive(seed, kEnvStream);
    Rng action_rng = Rng::derive(seed, kActionStream);
    Rng unused_enc(0);

    GridWorld env(spec, cfg.reward);
    EpisodeLog log;
    log.reserve(cfg.episodes);
    for (int e = 0; e < cfg.episodes; ++e) {
        ObsState obs = env.reset(env_seeds.next_u64());
        EpisodeStats stats;
        stats.episode = e;
        while (!env.done()) {
            int action;
            if (action_rng.uniform() < agent.epsilon()) {
                action = static_cast<int>(action_rng.uniform_int(kNumActions));
            } else {
                // random tie-break: zero-init tables would otherwise lock
                // onto action 0 in every unvisited state
                const QValues q = agent.q_values(obs, unused_enc);
                double best = q[0];
                for (double v : q) best = std::max(best, v);
                int candidates[kNumActions];
                int n = 0;
                for (int a = 0; a < kNumActions; ++a)
                    if (q[a] == best) candidates[n++] = a;
                action = candidates[action_rng.uniform_int(n)];
            }
            const StepOutcome out = env.step(action);
            agent.td_update(obs, action, out.reward, out.obs, out.terminal != Terminal::none,
                            cfg.gamma);
            obs = out.obs;
            stats.episode_return += out.reward;
            ++stats.steps;
        }
        stats.outcome = env.terminal();
        log.push_back(stats);
    }
    return log;
}

std::unique_ptr<QFunction> train_run(AgentKind kind, const GridSpec &spec, const TrainConfig &cfg,
                                     std::uint64_t seed, EpisodeLog *log) {
    Rng init_rng = Rng::derive(seed, kInitStream);
    std::unique_ptr<QFunction> agent = build_agent(kind, cfg.agent, init_rng);
    EpisodeLog l;
    if (kind == AgentKind::qtable)
        l = train_tabular(static_cast<TabularAgent &>(*agent), spec, cfg, seed);
    else
        l = train_dqn(*agent, spec, cfg, seed);
    if (log) *log = std::move(l);
    return agent;
}

void write_episode_log(const EpisodeLog &log, const std::string &path) {
    std::string out = "episode\treturn\tsteps\toutcome\n";
    for (const EpisodeStats &s : log) {
        out += std::to_string(s.episode);
        out += '\t';
        append_double(out, s.episode_return);
        out += '\t';
        out += std::to_string(s.steps);
        out += '\t';
        out += terminal_name(s.outcome);
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::vector<AgentConfig> enumerate_space(AgentKind kind, const AgentConfig &base) {
    std::vector<AgentConfig> space;
    if (is_spiking(kind)) {
        static const double f_max[] = {20.0, 100.0, 200.0};
        static const int timesteps[] = {5, 10, 15, 20, 30};
        static const double dt[] = {0.01, 0.05, 0.1, 0.2};
        static const double tau_mem[] = {0.01, 0.02, 0.04};
        static const double tau_syn[] = {0.005, 0.01, 0.02};
        for (double f : f_max)
            for (int T : timesteps)
                for (double d : dt)
                    for (double tm : tau_mem)
                        for (double ts : tau_syn) {
                            AgentConfig c = base;
                            c.f_max = f;
                            c.timesteps = T;
                            c.dt = d;
                            c.tau_mem = tm;
                            c.tau_syn = ts;
                            space.push_back(c);
                        }
    } else if (kind == AgentKind::mlp || kind == AgentKind::qmlp) {
        for (Activation a : {Activation::relu, Activation::tanh, Activation::sigmoid}) {
            AgentConfig c = base;
            c.activation = a;
            space.push_back(c);
        }
    } else {
        space.push_back(base); // tabular: nothing to search
    }
    return space;
}

GridSearchResult rank_leaderboard(std::vector<SearchRow> rows) {
    GridSearchResult result;
    if (rows.empty()) throw UsageError("empty grid-search space");
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const bool any_survivor =
        std::any_of(rows.begin(), rows.end(), [](const SearchRow &r) { return r.sr >= 0.95; });
    result.below_threshold = !any_survivor;

    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const SearchRow &ra = rows[a], &rb = rows[b];
        if (any_survivor) {
            const bool sa = ra.sr >= 0.95, sb = rb.sr >= 0.95;
            if (sa != sb) return sa;
            if (sa && sb) return ra.pl < rb.pl;
        }
        if (ra.sr != rb.sr) return ra.sr > rb.sr;
        return ra.pl < rb.pl;
    });
    for (std::size_t i : order) result.leaderboard.push_back(rows[i]);
    result.best = 0;
    return result;
}

GridSearchResult grid_search(AgentKind kind, const GridSpec &spec, const TrainConfig &base,
                             const std::vector<std::uint64_t> &seeds, int max_configs,
                             int workers) {
    if (seeds.empty()) throw UsageError("grid search needs at least one seed");
    std::vector<AgentConfig> space = enumerate_space(kind, base.agent);
    if (max_configs > 0 && static_cast<int>(space.size()) > max_configs)
        space.resize(max_configs);

    GridSpec eval_spec = spec;
    eval_spec.training_diagonal = false;

    std::vector<SearchRow> rows(space.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= space.size()) return;
            TrainConfig cfg = base;
            cfg.agent = space[i];
            SearchRow row;
            row.agent = space[i];
            double n_success_pl = 0.0;
            int pl_terms = 0;
            for (std::uint64_t seed : seeds) {
                std::unique_ptr<QFunction> agent = train_run(kind, spec, cfg, seed);
                const QTable table =
                    build_qtable(*agent, Rng::derive(seed, kConvertStream).next_u64());
                const MetricsReport report = run_protocol(table, eval_spec);
                row.sr += report.sr / seeds.size();
                row.spl += report.spl / seeds.size();
                row.tr += report.any_success ? report.tr_mean / seeds.size() : 0.0;
                if (report.any_success) {
                    n_success_pl += report.pl_mean;
                    ++pl_terms;
                }
            }
            row.pl = pl_terms > 0 ? n_success_pl / pl_terms
                                  : std::numeric_limits<double>::infinity();
            rows[i] = row;
        }
    };
    const int nthreads = std::max(1, workers);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }
    return rank_leaderboard(std::move(rows));
}

void write_leaderboard(const GridSearchResult &result, const std::string &path) {
    std::string out =
        "rank\tactivation\tf_max\tT\tdt\ttau_mem\ttau_syn\tsr\tpl\tspl\ttr\tbelow_threshold\n";
    int rank = 1;
    for (const SearchRow &row : result.leaderboard) {
        out += std::to_string(rank++);
        out += '\t';
        out += activation_name(row.agent.activation);
        out += '\t';
        append_double(out, row.agent.f_max);
        out += '\t';
        out += std::to_string(row.agent.timesteps);
        out += '\t';
        append_double(out, row.agent.dt);
        out += '\t';
        append_double(out, row.agent.tau_mem);
        out += '\t';
        append_double(out, row.agent.tau_syn);
        out += '\t';
        append_double(out, row.sr);
        out += '\t';
        append_double(out, row.pl);
        out += '\t';
        append_double(out, row.spl);
        out += '\t';
        append_double(out, row.tr);
        out += '\t';
        out += result.below_threshold ? "yes" : "no";
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

} // namespace qspirl
