#include "qspirl/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "qspirl/errors.hpp"

namespace qspirl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_cost(Cell a, Cell b, double cell_size) {
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    return (dx + dy == 2) ? std::sqrt(2.0) * cell_size : cell_size;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double> &xs) {
    MeanSe r;
    if (xs.empty()) return r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - r.mean) * (x - r.mean);
        const double sd = std::sqrt(sq / static_cast<double>(xs.size() - 1));
        r.se = sd / std::sqrt(static_cast<double>(xs.size()));
    }
    return r;
}

} // namespace

std::vector<std::uint64_t> default_test_seeds() {
    std::vector<std::uint64_t> seeds(100);
    for (int i = 0; i < 100; ++i) seeds[i] = 2000 + i;
    return seeds;
}

double shortest_path(const GridSpec &spec, const std::vector<Cell> &static_obstacles) {
    const int g = spec.size;
    std::vector<char> blocked(static_cast<std::size_t>(g) * g, 0);
    for (const Cell &c : static_obstacles)
        if (spec.inside(c)) blocked[static_cast<std::size_t>(c.y) * g + c.x] = 1;
    auto id = [g](Cell c) { return static_cast<std::size_t>(c.y) * g + c.x; };
    if (blocked[id(spec.start)] || blocked[id(spec.goal)]) return kInf;

    std::vector<double> dist(static_cast<std::size_t>(g) * g, kInf);
    using Node = std::pair<double, std::size_t>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
    dist[id(spec.start)] = 0.0;
    heap.push({0.0, id(spec.start)});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == id(spec.goal)) return d;
        const Cell cu{static_cast<int>(u % g), static_cast<int>(u / g)};
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const Cell cv{cu.x + dx, cu.y + dy};
                if (!spec.inside(cv) || blocked[id(cv)]) continue;
                const double nd = d + step_cost(cu, cv, spec.cell_size);
                if (nd < dist[id(cv)]) {
                    dist[id(cv)] = nd;
                    heap.push({nd, id(cv)});
                }
            }
        }
    }
    return kInf;
}

double compute_spl(const std::vector<EpisodeRecord> &records) {
    if (records.empty()) return 0.0;
    double sum = 0.0;
    for (const EpisodeRecord &r : records) {
        if (!r.success || !std::isfinite(r.l_star)) continue;
        sum += r.l_star / std::max(r.path_length, r.l_star);
    }
    return sum / static_cast<double>(records.size());
}

double compute_turn_rate(const EpisodeRecord &record) {
    if (record.actions.empty()) throw UsageError("turn rate of an empty action sequence");
    int turns = 0;
    for (int a : record.actions)
        if (a != kForwardAction) ++turns;
    return static_cast<double>(turns) / static_cast<double>(record.actions.size());
}

namespace {

EpisodeRecord run_episode(const QTable &table, const GridSpec &spec, std::uint64_t seed) {
    EpisodeRecord rec;
    rec.seed = seed;
    GridWorld env(spec, RewardParams{}); // rewards do not influence greedy rollouts
    ObsState obs = env.reset(seed);

    std::vector<Cell> statics;
    for (const Obstacle &o : env.obstacles())
        if (!o.dynamic) statics.push_back(o.cell);
    rec.l_star = shortest_path(spec, statics);
    rec.unreachable = !std::isfinite(rec.l_star);

    rec.cells.push_back(env.pose().cell);
    rec.octants.push_back(env.pose().octant);
    while (!env.done()) {
        const int action = greedy(table, obs);
        const StepOutcome out = env.step(action);
        rec.actions.push_back(action);
        rec.cells.push_back(env.pose().cell);
        rec.octants.push_back(env.pose().octant);
        rec.path_length += step_cost(rec.cells[rec.cells.size() - 2], rec.cells.back(),
                                     spec.cell_size);
        if (action != kForwardAction) ++rec.turns;
        obs = out.obs;
    }
    rec.outcome = env.terminal();
    rec.success = rec.outcome == Terminal::goal;
    return rec;
}

} // namespace

MetricsReport run_protocol(const QTable &table, const GridSpec &spec,
                           const std::vector<std::uint64_t> &seeds, int workers) {
    if (spec.training_diagonal)
        throw UsageError("test protocol requires training_diagonal = false");
    if (seeds.empty()) throw UsageError("no evaluation seeds");

    MetricsReport report;
    report.n = static_cast<int>(seeds.size());
    report.episodes.resize(seeds.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            report.episodes[i] = run_episode(table, spec, seeds[i]);
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

    std::vector<double> pls, trs;
    int successes = 0;
    for (const EpisodeRecord &r : report.episodes) {
        if (!r.success) continue;
        ++successes;
        pls.push_back(r.path_length);
        trs.push_back(compute_turn_rate(r));
    }
    report.sr = static_cast<double>(successes) / static_cast<double>(report.n);
    report.spl = compute_spl(report.episodes);
    report.any_success = successes > 0;
    const MeanSe pl = mean_and_se(pls);
    const MeanSe tr = mean_and_se(trs);
    report.pl_mean = pl.mean;
    report.pl_se = pl.se;
    report.tr_mean = tr.mean;
    report.tr_se = tr.se;
    return report;
}

std::string report_to_json(const MetricsReport &report) {
    nlohmann::json j;
    j["format"] = "qspirl-report v1";
    j["sr"] = report.sr;
    j["spl"] = report.spl;
    j["n"] = report.n;
    if (report.any_success) {
        j["pl_mean"] = report.pl_mean;
        j["pl_se"] = report.pl_se;
        j["tr_mean"] = report.tr_mean;
        j["tr_se"] = report.tr_se;
    } else {
        j["pl_mean"] = nullptr;
        j["pl_se"] = nullptr;
        j["tr_mean"] = nullptr;
        j["tr_se"] = nullptr;
    }
    nlohmann::json episodes = nlohmann::json::array();
    for (const EpisodeRecord &r : report.episodes) {
        nlohmann::json e;
        e["seed"] = r.seed;
        e["outcome"] = terminal_name(r.outcome);
        e["steps"] = r.actions.size();
        e["L"] = r.path_length;
        if (std::isfinite(r.l_star))
            e["L_star"] = r.l_star;
        else
            e["L_star"] = nullptr;
        e["turns"] = r.turns;
        if (r.unreachable) e["unreachable"] = true;
        episodes.push_back(e);
    }
    j["episodes"] = episodes;
    return j.dump(2) + "\n";
}

void write_report(const MetricsReport &report, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    const std::string text = report_to_json(report);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string trajectory_to_string(const EpisodeRecord &record, const GridSpec &spec) {
    std::ostringstream out;
    out << "# qspirl-trajectory v1 seed=" << record.seed << " g=" << spec.size
        << " static=" << spec.n_static << " dynamic=" << spec.n_dynamic
        << " diagonal=" << (spec.training_diagonal ? 1 : 0) << " start=" << spec.start.x << ','
        << spec.start.y << " goal=" << spec.goal.x << ',' << spec.goal.y
        << " cell=" << spec.cell_size << " outcome=" << terminal_name(record.outcome) << "\n";
    out << "step\tx\ty\theading\taction\n";
    for (std::size_t i = 0; i < record.cells.size(); ++i) {
        AgentPose pose{record.cells[i], record.octants[i]};
        out << i << '\t' << record.cells[i].x << '\t' << record.cells[i].y << '\t'
            << pose.heading_radians() << '\t'
            << (i == 0 ? -1 : record.actions[i - 1]) << '\n';
    }
    return out.str();
}

void write_trajectory(const EpisodeRecord &record, const GridSpec &spec,
                      const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    const std::string text = trajectory_to_string(record, spec);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

} // namespace qspirl
