#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "qspirl/errors.hpp"
#include "qspirl/evaluation.hpp"
#include "qspirl/qtable.hpp"
#include "qspirl/render.hpp"
#include "qspirl/serialize.hpp"
#include "qspirl/training.hpp"

namespace {

using namespace qspirl;

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool is_qtable_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    in >> magic;
    return magic == "qspirl-qtable";
}

std::vector<std::uint64_t> parse_seed_range(const std::string &text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw UsageError("bad seed range: " + text);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) seeds.push_back(std::stoull(item));
    if (seeds.empty()) throw UsageError("empty seed list");
    return seeds;
}

struct CommonOpts {
    int env = 20;
    std::string config_path;
    std::optional<int> episodes;
};

/// Layering: family defaults for the env size, then the config file, then
/// explicit flags. Training runs on the 20/30/40 presets include the
/// training-only diagonal wall; the reduced 10x10 preset has none, and a
/// config file may override either way.
void resolve_config(const CommonOpts &opts, AgentKind kind, bool training, GridSpec &spec,
                    TrainConfig &cfg) {
    spec = GridSpec::preset(opts.env, training && opts.env != 10);
    cfg = TrainConfig::defaults_for(kind, opts.env);
    if (!opts.config_path.empty()) apply_run_config(slurp(opts.config_path), spec, cfg);
    if (opts.episodes) cfg.episodes = *opts.episodes;
    if (!training) spec.training_diagonal = false; // test-time rule
}

int cmd_train(const CommonOpts &opts, const std::string &agent_name, std::uint64_t seed,
              const std::string &out_path, std::string log_path) {
    const AgentKind kind = agent_kind_from_name(agent_name);
    GridSpec spec;
    TrainConfig cfg;
    resolve_config(opts, kind, true, spec, cfg);

    EpisodeLog log;
    std::unique_ptr<QFunction> agent = train_run(kind, spec, cfg, seed, &log);

    if (kind == AgentKind::qtable) {
        QTable table = build_qtable(*agent, 0);
        table.config_digest = config_digest(spec, cfg);
        save_qtable(table, out_path);
    } else {
        save_model(*agent, spec, cfg, out_path);
    }
    if (log_path.empty()) log_path = out_path + ".log.tsv";
    write_episode_log(log, log_path);
    std::cout << "trained " << agent_name << " on " << spec.size << "x" << spec.size << ", "
              << log.size() << " episodes -> " << out_path << "\n";
    return 0;
}

int cmd_gridsearch(const CommonOpts &opts, const std::string &agent_name,
                   const std::vector<std::uint64_t> &seeds, int max_configs, int workers,
                   const std::string &out_dir) {
    const AgentKind kind = agent_kind_from_name(agent_name);
    GridSpec spec;
    TrainConfig base;
    resolve_config(opts, kind, true, spec, base);

    const GridSearchResult result = grid_search(kind, spec, base, seeds, max_configs, workers);
    std::filesystem::create_directories(out_dir);
    write_leaderboard(result, out_dir + "/leaderboard.tsv");

    // retrain the winner (training is deterministic) and persist it
    TrainConfig best = base;
    best.agent = result.leaderboard[result.best].agent;
    std::unique_ptr<QFunction> agent = train_run(kind, spec, best, seeds.front());
    const std::string model_path =
        out_dir + (kind == AgentKind::qtable ? "/best.qtable" : "/best.qsm");
    if (kind == AgentKind::qtable) {
        QTable table = build_qtable(*agent, 0);
        table.config_digest = config_digest(spec, best);
        save_qtable(table, model_path);
    } else {
        save_model(*agent, spec, best, model_path);
    }
    const SearchRow &win = result.leaderboard[result.best];
    std::cout << "searched " << result.leaderboard.size() << " configurations; best sr=" << win.sr
              << " pl=" << win.pl << (result.below_threshold ? " (below SR threshold)" : "")
              << " -> " << model_path << "\n";
    return 0;
}

int cmd_convert(const std::string &model_path, std::uint64_t seed, int shots,
                const std::string &out_path) {
    if (is_qtable_file(model_path)) {
        if (shots > 0) throw UsageError("shot mode applies only to quantum models");
        QTable table = load_qtable(model_path); // tabular model: table passes through
        save_qtable(table, out_path);
        std::cout << "copied tabular q-table -> " << out_path << "\n";
        return 0;
    }
    LoadedModel loaded = load_model(model_path);
    if (shots > 0 && !is_quantum(loaded.agent->kind()))
        throw UsageError("shot mode applies only to quantum models");
    QTable table = build_qtable(*loaded.agent, seed, shots);
    table.config_digest = config_digest(loaded.spec, loaded.config);
    save_qtable(table, out_path);
    std::cout << "converted " << agent_kind_name(loaded.agent->kind()) << " model -> " << out_path
              << (shots > 0 ? " (" + std::to_string(shots) + " shots)" : "") << "\n";
    return 0;
}

int cmd_eval(const std::string &table_path, const CommonOpts &opts, const std::string &seeds_text,
             int workers, const std::string &out_path, const std::string &traj_dir) {
    const QTable table = load_qtable(table_path);
    GridSpec spec;
    TrainConfig cfg;
    resolve_config(opts, AgentKind::qtable, false, spec, cfg);
    spec.training_diagonal = false; // test-time rule

    const std::vector<std::uint64_t> seeds =
        seeds_text.empty() ? default_test_seeds() : parse_seed_range(seeds_text);
    const MetricsReport report = run_protocol(table, spec, seeds, workers);
    write_report(report, out_path);
    if (!traj_dir.empty()) {
        std::filesystem::create_directories(traj_dir);
        for (const EpisodeRecord &rec : report.episodes)
            write_trajectory(rec, spec, traj_dir + "/traj_" + std::to_string(rec.seed) + ".tsv");
    }
    std::printf("n=%d sr=%.4f spl=%.4f", report.n, report.sr, report.spl);
    if (report.any_success)
        std::printf(" pl=%.4f+/-%.4f tr=%.4f+/-%.4f", report.pl_mean, report.pl_se,
                    report.tr_mean, report.tr_se);
    std::printf(" -> %s\n", out_path.c_str());
    return 0;
}

int cmd_render(const std::string &traj_path, const std::string &out_path) {
    render_trajectory_file(traj_path, out_path);
    std::cout << "rendered " << traj_path << " -> " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"grid-world navigation RL pipeline: train, convert to q-table, evaluate"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string agent_name = "qsnn";
    std::uint64_t seed = 0;
    std::string out_path, log_path, config_path;

    auto *train = app.add_subcommand("train", "train one agent and write a model file");
    train->add_option("--env", opts.env, "grid size preset (10, 20, 30, 40)");
    train->add_option("--agent", agent_name, "qtable | mlp | snn | qmlp | qsnn");
    train->add_option("--seed", seed, "training seed");
    train->add_option("--out", out_path, "model output path")->required();
    train->add_option("--log", log_path, "episode log path (default <out>.log.tsv)");
    train->add_option("--config", opts.config_path, "run configuration file");
    int episodes_flag = -1;
    train->add_option("--episodes", episodes_flag, "override training episodes");

    auto *search = app.add_subcommand("gridsearch", "hyperparameter search over the model grid");
    std::vector<std::uint64_t> search_seeds{0};
    int max_configs = 0, workers = 1;
    std::string out_dir = "gridsearch_out";
    search->add_option("--env", opts.env, "grid size preset");
    search->add_option("--agent", agent_name, "agent family");
    search->add_option("--seed", search_seeds, "training seed(s)");
    search->add_option("--max-configs", max_configs, "cap on configurations (0 = all)");
    search->add_option("--workers", workers, "parallel workers");
    search->add_option("--out-dir", out_dir, "output directory");
    search->add_option("--config", opts.config_path, "run configuration file");
    search->add_option("--episodes", episodes_flag, "override training episodes");

    auto *convert = app.add_subcommand("convert", "convert a model file into a q-table");
    std::string model_path;
    int shots = 0;
    convert->add_option("--model", model_path, "model file")->required();
    convert->add_option("--seed", seed, "conversion seed (spiking encoding realization)");
    convert->add_option("--shots", shots, "sample expectations with this shot count");
    convert->add_option("--out", out_path, "q-table output path")->required();

    auto *eval = app.add_subcommand("eval", "run the held-out evaluation protocol on a q-table");
    std::string table_path, seeds_text, traj_dir, report_path = "report.json";
    int eval_shots = 0;
    eval->add_option("--table", table_path, "q-table file")->required();
    eval->add_option("--env", opts.env, "grid size preset");
    eval->add_option("--seeds", seeds_text, "seed range A..B or comma list (default 2000..2099)");
    eval->add_option("--workers", workers, "parallel workers");
    eval->add_option("--out", report_path, "metrics report path");
    eval->add_option("--trajectories", traj_dir, "directory for per-episode trajectories");
    eval->add_option("--config", opts.config_path, "run configuration file");
    auto *eval_shots_opt =
        eval->add_option("--shots", eval_shots, "rejected: shots apply at convert time");

    auto *render = app.add_subcommand("render", "render a trajectory file to SVG");
    std::string traj_path, svg_path = "trajectory.svg";
    render->add_option("--trajectory", traj_path, "trajectory file")->required();
    render->add_option("--out", svg_path, "SVG output path");

    try {
        app.parse(argc, argv);
        if (episodes_flag >= 0) opts.episodes = episodes_flag;

        if (train->parsed()) return cmd_train(opts, agent_name, seed, out_path, log_path);
        if (search->parsed())
            return cmd_gridsearch(opts, agent_name, search_seeds, max_configs, workers, out_dir);
        if (convert->parsed()) return cmd_convert(model_path, seed, shots, out_path);
        if (eval->parsed()) {
            if (*eval_shots_opt)
                throw UsageError("eval reads tables only; pass --shots to convert instead");
            return cmd_eval(table_path, opts, seeds_text, workers, report_path, traj_dir);
        }
        if (render->parsed()) return cmd_render(traj_path, svg_path);
        return 2;
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
