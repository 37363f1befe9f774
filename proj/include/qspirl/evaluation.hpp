#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qspirl/gridworld.hpp"
#include "qspirl/qtable.hpp"

namespace qspirl {

/// One held-out test episode under greedy table inference.
struct EpisodeRecord {
    std::uint64_t seed = 0;
    std::vector<Cell> cells;      // visited cells p_0..p_T
    std::vector<int> actions;     // a_1..a_T
    std::vector<int> octants;     // heading after each pose, parallel to cells
    Terminal outcome = Terminal::none;
    bool success = false;
    double path_length = 0.0; // meters: cell_size per axis step, sqrt(2)*cell_size per diagonal
    double l_star = 0.0;      // shortest feasible path over static obstacles; inf if unreachable
    bool unreachable = false;
    int turns = 0; // actions different from the zero-yaw action
};

struct MetricsReport {
    double sr = 0.0;
    double spl = 0.0;
    bool any_success = false; // PL/TR are undefined without successes
    double pl_mean = 0.0, pl_se = 0.0;
    double tr_mean = 0.0, tr_se = 0.0;
    int n = 0;
    std::vector<EpisodeRecord> episodes;
};

std::vector<std::uint64_t> default_test_seeds(); // 2000..2099

/// Dijkstra over 8-connected free cells; static obstacles blocked, dynamic
/// obstacles and heading kinematics ignored. Returns +inf when the goal is
/// unreachable.
double shortest_path(const GridSpec &spec, const std::vector<Cell> &static_obstacles);

/// Success-weighted path length: (1/N) sum S_i * L*_i / max(L_i, L*_i).
double compute_spl(const std::vector<EpisodeRecord> &records);

/// Fraction of actions that change heading.
double compute_turn_rate(const EpisodeRecord &record);

/// Runs one greedy episode per seed (horizon 300) and aggregates all
/// metrics. The spec must have the training-only diagonal disabled.
MetricsReport run_protocol(const QTable &table, const GridSpec &spec,
                           const std::vector<std::uint64_t> &seeds = default_test_seeds(),
                           int workers = 1);

std::string report_to_json(const MetricsReport &report);
void write_report(const MetricsReport &report, const std::string &path);

/// Delimited trajectory with an env-spec header so the renderer can replay
/// the episode (step, x, y, heading, action).
std::string trajectory_to_string(const EpisodeRecord &record, const GridSpec &spec);
void write_trajectory(const EpisodeRecord &record, const GridSpec &spec, const std::string &path);

} // namespace qspirl
