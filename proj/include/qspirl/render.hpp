#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qspirl/gridworld.hpp"

namespace qspirl {

struct ParsedTrajectory {
    GridSpec spec;
    std::uint64_t seed = 0;
    std::vector<Cell> cells;
    std::vector<int> actions;
    std::string outcome;
};

ParsedTrajectory parse_trajectory(const std::string &text);

/// Scalable vector rendering of one episode: grid lines, dark static cells,
/// dashed dynamic-obstacle traces, start/goal markers, and the agent
/// polyline. The environment is replayed from (spec, seed, actions) to
/// recover obstacle motion.
std::string render_svg(const ParsedTrajectory &trajectory);

void render_trajectory_file(const std::string &trajectory_path, const std::string &svg_path);

} // namespace qspirl
