#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qspirl/gridworld.hpp"

namespace qspirl {

class QFunction;

/// Canonical state enumeration, mixed-radix over (R_o, D_o, R_T, A) with the
/// obstacle region most significant. Bijective onto 0..2559.
int state_index(const ObsState &obs);
ObsState state_from_index(int index);

/// The universal deployment artifact: one action-value row per discrete
/// state. Values are 32-bit so the file format round-trips bitwise.
struct QTable {
    std::vector<float> values; // kNumStates x kNumActions
    std::string model_kind = "qtable";
    std::string config_digest; // in-memory provenance, not persisted
    std::uint64_t conversion_seed = 0;

    QTable() : values(static_cast<std::size_t>(kNumStates) * kNumActions, 0.0f) {}

    float at(int s, int a) const { return values[static_cast<std::size_t>(s) * kNumActions + a]; }
    std::span<const float> row(int s) const {
        return {values.data() + static_cast<std::size_t>(s) * kNumActions, kNumActions};
    }
};

/// Queries the agent on every discrete state. Spiking agents get one offline
/// encoding realization per state, drawn from a stream derived from
/// (conversion_seed, state index); quantum agents may sample expectations
/// with `shots` > 0.
QTable build_qtable(QFunction &agent, std::uint64_t conversion_seed, int shots = 0);

/// Greedy action for a row: argmax with ties broken by the smallest index.
int greedy_action(std::span<const float> row);
int greedy(const QTable &table, const ObsState &obs);

/// "qspirl-qtable v1" text format; shortest round-trip decimals, bit-exact
/// across platforms.
void save_qtable(const QTable &table, const std::string &path);
QTable load_qtable(const std::string &path);
std::string qtable_to_string(const QTable &table);
QTable qtable_from_string(const std::string &text);

} // namespace qspirl
