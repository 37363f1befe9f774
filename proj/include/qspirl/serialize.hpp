#pragma once

#include <memory>
#include <string>

#include "qspirl/agents.hpp"
#include "qspirl/training.hpp"

namespace qspirl {

/// "qspirl-model v1": structured-text model document carrying the model
/// kind, environment preset, TrainConfig, and every parameter block in full
/// round-trip precision. Tabular agents persist in the qtable format instead.
std::string model_to_string(const QFunction &agent, const GridSpec &spec,
                            const TrainConfig &config);
void save_model(const QFunction &agent, const GridSpec &spec, const TrainConfig &config,
                const std::string &path);

struct LoadedModel {
    std::unique_ptr<QFunction> agent;
    GridSpec spec;
    TrainConfig config;
};

LoadedModel model_from_string(const std::string &text);
LoadedModel load_model(const std::string &path);

/// FNV-1a hash of the canonical config document, as provenance for tables.
std::string config_digest(const GridSpec &spec, const TrainConfig &config);

/// Applies a run-configuration file on top of the given defaults. Unknown
/// keys are rejected.
void apply_run_config(const std::string &json_text, GridSpec &spec, TrainConfig &config);

} // namespace qspirl
