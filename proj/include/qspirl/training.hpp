#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qspirl/agents.hpp"
#include "qspirl/gridworld.hpp"
#include "qspirl/neural.hpp"

namespace qspirl {

/// Fixed hyperparameters plus the per-model architectural fields and the
/// reward constants. Defaults are the reference fixed values.
struct TrainConfig {
    int episodes = 800;
    double gamma = 0.9;
    int buffer_capacity = 100000;
    int batch_size = 128;
    int target_update = 500;   // environment steps between target syncs
    int learning_start = 1000; // environment steps before updates begin
    double lr = 0.005;
    double grad_clip = 1.0;
    double epsilon = 0.01;     // random-action probability
    double t0 = 1.0;           // initial softmax temperature
    double temp_decay = 0.999; // per-episode decay
    double t_min = 0.05;

    AgentConfig agent;
    RewardParams reward;

    /// Grid-search selected values for each agent family and grid size.
    static TrainConfig defaults_for(AgentKind kind, int grid_size);
    void validate() const;
};

struct Transition {
    ObsState s;
    int action = 0;
    double reward = 0.0;
    ObsState next;
    bool terminal = false;
};

/// FIFO ring of capacity transitions; the oldest entry is evicted first.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(int capacity);

    void push(const Transition &t);
    std::size_t size() const { return size_; }
    const Transition &at(std::size_t i) const; // 0 = oldest

  private:
    std::vector<Transition> ring_;
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

/// Softmax over q / temperature (numerically stable).
QValues boltzmann_probs(const QValues &q, double temperature);
/// Total selection probabilities including the epsilon gate.
QValues action_probabilities(const QValues &q, double temperature, double epsilon);
double temperature_at(const TrainConfig &cfg, int episode);

/// Epsilon gate first, Boltzmann sampling second.
int select_action(QFunction &agent, const ObsState &obs, int episode, const TrainConfig &cfg,
                  Rng &action_rng, Rng &enc_rng);

struct EpisodeStats {
    int episode = 0;
    double episode_return = 0.0;
    int steps = 0;
    Terminal outcome = Terminal::none;
};

using EpisodeLog = std::vector<EpisodeStats>;

/// DQN with replay and a periodically synced target network. The agent is
/// trained in place; the run is a deterministic function of (config, seed).
EpisodeLog train_dqn(QFunction &agent, const GridSpec &spec, const TrainConfig &cfg,
                     std::uint64_t seed);

/// Epsilon-greedy temporal-difference updates on the explicit table.
EpisodeLog train_tabular(TabularAgent &agent, const GridSpec &spec, const TrainConfig &cfg,
                         std::uint64_t seed);

/// Builds a fresh agent from a seed-derived stream and trains it.
std::unique_ptr<QFunction> train_run(AgentKind kind, const GridSpec &spec, const TrainConfig &cfg,
                                     std::uint64_t seed, EpisodeLog *log = nullptr);

void write_episode_log(const EpisodeLog &log, const std::string &path);

// ------------------------------------------------------------- grid search

struct SearchRow {
    AgentConfig agent;
    double sr = 0.0;
    double pl = 0.0; // mean over successful episodes; +inf when no success
    double spl = 0.0;
    double tr = 0.0;
};

struct GridSearchResult {
    std::vector<SearchRow> leaderboard; // ranked, winner first
    int best = -1;                      // index into leaderboard
    bool below_threshold = false;       // no configuration reached SR >= 0.95
};

/// Candidate configurations: the reference search grid for the agent family.
std::vector<AgentConfig> enumerate_space(AgentKind kind, const AgentConfig &base);

/// Selection rule: keep SR >= 0.95, rank survivors by PL ascending; if the
/// filter is empty, fall back to SR descending then PL and flag the result.
GridSearchResult rank_leaderboard(std::vector<SearchRow> rows);

/// Trains and evaluates every configuration (averaging over seeds), then
/// applies the selection rule. Workers parallelize over configurations.
GridSearchResult grid_search(AgentKind kind, const GridSpec &spec, const TrainConfig &base,
                             const std::vector<std::uint64_t> &seeds, int max_configs = 0,
                             int workers = 1);

void write_leaderboard(const GridSearchResult &result, const std::string &path);

} // namespace qspirl
