#pragma once

#include <cstdint>
#include <vector>

#include "qspirl/errors.hpp"
#include "qspirl/rng.hpp"

namespace qspirl {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell &a, const Cell &b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Cell &a, const Cell &b) { return !(a == b); }
};

/// Grid geometry and obstacle counts for one environment configuration.
struct GridSpec {
    int size = 20;
    int n_static = 6;
    int n_dynamic = 1;
    bool training_diagonal = false;
    Cell start{0, 0};
    Cell goal{19, 19};
    double cell_size = 1.0; // meters per cell

    /// Standard configurations: 20/30/40 are the reference environments
    /// with interior diagonal routes; 10 is a reduced desk-scale setting
    /// (2 static, 1 dynamic, straight mid-row route).
    static GridSpec preset(int g, bool training_diagonal = false);

    void validate() const;
    bool inside(Cell c) const { return c.x >= 0 && c.x < size && c.y >= 0 && c.y < size; }
};

struct Obstacle {
    Cell cell;
    bool dynamic = false;
    Cell dir{0, 0}; // one of the four cardinal unit vectors; (0,0) for static
};

/// Heading is stored as an octant (integer multiple of pi/4) so that the
/// pi/4 quantization is exact forever; radians are derived on demand.
struct AgentPose {
    Cell cell;
    int octant = 0; // heading = octant * pi/4, octant in 0..7

    double heading_radians() const; // mapped into (-pi, pi]
};

/// The 4-component discrete observation shared by every agent.
struct ObsState {
    int obstacle_region = 1; // 1..8, heading-relative sector of the nearest obstacle
    int motion_dir = 0;      // 0..4, direction of the nearest obstacle if dynamic, 0 otherwise
    int target_region = 1;   // 1..8, heading-relative sector of the goal
    int angle_bin = 1;       // 1..8, binned target-obstacle separation angle

    bool valid() const {
        return obstacle_region >= 1 && obstacle_region <= 8 && motion_dir >= 0 &&
               motion_dir <= 4 && target_region >= 1 && target_region <= 8 && angle_bin >= 1 &&
               angle_bin <= 8;
    }

    friend bool operator==(const ObsState &a, const ObsState &b) {
        return a.obstacle_region == b.obstacle_region && a.motion_dir == b.motion_dir &&
               a.target_region == b.target_region && a.angle_bin == b.angle_bin;
    }
};

inline constexpr int kNumActions = 5;
inline constexpr int kForwardAction = 2; // zero-yaw action
inline constexpr int kMaxSteps = 300;
inline constexpr int kNumStates = 8 * 5 * 8 * 8; // 2560

struct RewardParams {
    double beta1 = 1.0;  // progress gain
    double beta2 = -0.5; // obstacle-penalty exponent coefficient, must be < 0
    double beta3 = 0.1;  // angular-separation gain
    // The exponential obstacle term pays ~1 per step when obstacle distance
    // barely changes; a unit step cost cancels that baseline so loitering
    // earns nothing.
    double step_penalty = 1.0;
    double r_goal = 100.0;
    double r_fail = -100.0;
    double r_timeout = -50.0;

    void validate() const;
};

enum class Terminal { none, goal, collision, boundary, timeout };

const char *terminal_name(Terminal t);

struct StepOutcome {
    ObsState obs;
    double reward = 0.0;
    Terminal terminal = Terminal::none;
};

/// Continuous geometry snapshot used by the shaped reward.
struct Geometry {
    double goal_dist = 0.0;
    double obstacle_dist = 0.0;
    double alpha = 0.0; // target-obstacle separation angle in [0, pi]
};

double compute_reward(const Geometry &prev, const Geometry &now, Terminal terminal,
                      const RewardParams &params);

/// Cells blocked by the training-only diagonal wall: a contiguous run of
/// floor(g/4) cells centered on the midpoint of the start->goal line.
std::vector<Cell> diagonal_block_cells(const GridSpec &spec);

std::vector<Obstacle> sample_obstacles(const GridSpec &spec, Rng &rng);

/// Discrete navigation environment. Single-threaded; owns its RNG. reset()
/// is a pure function of (spec, reward params, seed).
class GridWorld {
  public:
    GridWorld(GridSpec spec, RewardParams reward);

    ObsState reset(std::uint64_t seed);
    StepOutcome step(int action);

    /// Replaces the sampled layout with an explicit one (custom scenarios).
    void set_obstacles(std::vector<Obstacle> obstacles);

    ObsState observe() const;

    bool done() const { return terminal_ != Terminal::none; }
    Terminal terminal() const { return terminal_; }
    const AgentPose &pose() const { return pose_; }
    const std::vector<Obstacle> &obstacles() const { return obstacles_; }
    const GridSpec &spec() const { return spec_; }
    int steps_taken() const { return steps_; }

    /// Exposed for property tests; normally driven by step() every 2 agent steps.
    void advance_dynamics();

  private:
    Geometry geometry() const;
    int nearest_obstacle() const; // index into obstacles_, -1 if none

    GridSpec spec_;
    RewardParams reward_;
    AgentPose pose_;
    std::vector<Obstacle> obstacles_;
    Terminal terminal_ = Terminal::goal; // unusable until reset()
    int steps_ = 0;
};

} // namespace qspirl
