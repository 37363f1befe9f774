#include "qspirl/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace qspirl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Octant -> unit/diagonal displacement, octant k meaning heading k*pi/4.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

double distance(Cell a, Cell b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// Sector index 1..8 of `angle` relative to `heading`: half-open pi/4
// sectors counter-clockwise, sector 1 centered on the heading. Centering
// keeps "target dead ahead" strictly inside sector 1, so aligned forward
// motion maps to a stable state instead of oscillating across a boundary.
int angular_sector(double angle, double heading) {
    double rel = std::fmod(angle - heading + kPi / 8.0, 2.0 * kPi);
    if (rel < 0.0) rel += 2.0 * kPi;
    int idx = static_cast<int>(rel / (kPi / 4.0));
    if (idx >= 8) idx = 0; // guard against rel rounding up to 2*pi
    return idx + 1;
}

int motion_dir_code(Cell dir) {
    if (dir == Cell{1, 0}) return 1;
    if (dir == Cell{-1, 0}) return 2;
    if (dir == Cell{0, 1}) return 3;
    if (dir == Cell{0, -1}) return 4;
    return 0;
}

} // namespace

GridSpec GridSpec::preset(int g, bool training_diagonal) {
    GridSpec spec;
    spec.size = g;
    spec.training_diagonal = training_diagonal;
    // Interior start/goal, inset g/5 per side: optimal diagonals of about
    // 11, 17 and 23 cells on the three reference grids.
    const int inset = g / 5;
    spec.start = {inset, inset};
    spec.goal = {g - 1 - inset, g - 1 - inset};
    switch (g) {
    case 10:
        spec.n_static = 2;
        spec.n_dynamic = 1;
        // mid-row route: symmetric wall margins, learnable at desk scale
        spec.start = {2, 5};
        spec.goal = {7, 5};
        break;
    case 20: spec.n_static = 6; spec.n_dynamic = 1; break;
    case 30: spec.n_static = 9; spec.n_dynamic = 1; break;
    case 40: spec.n_static = 12; spec.n_dynamic = 3; break;
    default: throw UsageError("no preset for grid size " + std::to_string(g));
    }
    return spec;
}

void GridSpec::validate() const {
    if (size < 5) throw ConfigError("grid size must be at least 5");
    if (!inside(start) || !inside(goal)) throw ConfigError("start/goal outside the grid");
    if (start == goal) throw ConfigError("start equals goal");
    if (n_static < 0 || n_dynamic < 0) throw ConfigError("negative obstacle count");
    if (cell_size <= 0.0) throw ConfigError("cell size must be positive");
    const int diag = training_diagonal ? size / 4 : 0;
    if (n_static + n_dynamic + diag > size * size - 2)
        throw ConfigError("obstacle count exceeds free cells");
}

void RewardParams::validate() const {
    if (beta2 >= 0.0) throw ConfigError("beta2 must be negative");
    if (step_penalty < 0.0) throw ConfigError("step penalty must be >= 0");
    if (r_goal <= 0.0) throw ConfigError("goal reward must be positive");
    if (r_fail >= 0.0) throw ConfigError("failure reward must be negative");
    if (r_timeout > 0.0) throw ConfigError("timeout reward must be <= 0");
}

const char *terminal_name(Terminal t) {
    switch (t) {
    case Terminal::none: return "none";
    case Terminal::goal: return "goal";
    case Terminal::collision: return "collision";
    case Terminal::boundary: return "boundary";
    case Terminal::timeout: return "timeout";
    }
    return "?";
}

double AgentPose::heading_radians() const {
    int k = octant;
    if (k > 4) k -= 8; // map 5..7 to -3..-1 so the result lies in (-pi, pi]
    return k * (kPi / 4.0);
}

double compute_reward(const Geometry &prev, const Geometry &now, Terminal terminal,
                      const RewardParams &p) {
    switch (terminal) {
    case Terminal::goal: return p.r_goal;
    case Terminal::collision:
    case Terminal::boundary: return p.r_fail;
    case Terminal::timeout: return p.r_timeout;
    case Terminal::none: break;
    }
    return p.beta1 * (prev.goal_dist - now.goal_dist) +
           std::exp(p.beta2 * (prev.obstacle_dist - now.obstacle_dist)) +
           p.beta3 * std::sin(now.alpha) - p.step_penalty;
}

std::vector<Cell> diagonal_block_cells(const GridSpec &spec) {
    const int run = spec.size / 4;
    if (run <= 0) return {};
    const int dx = spec.goal.x - spec.start.x;
    const int dy = spec.goal.y - spec.start.y;
    const int steps = std::max(std::abs(dx), std::abs(dy));
    std::vector<Cell> cells;
    const int mid = steps / 2;
    int first = mid - (run - 1) / 2;
    for (int j = 0; j < run; ++j) {
        const int i = std::clamp(first + j, 0, steps);
        Cell c{spec.start.x + static_cast<int>(std::lround(double(i) * dx / steps)),
               spec.start.y + static_cast<int>(std::lround(double(i) * dy / steps))};
        if (c == spec.start || c == spec.goal) continue;
        if (!cells.empty() && cells.back() == c) continue;
        cells.push_back(c);
    }
    return cells;
}

std::vector<Obstacle> sample_obstacles(const GridSpec &spec, Rng &rng) {
    spec.validate();
    std::vector<Obstacle> out;
    auto occupied = [&](Cell c) {
        if (c == spec.start || c == spec.goal) return true;
        for (const auto &o : out)
            if (o.cell == c) return true;
        return false;
    };

    // Static obstacles: points on the start->goal segment, jittered, so that
    // they frequently obstruct the direct diagonal route.
    for (int k = 0; k < spec.n_static; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double t = rng.uniform(0.2, 0.8);
            Cell c{static_cast<int>(std::lround(spec.start.x + t * (spec.goal.x - spec.start.x))),
                   static_cast<int>(std::lround(spec.start.y + t * (spec.goal.y - spec.start.y)))};
            c.x += static_cast<int>(rng.uniform_int(5)) - 2;
            c.y += static_cast<int>(rng.uniform_int(5)) - 2;
            c.x = std::clamp(c.x, 0, spec.size - 1);
            c.y = std::clamp(c.y, 0, spec.size - 1);
            if (occupied(c)) continue;
            out.push_back({c, false, {0, 0}});
            placed = true;
            break;
        }
        if (!placed) throw ConfigError("static obstacle placement failed after 1000 attempts");
    }

    if (spec.training_diagonal) {
        for (Cell c : diagonal_block_cells(spec))
            if (!occupied(c)) out.push_back({c, false, {0, 0}});
    }

    // Dynamic obstacles: uniform over the remaining free cells, random
    // cardinal direction.
    static const Cell kCardinal[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int k = 0; k < spec.n_dynamic; ++k) {
        std::vector<Cell> free;
        free.reserve(static_cast<std::size_t>(spec.size) * spec.size);
        for (int y = 0; y < spec.size; ++y)
            for (int x = 0; x < spec.size; ++x)
                if (!occupied({x, y})) free.push_back({x, y});
        if (free.empty()) throw ConfigError("no free cell left for dynamic obstacle");
        Cell c = free[rng.uniform_int(free.size())];
        Cell dir = kCardinal[rng.uniform_int(4)];
        out.push_back({c, true, dir});
    }
    return out;
}

GridWorld::GridWorld(GridSpec spec, RewardParams reward)
    : spec_(spec), reward_(reward) {
    spec_.validate();
    reward_.validate();
}

ObsState GridWorld::reset(std::uint64_t seed) {
    Rng rng(seed);
    obstacles_ = sample_obstacles(spec_, rng);
    pose_.cell = spec_.start;
    // Initial heading: aimed from start toward goal, rounded to the nearest pi/4.
    const double aim =
        std::atan2(double(spec_.goal.y - spec_.start.y), double(spec_.goal.x - spec_.start.x));
    int k = static_cast<int>(std::lround(aim / (kPi / 4.0)));
    pose_.octant = ((k % 8) + 8) % 8;
    steps_ = 0;
    terminal_ = Terminal::none;
    return observe();
}

void GridWorld::set_obstacles(std::vector<Obstacle> obstacles) {
    for (const Obstacle &o : obstacles)
        if (!spec_.inside(o.cell)) throw UsageError("obstacle outside the grid");
    obstacles_ = std::move(obstacles);
}

int GridWorld::nearest_obstacle() const {
    int best = -1;
    double best_d = 0.0;
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
        const double d = distance(obstacles_[i].cell, pose_.cell);
        if (best < 0 || d < best_d ||
            (d == best_d && (obstacles_[i].cell.x < obstacles_[best].cell.x ||
                             (obstacles_[i].cell.x == obstacles_[best].cell.x &&
                              obstacles_[i].cell.y < obstacles_[best].cell.y)))) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

Geometry GridWorld::geometry() const {
    Geometry g;
    g.goal_dist = distance(spec_.goal, pose_.cell);
    const int ni = nearest_obstacle();
    if (ni < 0) return g; // no obstacles: zero distances, alpha = 0
    const Cell o = obstacles_[ni].cell;
    g.obstacle_dist = distance(o, pose_.cell);
    const double tx = spec_.goal.x - pose_.cell.x, ty = spec_.goal.y - pose_.cell.y;
    const double ox = o.x - pose_.cell.x, oy = o.y - pose_.cell.y;
    const double nt = std::sqrt(tx * tx + ty * ty), no = std::sqrt(ox * ox + oy * oy);
    if (nt == 0.0 || no == 0.0) return g; // degenerate at reset: alpha defined as 0
    const double c = std::clamp((tx * ox + ty * oy) / (nt * no), -1.0, 1.0);
    g.alpha = std::acos(c);
    return g;
}

ObsState GridWorld::observe() const {
    ObsState s;
    const double heading = pose_.octant * (kPi / 4.0);
    s.target_region = angular_sector(
        std::atan2(double(spec_.goal.y - pose_.cell.y), double(spec_.goal.x - pose_.cell.x)),
        heading);
    const int ni = nearest_obstacle();
    if (ni >= 0) {
        const Cell o = obstacles_[ni].cell;
        s.obstacle_region = angular_sector(
            std::atan2(double(o.y - pose_.cell.y), double(o.x - pose_.cell.x)), heading);
        s.motion_dir = obstacles_[ni].dynamic ? motion_dir_code(obstacles_[ni].dir) : 0;
    }
    // alpha in [0, pi], 8 uniform half-open bins, last bin closed at pi
    const double alpha = geometry().alpha;
    s.angle_bin = std::min(7, static_cast<int>(alpha / (kPi / 8.0))) + 1;
    return s;
}

void GridWorld::advance_dynamics() {
    // Cells treated as blocked for this update: every obstacle's pre-update
    // cell plus the current cells of obstacles already moved. Checking the
    // pre-update cells makes two head-on obstacles both reverse instead of
    // passing through each other.
    std::set<std::pair<int, int>> blocked;
    for (const auto &o : obstacles_) blocked.insert({o.cell.x, o.cell.y});

    for (auto &o : obstacles_) {
        if (!o.dynamic) continue;
        auto is_free = [&](Cell c) {
            return spec_.inside(c) && blocked.count({c.x, c.y}) == 0;
        };
        Cell dest{o.cell.x + o.dir.x, o.cell.y + o.dir.y};
        if (!is_free(dest)) {
            o.dir = {-o.dir.x, -o.dir.y};
            Cell back{o.cell.x + o.dir.x, o.cell.y + o.dir.y};
            if (is_free(back)) {
                blocked.insert({back.x, back.y});
                o.cell = back;
            }
            // double-blocked: direction stays reversed, obstacle stays put
        } else {
            blocked.insert({dest.x, dest.y});
            o.cell = dest;
        }
    }
}

StepOutcome GridWorld::step(int action) {
    if (terminal_ != Terminal::none) throw UsageError("step() on a terminated episode");
    if (action < 0 || action >= kNumActions) throw UsageError("action out of range");

    const Geometry prev = geometry();

    pose_.octant = ((pose_.octant + (action - 2)) % 8 + 8) % 8;
    pose_.cell.x += kDx[pose_.octant];
    pose_.cell.y += kDy[pose_.octant];
    ++steps_;

    // Dynamic obstacles move at half the agent speed.
    if (steps_ % 2 == 0) advance_dynamics();

    terminal_ = Terminal::none;
    if (!spec_.inside(pose_.cell)) {
        terminal_ = Terminal::boundary;
    } else {
        for (const auto &o : obstacles_) {
            if (o.cell == pose_.cell) {
                terminal_ = Terminal::collision;
                break;
            }
        }
        if (terminal_ == Terminal::none && pose_.cell == spec_.goal) terminal_ = Terminal::goal;
        if (terminal_ == Terminal::none && steps_ >= kMaxSteps) terminal_ = Terminal::timeout;
    }

    StepOutcome out;
    out.terminal = terminal_;
    out.obs = (terminal_ == Terminal::boundary) ? ObsState{} : observe();
    out.reward = compute_reward(prev, (terminal_ == Terminal::boundary) ? prev : geometry(),
                                terminal_, reward_);
    return out;
}

} // namespace qspirl
