#include "qspirl/render.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qspirl/errors.hpp"

namespace qspirl {

namespace {

constexpr double kCellPx = 20.0;
constexpr double kMargin = 10.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

struct Pt {
    double x, y;
};

} // namespace

ParsedTrajectory parse_trajectory(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# qspirl-trajectory v1", 0) != 0)
        throw ParseError("trajectory file: bad header (line 1)");

    ParsedTrajectory traj;
    std::istringstream header(line.substr(2));
    std::string token;
    header >> token >> token; // skip magic + version
    while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ParseError("trajectory file: bad header field");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "seed") traj.seed = std::stoull(value);
        else if (key == "g") traj.spec.size = std::stoi(value);
        else if (key == "static") traj.spec.n_static = std::stoi(value);
        else if (key == "dynamic") traj.spec.n_dynamic = std::stoi(value);
        else if (key == "diagonal") traj.spec.training_diagonal = value == "1";
        else if (key == "cell") traj.spec.cell_size = std::stod(value);
        else if (key == "outcome") traj.outcome = value;
        else if (key == "start" || key == "goal") {
            const auto comma = value.find(',');
            if (comma == std::string::npos) throw ParseError("trajectory file: bad cell field");
            const Cell c{std::stoi(value.substr(0, comma)), std::stoi(value.substr(comma + 1))};
            (key == "start" ? traj.spec.start : traj.spec.goal) = c;
        } else {
            throw ParseError("trajectory file: unknown header field '" + key + "'");
        }
    }

    if (!std::getline(in, line)) throw ParseError("trajectory file: missing column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int step, x, y, action;
        double heading;
        if (!(row >> step >> x >> y >> heading >> action))
            throw ParseError("trajectory file: bad row: " + line);
        traj.cells.push_back({x, y});
        if (action >= 0) traj.actions.push_back(action);
    }
    if (traj.cells.empty()) throw ParseError("trajectory file: no poses");
    return traj;
}

std::string render_svg(const ParsedTrajectory &trajectory) {
    const GridSpec &spec = trajectory.spec;
    const int g = spec.size;
    const double side = g * kCellPx + 2 * kMargin;
    auto center = [&](Cell c) {
        return Pt{kMargin + (c.x + 0.5) * kCellPx, kMargin + (g - 1 - c.y + 0.5) * kCellPx};
    };
    auto corner = [&](Cell c) {
        return Pt{kMargin + c.x * kCellPx, kMargin + (g - 1 - c.y) * kCellPx};
    };

    // Replay the episode to recover static cells and dynamic obstacle motion.
    GridWorld env(spec, RewardParams{});
    env.reset(trajectory.seed);
    std::vector<Cell> statics;
    std::vector<std::vector<Cell>> dyn_traces;
    for (const Obstacle &o : env.obstacles()) {
        if (o.dynamic)
            dyn_traces.push_back({o.cell});
        else
            statics.push_back(o.cell);
    }
    for (int action : trajectory.actions) {
        if (env.done()) break;
        env.step(action);
        std::size_t d = 0;
        for (const Obstacle &o : env.obstacles()) {
            if (!o.dynamic) continue;
            if (dyn_traces[d].back() != o.cell) dyn_traces[d].push_back(o.cell);
            ++d;
        }
    }

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(side) + "\" height=\"" +
           fmt(side) + "\" viewBox=\"0 0 " + fmt(side) + " " + fmt(side) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // static obstacles as dark cells
    for (Cell c : statics) {
        const Pt p = corner(c);
        svg += "<rect x=\"" + fmt(p.x) + "\" y=\"" + fmt(p.y) + "\" width=\"" + fmt(kCellPx) +
               "\" height=\"" + fmt(kCellPx) + "\" fill=\"#333333\"/>\n";
    }

    // grid lines
    for (int i = 0; i <= g; ++i) {
        const double v = kMargin + i * kCellPx;
        svg += "<line x1=\"" + fmt(kMargin) + "\" y1=\"" + fmt(v) + "\" x2=\"" +
               fmt(kMargin + g * kCellPx) + "\" y2=\"" + fmt(v) +
               "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
        svg += "<line x1=\"" + fmt(v) + "\" y1=\"" + fmt(kMargin) + "\" x2=\"" + fmt(v) +
               "\" y2=\"" + fmt(kMargin + g * kCellPx) +
               "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    }

    // dynamic obstacle motion as dashed traces
    for (const auto &trace : dyn_traces) {
        std::string points;
        for (Cell c : trace) {
            const Pt p = center(c);
            points += fmt(p.x) + "," + fmt(p.y) + " ";
        }
        svg += "<polyline points=\"" + points +
               "\" fill=\"none\" stroke=\"#cc6600\" stroke-width=\"2\" "
               "stroke-dasharray=\"4,3\"/>\n";
        const Pt last = center(trace.back());
        svg += "<circle cx=\"" + fmt(last.x) + "\" cy=\"" + fmt(last.y) +
               "\" r=\"4\" fill=\"#cc6600\"/>\n";
    }

    // agent path
    std::string path_points;
    for (Cell c : trajectory.cells) {
        const Pt p = center(c);
        path_points += fmt(p.x) + "," + fmt(p.y) + " ";
    }
    svg += "<polyline points=\"" + path_points +
           "\" fill=\"none\" stroke=\"#1a66cc\" stroke-width=\"2\"/>\n";

    // start and goal markers
    const Pt s = center(spec.start), t = center(spec.goal);
    svg += "<circle cx=\"" + fmt(s.x) + "\" cy=\"" + fmt(s.y) +
           "\" r=\"5\" fill=\"#2a9d3a\"/>\n";
    svg += "<rect x=\"" + fmt(t.x - 5) + "\" y=\"" + fmt(t.y - 5) +
           "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\"#cc2222\" "
           "stroke-width=\"2\"/>\n";
    svg += "</svg>\n";
    return svg;
}

void render_trajectory_file(const std::string &trajectory_path, const std::string &svg_path) {
    std::ifstream in(trajectory_path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + trajectory_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string svg = render_svg(parse_trajectory(buf.str()));
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + svg_path);
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
}

} // namespace qspirl
