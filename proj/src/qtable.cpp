#include "qspirl/qtable.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qspirl/agents.hpp"
#include "qspirl/errors.hpp"

namespace qspirl {

int state_index(const ObsState &obs) {
    if (!obs.valid()) throw UsageError("observation field out of range");
    return ((obs.obstacle_region - 1) * 5 + obs.motion_dir) * 64 + (obs.target_region - 1) * 8 +
           (obs.angle_bin - 1);
}

ObsState state_from_index(int index) {
    if (index < 0 || index >= kNumStates) throw UsageError("state index out of range");
    ObsState s;
    s.angle_bin = index % 8 + 1;
    s.target_region = (index / 8) % 8 + 1;
    s.motion_dir = (index / 64) % 5;
    s.obstacle_region = index / 320 + 1;
    return s;
}

QTable build_qtable(QFunction &agent, std::uint64_t conversion_seed, int shots) {
    QTable table;
    table.model_kind = agent_kind_name(agent.kind());
    table.conversion_seed = conversion_seed;
    const int previous_shots = agent.eval_shots();
    if (shots > 0 && !agent.set_eval_shots(shots))
        throw UsageError("shot mode applies only to quantum agents");
    for (int s = 0; s < kNumStates; ++s) {
        Rng rng = Rng::derive(conversion_seed, static_cast<std::uint64_t>(s));
        const QValues q = agent.q_values(state_from_index(s), rng);
        for (int a = 0; a < kNumActions; ++a) {
            const double v = q[a];
            if (!std::isfinite(v))
                throw TrainingError("non-finite action value at state " + std::to_string(s));
            table.values[static_cast<std::size_t>(s) * kNumActions + a] = static_cast<float>(v);
        }
    }
    if (shots > 0) agent.set_eval_shots(previous_shots);
    return table;
}

int greedy_action(std::span<const float> row) {
    int best = 0;
    for (int a = 1; a < static_cast<int>(row.size()); ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

int greedy(const QTable &table, const ObsState &obs) {
    return greedy_action(table.row(state_index(obs)));
}

namespace {

void format_float(std::string &out, float v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

std::string qtable_to_string(const QTable &table) {
    std::string out;
    out.reserve(64 * 1024);
    out += "qspirl-qtable v1 ";
    out += std::to_string(kNumStates);
    out += ' ';
    out += std::to_string(kNumActions);
    out += ' ';
    out += table.model_kind;
    out += ' ';
    out += std::to_string(table.conversion_seed);
    out += '\n';
    for (int s = 0; s < kNumStates; ++s) {
        for (int a = 0; a < kNumActions; ++a) {
            if (a) out += ' ';
            format_float(out, table.at(s, a));
        }
        out += '\n';
    }
    return out;
}

QTable qtable_from_string(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("qtable file: empty (line 1)");
    std::istringstream header(line);
    std::string magic, version;
    int rows = 0, cols = 0;
    QTable table;
    if (!(header >> magic >> version >> rows >> cols >> table.model_kind >>
          table.conversion_seed) ||
        magic != "qspirl-qtable" || version != "v1")
        throw ParseError("qtable file: bad header (line 1): " + line);
    if (rows != kNumStates || cols != kNumActions)
        throw ParseError("qtable file: dimension mismatch, expected 2560 5");
    for (int s = 0; s < rows; ++s) {
        if (!std::getline(in, line))
            throw ParseError("qtable file: truncated at line " + std::to_string(s + 2));
        const char *p = line.data();
        const char *end = line.data() + line.size();
        for (int a = 0; a < cols; ++a) {
            while (p < end && *p == ' ') ++p;
            float v = 0.0f;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc{})
                throw ParseError("qtable file: bad value at line " + std::to_string(s + 2));
            table.values[static_cast<std::size_t>(s) * cols + a] = v;
            p = res.ptr;
        }
        while (p < end && *p == ' ') ++p;
        if (p != end)
            throw ParseError("qtable file: trailing characters at line " + std::to_string(s + 2));
    }
    return table;
}

void save_qtable(const QTable &table, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    const std::string text = qtable_to_string(table);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ParseError("write failed: " + path);
}

QTable load_qtable(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return qtable_from_string(buf.str());
}

} // namespace qspirl
