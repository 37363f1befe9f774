#include "qspirl/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qspirl/errors.hpp"

namespace qspirl {

namespace {

using nlohmann::json;

json spec_to_json(const GridSpec &s) {
    return json{{"g", s.size},
                {"n_static", s.n_static},
                {"n_dynamic", s.n_dynamic},
                {"training_diagonal", s.training_diagonal},
                {"start", {s.start.x, s.start.y}},
                {"goal", {s.goal.x, s.goal.y}},
                {"cell_size", s.cell_size}};
}

void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where) {
    for (const auto &item : j.items())
        if (!allowed.count(item.key()))
            throw ParseError("unknown key '" + item.key() + "' in " + where);
}

GridSpec spec_from_json(const json &j) {
    check_keys(j, {"g", "n_static", "n_dynamic", "training_diagonal", "start", "goal",
                   "cell_size"},
               "env");
    GridSpec s;
    s.size = j.at("g").get<int>();
    s.n_static = j.value("n_static", GridSpec{}.n_static);
    s.n_dynamic = j.value("n_dynamic", GridSpec{}.n_dynamic);
    s.training_diagonal = j.value("training_diagonal", false);
    if (j.contains("start")) {
        s.start = {j["start"].at(0).get<int>(), j["start"].at(1).get<int>()};
    }
    s.goal = {s.size - 1, s.size - 1};
    if (j.contains("goal")) {
        s.goal = {j["goal"].at(0).get<int>(), j["goal"].at(1).get<int>()};
    }
    s.cell_size = j.value("cell_size", 1.0);
    return s;
}

json reward_to_json(const RewardParams &r) {
    return json{{"beta1", r.beta1},
                {"beta2", r.beta2},
                {"beta3", r.beta3},
                {"step_penalty", r.step_penalty},
                {"r_goal", r.r_goal},
                {"r_fail", r.r_fail},
                {"r_timeout", r.r_timeout}};
}

RewardParams reward_from_json(const json &j, RewardParams r) {
    check_keys(j, {"beta1", "beta2", "beta3", "step_penalty", "r_goal", "r_fail", "r_timeout"},
               "reward");
    r.beta1 = j.value("beta1", r.beta1);
    r.beta2 = j.value("beta2", r.beta2);
    r.beta3 = j.value("beta3", r.beta3);
    r.step_penalty = j.value("step_penalty", r.step_penalty);
    r.r_goal = j.value("r_goal", r.r_goal);
    r.r_fail = j.value("r_fail", r.r_fail);
    r.r_timeout = j.value("r_timeout", r.r_timeout);
    return r;
}

json config_to_json(const TrainConfig &c) {
    return json{{"episodes", c.episodes},
                {"gamma", c.gamma},
                {"buffer_capacity", c.buffer_capacity},
                {"batch_size", c.batch_size},
                {"target_update", c.target_update},
                {"learning_start", c.learning_start},
                {"lr", c.lr},
                {"grad_clip", c.grad_clip},
                {"epsilon", c.epsilon},
                {"t0", c.t0},
                {"temp_decay", c.temp_decay},
                {"t_min", c.t_min},
                {"activation", activation_name(c.agent.activation)},
                {"f_max", c.agent.f_max},
                {"timesteps", c.agent.timesteps},
                {"dt", c.agent.dt},
                {"tau_mem", c.agent.tau_mem},
                {"tau_syn", c.agent.tau_syn},
                {"alpha_tab", c.agent.alpha_tab},
                {"epsilon_tab", c.agent.epsilon_tab},
                {"reward", reward_to_json(c.reward)}};
}

TrainConfig config_from_json(const json &j, TrainConfig c) {
    check_keys(j, {"episodes", "gamma", "buffer_capacity", "batch_size", "target_update",
                   "learning_start", "lr", "grad_clip", "epsilon", "t0", "temp_decay", "t_min",
                   "activation", "f_max", "timesteps", "dt", "tau_mem", "tau_syn", "alpha_tab",
                   "epsilon_tab", "reward"},
               "train config");
    c.episodes = j.value("episodes", c.episodes);
    c.gamma = j.value("gamma", c.gamma);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.target_update = j.value("target_update", c.target_update);
    c.learning_start = j.value("learning_start", c.learning_start);
    c.lr = j.value("lr", c.lr);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.t0 = j.value("t0", c.t0);
    c.temp_decay = j.value("temp_decay", c.temp_decay);
    c.t_min = j.value("t_min", c.t_min);
    if (j.contains("activation"))
        c.agent.activation = activation_from_name(j["activation"].get<std::string>());
    c.agent.f_max = j.value("f_max", c.agent.f_max);
    c.agent.timesteps = j.value("timesteps", c.agent.timesteps);
    c.agent.dt = j.value("dt", c.agent.dt);
    c.agent.tau_mem = j.value("tau_mem", c.agent.tau_mem);
    c.agent.tau_syn = j.value("tau_syn", c.agent.tau_syn);
    c.agent.alpha_tab = j.value("alpha_tab", c.agent.alpha_tab);
    c.agent.epsilon_tab = j.value("epsilon_tab", c.agent.epsilon_tab);
    if (j.contains("reward")) c.reward = reward_from_json(j["reward"], c.reward);
    return c;
}

json layer_to_json(const DenseLayer &l) {
    return json{{"rows", l.out},
                {"cols", l.in},
                {"activation", activation_name(l.act)},
                {"w", l.w},
                {"b", l.b}};
}

void layer_from_json(const json &j, DenseLayer &l) {
    if (j.at("rows").get<int>() != l.out || j.at("cols").get<int>() != l.in)
        throw ParseError("model layer shape mismatch");
    l.act = activation_from_name(j.at("activation").get<std::string>());
    const auto w = j.at("w").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (w.size() != l.w.size() || b.size() != l.b.size())
        throw ParseError("model layer parameter count mismatch");
    l.w = w;
    l.b = b;
}

std::vector<DenseLayer *> dense_layers_of(QFunction &agent) {
    switch (agent.kind()) {
    case AgentKind::mlp: {
        auto &a = static_cast<MlpAgent &>(agent);
        return {&a.layers[0], &a.layers[1], &a.layers[2]};
    }
    case AgentKind::snn: {
        auto &a = static_cast<SnnAgent &>(agent);
        return {&a.lin1, &a.lin2, &a.readout};
    }
    case AgentKind::qmlp: {
        auto &a = static_cast<QmlpAgent &>(agent);
        return {&a.pre[0], &a.pre[1], &a.post[0], &a.post[1]};
    }
    case AgentKind::qsnn: {
        auto &a = static_cast<QsnnAgent &>(agent);
        return {&a.lin1, &a.lin2, &a.post[0], &a.post[1]};
    }
    case AgentKind::qtable: break;
    }
    throw UsageError("tabular agents serialize in the qtable file format");
}

} // namespace

std::string model_to_string(const QFunction &agent, const GridSpec &spec,
                            const TrainConfig &config) {
    json j;
    j["format"] = "qspirl-model v1";
    j["kind"] = agent_kind_name(agent.kind());
    j["env"] = spec_to_json(spec);
    j["config"] = config_to_json(config);
    auto layers = dense_layers_of(const_cast<QFunction &>(agent));
    json jl = json::array();
    for (const DenseLayer *l : layers) jl.push_back(layer_to_json(*l));
    j["layers"] = jl;
    if (is_spiking(agent.kind()))
        j["lif"] = json{{"tau_mem", config.agent.tau_mem},
                        {"tau_syn", config.agent.tau_syn},
                        {"dt", config.agent.dt}};
    if (agent.kind() == AgentKind::qmlp) {
        const auto &a = static_cast<const QmlpAgent &>(agent);
        j["quantum"] = json{{"qubits", a.circuit.qubits}, {"layers", a.circuit.layers},
                            {"theta", a.theta}};
    } else if (agent.kind() == AgentKind::qsnn) {
        const auto &a = static_cast<const QsnnAgent &>(agent);
        j["quantum"] = json{{"qubits", a.circuit.qubits}, {"layers", a.circuit.layers},
                            {"theta", a.theta}};
    }
    return j.dump(2) + "\n";
}

void save_model(const QFunction &agent, const GridSpec &spec, const TrainConfig &config,
                const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    const std::string text = model_to_string(agent, spec, config);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

LoadedModel model_from_string(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    if (!j.contains("format") || j["format"].get<std::string>() != "qspirl-model v1")
        throw ParseError("model file: unsupported format version");

    LoadedModel loaded;
    loaded.spec = spec_from_json(j.at("env"));
    loaded.config = config_from_json(j.at("config"), TrainConfig{});
    const AgentKind kind = agent_kind_from_name(j.at("kind").get<std::string>());
    Rng dummy(0);
    loaded.agent = build_agent(kind, loaded.config.agent, dummy);

    auto layers = dense_layers_of(*loaded.agent);
    const json &jl = j.at("layers");
    if (jl.size() != layers.size()) throw ParseError("model file: layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) layer_from_json(jl[i], *layers[i]);

    if (is_quantum(kind)) {
        const json &q = j.at("quantum");
        const auto theta = q.at("theta").get<std::vector<double>>();
        CircuitSpec cs{q.at("qubits").get<int>(), q.at("layers").get<int>()};
        if (static_cast<int>(theta.size()) != cs.param_count())
            throw ParseError("model file: circuit parameter count mismatch");
        if (kind == AgentKind::qmlp) {
            auto &a = static_cast<QmlpAgent &>(*loaded.agent);
            a.circuit = cs;
            a.theta = theta;
        } else {
            auto &a = static_cast<QsnnAgent &>(*loaded.agent);
            a.circuit = cs;
            a.theta = theta;
        }
    }
    return loaded;
}

LoadedModel load_model(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_string(buf.str());
}

std::string config_digest(const GridSpec &spec, const TrainConfig &config) {
    const std::string doc = json{{"env", spec_to_json(spec)}, {"config", config_to_json(config)}}
                                .dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : doc) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_run_config(const std::string &json_text, GridSpec &spec, TrainConfig &config) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw ParseError(std::string("run config: ") + e.what());
    }
    check_keys(j, {"env", "train"}, "run config");
    if (j.contains("env")) spec = spec_from_json(j["env"]);
    if (j.contains("train")) config = config_from_json(j["train"], config);
}

} // namespace qspirl
