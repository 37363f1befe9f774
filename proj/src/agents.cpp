#include "qspirl/agents.hpp"

#include <algorithm>

#include "qspirl/errors.hpp"
#include "qspirl/qtable.hpp"

namespace qspirl {

namespace {

constexpr int kClassicalHidden = 30;
constexpr int kQuantumHidden = 35;
constexpr int kQubits = 8;
constexpr int kLayers = 3;
constexpr int kMlpParams = 1985;
constexpr int kHybridParams = 1977;
constexpr double kSpikingGain = 4.0; // init gain for layers that drive LIF cells

QValues to_qvalues(const Vec &v) {
    QValues q{};
    for (int a = 0; a < kNumActions; ++a) q[a] = v[a];
    return q;
}

Vec init_theta(int count, Rng &rng) {
    Vec theta(count);
    for (double &t : theta) t = rng.uniform(-0.1, 0.1);
    return theta;
}

void check_param_count(const QFunction &agent, int expected) {
    if (agent.param_count() != expected)
        throw ConfigError(std::string(agent_kind_name(agent.kind())) + " parameter count " +
                          std::to_string(agent.param_count()) + ", expected " +
                          std::to_string(expected));
}

} // namespace

AgentKind agent_kind_from_name(const std::string &name) {
    if (name == "qtable" || name == "tabular") return AgentKind::qtable;
    if (name == "mlp") return AgentKind::mlp;
    if (name == "snn") return AgentKind::snn;
    if (name == "qmlp") return AgentKind::qmlp;
    if (name == "qsnn") return AgentKind::qsnn;
    throw UsageError("unknown agent kind: " + name);
}

const char *agent_kind_name(AgentKind kind) {
    switch (kind) {
    case AgentKind::qtable: return "qtable";
    case AgentKind::mlp: return "mlp";
    case AgentKind::snn: return "snn";
    case AgentKind::qmlp: return "qmlp";
    case AgentKind::qsnn: return "qsnn";
    }
    return "?";
}

bool is_spiking(AgentKind kind) { return kind == AgentKind::snn || kind == AgentKind::qsnn; }
bool is_quantum(AgentKind kind) { return kind == AgentKind::qmlp || kind == AgentKind::qsnn; }

void QFunction::backward_train(const QValues &) {
    throw UsageError("agent has no gradient-based training path");
}

// ---------------------------------------------------------------- tabular

TabularAgent::TabularAgent(const AgentConfig &config)
    : table_(static_cast<std::size_t>(kNumStates) * kNumActions, 0.0),
      alpha_(config.alpha_tab), epsilon_(config.epsilon_tab) {}

QValues TabularAgent::q_values(const ObsState &obs, Rng &) {
    const std::size_t base = static_cast<std::size_t>(state_index(obs)) * kNumActions;
    QValues q{};
    for (int a = 0; a < kNumActions; ++a) q[a] = table_[base + a];
    return q;
}

std::unique_ptr<QFunction> TabularAgent::clone() const {
    return std::make_unique<TabularAgent>(*this);
}

void TabularAgent::td_update(const ObsState &s, int action, double reward, const ObsState &next,
                             bool terminal, double gamma) {
    const std::size_t base = static_cast<std::size_t>(state_index(s)) * kNumActions;
    double bootstrap = 0.0;
    if (!terminal) {
        const std::size_t nbase = static_cast<std::size_t>(state_index(next)) * kNumActions;
        bootstrap = table_[nbase];
        for (int a = 1; a < kNumActions; ++a) bootstrap = std::max(bootstrap, table_[nbase + a]);
    }
    const double target = reward + gamma * bootstrap;
    table_[base + action] += alpha_ * (target - table_[base + action]);
}

// ---------------------------------------------------------------- MLP

MlpAgent::MlpAgent(const AgentConfig &config, Rng &rng) {
    layers.emplace_back(kInputDim, kClassicalHidden, config.activation);
    layers.emplace_back(kClassicalHidden, kClassicalHidden, config.activation);
    layers.emplace_back(kClassicalHidden, kNumActions, Activation::identity);
    for (auto &l : layers) l.init_xavier(rng);
    check_param_count(*this, kMlpParams);
}

QValues MlpAgent::q_values(const ObsState &obs, Rng &) {
    const OneHotVec x = one_hot(obs);
    return to_qvalues(stack_forward(layers, Vec(x.begin(), x.end()), nullptr));
}

int MlpAgent::param_count() const {
    int n = 0;
    for (const auto &l : layers) n += l.param_count();
    return n;
}

std::unique_ptr<QFunction> MlpAgent::clone() const { return std::make_unique<MlpAgent>(*this); }

std::vector<std::span<double>> MlpAgent::param_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto &l : layers) {
        blocks.emplace_back(l.w);
        blocks.emplace_back(l.b);
    }
    return blocks;
}

std::vector<std::span<double>> MlpAgent::grad_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto &l : layers) {
        blocks.emplace_back(l.gw);
        blocks.emplace_back(l.gb);
    }
    return blocks;
}

void MlpAgent::zero_grad() {
    for (auto &l : layers) l.zero_grad();
}

QValues MlpAgent::forward_train(const ObsState &obs, Rng &) {
    const OneHotVec x = one_hot(obs);
    return to_qvalues(stack_forward(layers, Vec(x.begin(), x.end()), &tape_));
}

void MlpAgent::backward_train(const QValues &gout) {
    stack_backward(layers, tape_, Vec(gout.begin(), gout.end()));
}

// ---------------------------------------------------------------- SNN

SnnAgent::SnnAgent(const AgentConfig &cfg, Rng &rng)
    : lin1(kInputDim, kClassicalHidden, Activation::identity),
      lin2(kClassicalHidden, kClassicalHidden, Activation::identity),
      readout(kClassicalHidden, kNumActions, Activation::identity), config(cfg) {
    config.lif().validate();
    lin1.init_xavier(rng, kSpikingGain);
    lin2.init_xavier(rng, kSpikingGain);
    readout.init_xavier(rng);
    check_param_count(*this, kMlpParams);
}

Vec SnnAgent::run(const ObsState &obs, Rng &enc_rng, Trace *trace) {
    const OneHotVec x = one_hot(obs);
    const SpikeTrain train =
        poisson_encode(x, config.f_max, config.timesteps, config.dt, enc_rng);
    const LIFParams lif = config.lif();

    std::vector<Vec> in_rows(train.timesteps);
    std::vector<Vec> u1(train.timesteps);
    for (int t = 0; t < train.timesteps; ++t) {
        in_rows[t].assign(train.spikes.begin() + static_cast<std::ptrdiff_t>(t) * kInputDim,
                          train.spikes.begin() + static_cast<std::ptrdiff_t>(t + 1) * kInputDim);
        u1[t] = lin1.affine(in_rows[t]);
    }
    std::vector<Vec> s1 = lif_forward(u1, lif, trace ? &trace->lif1 : nullptr);
    std::vector<Vec> u2(train.timesteps);
    for (int t = 0; t < train.timesteps; ++t) u2[t] = lin2.affine(s1[t]);
    std::vector<Vec> s2 = lif_forward(u2, lif, trace ? &trace->lif2 : nullptr);
    Vec pooled = mean_pool(s2);
    if (trace) {
        trace->input_spikes = std::move(in_rows);
        trace->s1 = std::move(s1);
        trace->pooled = pooled;
    }
    return readout.affine(pooled);
}

QValues SnnAgent::q_values(const ObsState &obs, Rng &enc_rng) {
    return to_qvalues(run(obs, enc_rng, nullptr));
}

int SnnAgent::param_count() const {
    return lin1.param_count() + lin2.param_count() + readout.param_count();
}

std::unique_ptr<QFunction> SnnAgent::clone() const { return std::make_unique<SnnAgent>(*this); }

std::vector<std::span<double>> SnnAgent::param_blocks() {
    return {lin1.w, lin1.b, lin2.w, lin2.b, readout.w, readout.b};
}

std::vector<std::span<double>> SnnAgent::grad_blocks() {
    return {lin1.gw, lin1.gb, lin2.gw, lin2.gb, readout.gw, readout.gb};
}

void SnnAgent::zero_grad() {
    lin1.zero_grad();
    lin2.zero_grad();
    readout.zero_grad();
}

QValues SnnAgent::forward_train(const ObsState &obs, Rng &enc_rng) {
    return to_qvalues(run(obs, enc_rng, &trace_));
}

void SnnAgent::backward_train(const QValues &gout) {
    const int T = config.timesteps;
    const LIFParams lif = config.lif();
    Vec gpooled = readout.backward_pre(trace_.pooled, Vec(gout.begin(), gout.end()));
    std::vector<Vec> gs2 = mean_pool_backward(gpooled, T);
    std::vector<Vec> gu2 = lif_backward(trace_.lif2, gs2, lif);
    std::vector<Vec> gs1(T);
    for (int t = 0; t < T; ++t) gs1[t] = lin2.backward_pre(trace_.s1[t], gu2[t]);
    std::vector<Vec> gu1 = lif_backward(trace_.lif1, gs1, lif);
    for (int t = 0; t < T; ++t) lin1.backward_pre(trace_.input_spikes[t], gu1[t]);
}

// ---------------------------------------------------------------- QMLP

QmlpAgent::QmlpAgent(const AgentConfig &config, Rng &rng) {
    pre.emplace_back(kInputDim, kQuantumHidden, config.activation);
    pre.emplace_back(kQuantumHidden, kQubits, config.activation);
    post.emplace_back(kQubits, kQuantumHidden, config.activation);
    post.emplace_back(kQuantumHidden, kNumActions, Activation::identity);
    for (auto &l : pre) l.init_xavier(rng);
    for (auto &l : post) l.init_xavier(rng);
    circuit = CircuitSpec{kQubits, kLayers};
    theta = init_theta(circuit.param_count(), rng);
    gtheta.assign(theta.size(), 0.0);
    check_param_count(*this, kHybridParams);
}

QValues QmlpAgent::q_values(const ObsState &obs, Rng &rng) {
    const OneHotVec x = one_hot(obs);
    Vec latent = stack_forward(pre, Vec(x.begin(), x.end()), nullptr);
    Vec z = shots_ > 0 ? sampled_expectation(circuit, latent, theta, shots_, rng)
                       : run_circuit(circuit, latent, theta);
    return to_qvalues(stack_forward(post, z, nullptr));
}

int QmlpAgent::param_count() const {
    int n = static_cast<int>(theta.size());
    for (const auto &l : pre) n += l.param_count();
    for (const auto &l : post) n += l.param_count();
    return n;
}

std::unique_ptr<QFunction> QmlpAgent::clone() const { return std::make_unique<QmlpAgent>(*this); }

std::vector<std::span<double>> QmlpAgent::param_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto &l : pre) {
        blocks.emplace_back(l.w);
        blocks.emplace_back(l.b);
    }
    blocks.emplace_back(theta);
    for (auto &l : post) {
        blocks.emplace_back(l.w);
        blocks.emplace_back(l.b);
    }
    return blocks;
}

std::vector<std::span<double>> QmlpAgent::grad_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto &l : pre) {
        blocks.emplace_back(l.gw);
        blocks.emplace_back(l.gb);
    }
    blocks.emplace_back(gtheta);
    for (auto &l : post) {
        blocks.emplace_back(l.gw);
        blocks.emplace_back(l.gb);
    }
    return blocks;
}

void QmlpAgent::zero_grad() {
    for (auto &l : pre) l.zero_grad();
    for (auto &l : post) l.zero_grad();
    std::fill(gtheta.begin(), gtheta.end(), 0.0);
}

QValues QmlpAgent::forward_train(const ObsState &obs, Rng &) {
    if (shots_ > 0) throw UsageError("shot mode is evaluation-only");
    const OneHotVec x = one_hot(obs);
    latent_ = stack_forward(pre, Vec(x.begin(), x.end()), &pre_tape_);
    Vec z = run_circuit(circuit, latent_, theta);
    return to_qvalues(stack_forward(post, z, &post_tape_));
}

void QmlpAgent::backward_train(const QValues &gout) {
    Vec gz = stack_backward(post, post_tape_, Vec(gout.begin(), gout.end()));
    CircuitGrad cg = parameter_shift_grad(circuit, latent_, theta, gz);
    for (std::size_t k = 0; k < gtheta.size(); ++k) gtheta[k] += cg.dtheta[k];
    stack_backward(pre, pre_tape_, cg.dx);
}

bool QmlpAgent::set_eval_shots(int shots) {
    if (shots < 0) throw UsageError("negative shot count");
    shots_ = shots;
    return true;
}

// ---------------------------------------------------------------- QSNN

QsnnAgent::QsnnAgent(const AgentConfig &cfg, Rng &rng)
    : lin1(kInputDim, kQuantumHidden, Activation::identity),
      lin2(kQuantumHidden, kQubits, Activation::identity), config(cfg) {
    config.lif().validate();
    post.emplace_back(kQubits, kQuantumHidden, cfg.activation);
    post.emplace_back(kQuantumHidden, kNumActions, Activation::identity);
    lin1.init_xavier(rng, kSpikingGain);
    lin2.init_xavier(rng, kSpikingGain);
    for (auto &l : post) l.init_xavier(rng);
    circuit = CircuitSpec{kQubits, kLayers};
    theta = init_theta(circuit.param_count(), rng);
    gtheta.assign(theta.size(), 0.0);
    check_param_count(*this, kHybridParams);
}

Vec QsnnAgent::rates(const ObsState &obs, Rng &enc_rng, Trace *trace) {
    const OneHotVec x = one_hot(obs);
    const SpikeTrain train =
        poisson_encode(x, config.f_max, config.timesteps, config.dt, enc_rng);
    const LIFParams lif = config.lif();

    std::vector<Vec> in_rows(train.timesteps);
    std::vector<Vec> u1(train.timesteps);
    for (int t = 0; t < train.timesteps; ++t) {
        in_rows[t].assign(train.spikes.begin() + static_cast<std::ptrdiff_t>(t) * kInputDim,
                          train.spikes.begin() + static_cast<std::ptrdiff_t>(t + 1) * kInputDim);
        u1[t] = lin1.affine(in_rows[t]);
    }
    std::vector<Vec> s1 = lif_forward(u1, lif, trace ? &trace->lif1 : nullptr);
    std::vector<Vec> u2(train.timesteps);
    for (int t = 0; t < train.timesteps; ++t) u2[t] = lin2.affine(s1[t]);
    std::vector<Vec> s2 = lif_forward(u2, lif, trace ? &trace->lif2 : nullptr);
    Vec pooled = mean_pool(s2); // rates of binary spikes: always within [0,1]
    if (trace) {
        trace->input_spikes = std::move(in_rows);
        trace->s1 = std::move(s1);
        trace->pooled = pooled;
    }
    return pooled;
}

QValues QsnnAgent::q_values(const ObsState &obs, Rng &enc_rng) {
    Vec pooled = rates(obs, enc_rng, &trace_);
    Vec z = shots_ > 0 ? sampled_expectation(circuit, pooled, theta, shots_, enc_rng)
                       : run_circuit(circuit, pooled, theta);
    return to_qvalues(stack_forward(post, z, nullptr));
}

int QsnnAgent::param_count() const {
    int n = static_cast<int>(theta.size()) + lin1.param_count() + lin2.param_count();
    for (const auto &l : post) n += l.param_count();
    return n;
}

std::unique_ptr<QFunction> QsnnAgent::clone() const { return std::make_unique<QsnnAgent>(*this); }

std::vector<std::span<double>> QsnnAgent::param_blocks() {
    std::vector<std::span<double>> blocks{lin1.w, lin1.b, lin2.w, lin2.b};
    blocks.emplace_back(theta);
    for (auto &l : post) {
        blocks.emplace_back(l.w);
        blocks.emplace_back(l.b);
    }
    return blocks;
}

std::vector<std::span<double>> QsnnAgent::grad_blocks() {
    std::vector<std::span<double>> blocks{lin1.gw, lin1.gb, lin2.gw, lin2.gb};
    blocks.emplace_back(gtheta);
    for (auto &l : post) {
        blocks.emplace_back(l.gw);
        blocks.emplace_back(l.gb);
    }
    return blocks;
}

void QsnnAgent::zero_grad() {
    lin1.zero_grad();
    lin2.zero_grad();
    for (auto &l : post) l.zero_grad();
    std::fill(gtheta.begin(), gtheta.end(), 0.0);
}

QValues QsnnAgent::forward_train(const ObsState &obs, Rng &enc_rng) {
    if (shots_ > 0) throw UsageError("shot mode is evaluation-only");
    Vec pooled = rates(obs, enc_rng, &trace_);
    Vec z = run_circuit(circuit, pooled, theta);
    return to_qvalues(stack_forward(post, z, &post_tape_));
}

void QsnnAgent::backward_train(const QValues &gout) {
    const int T = config.timesteps;
    const LIFParams lif = config.lif();
    Vec gz = stack_backward(post, post_tape_, Vec(gout.begin(), gout.end()));
    CircuitGrad cg = parameter_shift_grad(circuit, trace_.pooled, theta, gz);
    for (std::size_t k = 0; k < gtheta.size(); ++k) gtheta[k] += cg.dtheta[k];
    std::vector<Vec> gs2 = mean_pool_backward(cg.dx, T);
    std::vector<Vec> gu2 = lif_backward(trace_.lif2, gs2, lif);
    std::vector<Vec> gs1(T);
    for (int t = 0; t < T; ++t) gs1[t] = lin2.backward_pre(trace_.s1[t], gu2[t]);
    std::vector<Vec> gu1 = lif_backward(trace_.lif1, gs1, lif);
    for (int t = 0; t < T; ++t) lin1.backward_pre(trace_.input_spikes[t], gu1[t]);
}

bool QsnnAgent::set_eval_shots(int shots) {
    if (shots < 0) throw UsageError("negative shot count");
    shots_ = shots;
    return true;
}

std::unique_ptr<QFunction> build_agent(AgentKind kind, const AgentConfig &config, Rng &rng) {
    switch (kind) {
    case AgentKind::qtable: return std::make_unique<TabularAgent>(config);
    case AgentKind::mlp: return std::make_unique<MlpAgent>(config, rng);
    case AgentKind::snn: return std::make_unique<SnnAgent>(config, rng);
    case AgentKind::qmlp: return std::make_unique<QmlpAgent>(config, rng);
    case AgentKind::qsnn: return std::make_unique<QsnnAgent>(config, rng);
    }
    throw UsageError("unknown agent kind");
}

} // namespace qspirl
