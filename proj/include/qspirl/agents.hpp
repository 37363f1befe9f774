#pragma once

#include <array>
#include <memory>
#include <string>

#include "qspirl/encoding.hpp"
#include "qspirl/gridworld.hpp"
#include "qspirl/neural.hpp"
#include "qspirl/quantum.hpp"
#include "qspirl/spiking.hpp"

namespace qspirl {

enum class AgentKind { qtable, mlp, snn, qmlp, qsnn };

AgentKind agent_kind_from_name(const std::string &name);
const char *agent_kind_name(AgentKind kind);
bool is_spiking(AgentKind kind);
bool is_quantum(AgentKind kind);

/// Architecture and temporal hyperparameters an agent is built from.
struct AgentConfig {
    Activation activation = Activation::relu;
    // spiking
    double f_max = 100.0;
    int timesteps = 10;
    double dt = 0.2;
    double tau_mem = 0.02;
    double tau_syn = 0.01;
    // tabular
    double alpha_tab = 0.1;
    double epsilon_tab = 0.1;

    LIFParams lif() const { return LIFParams{tau_mem, tau_syn, dt, 1.0, 0.0}; }
};

using QValues = std::array<double, kNumActions>;

/// Uniform action-value interface over the five agent families. Spiking
/// agents consume the rng for their Poisson encoding draw; the others
/// leave it untouched.
class QFunction {
  public:
    virtual ~QFunction() = default;

    virtual AgentKind kind() const = 0;
    virtual QValues q_values(const ObsState &obs, Rng &enc_rng) = 0;
    virtual int param_count() const = 0;
    virtual std::unique_ptr<QFunction> clone() const = 0;

    // Trainable parameter access; empty for the tabular agent.
    virtual std::vector<std::span<double>> param_blocks() { return {}; }
    virtual std::vector<std::span<double>> grad_blocks() { return {}; }
    virtual void zero_grad() {}

    /// Forward pass that records the tape consumed by backward_train.
    virtual QValues forward_train(const ObsState &obs, Rng &enc_rng) {
        return q_values(obs, enc_rng);
    }
    /// Accumulates parameter gradients for d(loss)/d(q_values).
    virtual void backward_train(const QValues &gout);

    /// Shot-sampled expectation mode for quantum agents at conversion time.
    /// Returns false for agents without a quantum layer.
    virtual bool set_eval_shots(int) { return false; }
    virtual int eval_shots() const { return 0; }
};

class TabularAgent final : public QFunction {
  public:
    explicit TabularAgent(const AgentConfig &config);

    AgentKind kind() const override { return AgentKind::qtable; }
    QValues q_values(const ObsState &obs, Rng &) override;
    int param_count() const override { return 0; } // no gradient-trained parameters
    std::unique_ptr<QFunction> clone() const override;

    /// One-step TD update: Q(s,a) += alpha * (r + gamma * max Q(s') * (1-terminal) - Q(s,a)).
    void td_update(const ObsState &s, int action, double reward, const ObsState &next,
                   bool terminal, double gamma);

    double alpha() const { return alpha_; }
    double epsilon() const { return epsilon_; }
    Vec &table() { return table_; }
    const Vec &table() const { return table_; }

  private:
    Vec table_; // kNumStates x kNumActions, zero-initialized
    double alpha_;
    double epsilon_;
};

class MlpAgent final : public QFunction {
  public:
    MlpAgent(const AgentConfig &config, Rng &rng);

    AgentKind kind() const override { return AgentKind::mlp; }
    QValues q_values(const ObsState &obs, Rng &) override;
    int param_count() const override;
    std::unique_ptr<QFunction> clone() const override;

    std::vector<std::span<double>> param_blocks() override;
    std::vector<std::span<double>> grad_blocks() override;
    void zero_grad() override;

    QValues forward_train(const ObsState &obs, Rng &) override;
    void backward_train(const QValues &gout) override;

    std::vector<DenseLayer> layers; // 29 -> 30 -> 30 -> 5

  private:
    StackTape tape_;
};

class SnnAgent final : public QFunction {
  public:
    SnnAgent(const AgentConfig &config, Rng &rng);

    AgentKind kind() const override { return AgentKind::snn; }
    QValues q_values(const ObsState &obs, Rng &enc_rng) override;
    int param_count() const override;
    std::unique_ptr<QFunction> clone() const override;

    std::vector<std::span<double>> param_blocks() override;
    std::vector<std::span<double>> grad_blocks() override;
    void zero_grad() override;

    QValues forward_train(const ObsState &obs, Rng &enc_rng) override;
    void backward_train(const QValues &gout) override;

    DenseLayer lin1;    // 29 -> 30, feeds LIF
    DenseLayer lin2;    // 30 -> 30, feeds LIF
    DenseLayer readout; // 30 -> 5, on the pooled rates
    AgentConfig config;

  private:
    struct Trace {
        std::vector<Vec> input_spikes;
        std::vector<Vec> s1;
        LIFTape lif1, lif2;
        Vec pooled;
    };
    Vec run(const ObsState &obs, Rng &enc_rng, Trace *trace);
    Trace trace_;
};

class QmlpAgent final : public QFunction {
  public:
    QmlpAgent(const AgentConfig &config, Rng &rng);

    AgentKind kind() const override { return AgentKind::qmlp; }
    QValues q_values(const ObsState &obs, Rng &rng) override;
    int param_count() const override;
    std::unique_ptr<QFunction> clone() const override;

    std::vector<std::span<double>> param_blocks() override;
    std::vector<std::span<double>> grad_blocks() override;
    void zero_grad() override;

    QValues forward_train(const ObsState &obs, Rng &) override;
    void backward_train(const QValues &gout) override;

    bool set_eval_shots(int shots) override;
    int eval_shots() const override { return shots_; }

    std::vector<DenseLayer> pre;  // 29 -> 35 -> 8
    std::vector<DenseLayer> post; // 8 -> 35 -> 5
    CircuitSpec circuit;
    Vec theta; // 144 variational angles
    Vec gtheta;

  private:
    StackTape pre_tape_, post_tape_;
    Vec latent_; // circuit input recorded by forward_train
    int shots_ = 0;
};

class QsnnAgent final : public QFunction {
  public:
    QsnnAgent(const AgentConfig &config, Rng &rng);

    AgentKind kind() const override { return AgentKind::qsnn; }
    QValues q_values(const ObsState &obs, Rng &enc_rng) override;
    int param_count() const override;
    std::unique_ptr<QFunction> clone() const override;

    std::vector<std::span<double>> param_blocks() override;
    std::vector<std::span<double>> grad_blocks() override;
    void zero_grad() override;

    QValues forward_train(const ObsState &obs, Rng &enc_rng) override;
    void backward_train(const QValues &gout) override;

    bool set_eval_shots(int shots) override;
    int eval_shots() const override { return shots_; }

    /// Pooled pre-quantum firing rates of the last forward pass; always in [0,1]^8.
    const Vec &last_rates() const { return trace_.pooled; }

    DenseLayer lin1; // 29 -> 35, feeds LIF
    DenseLayer lin2; // 35 -> 8, feeds LIF
    std::vector<DenseLayer> post; // 8 -> 35 -> 5
    CircuitSpec circuit;
    Vec theta;
    Vec gtheta;
    AgentConfig config;

  private:
    struct Trace {
        std::vector<Vec> input_spikes;
        std::vector<Vec> s1;
        LIFTape lif1, lif2;
        Vec pooled;
    };
    Vec rates(const ObsState &obs, Rng &enc_rng, Trace *trace);
    Trace trace_;
    StackTape post_tape_;
    int shots_ = 0;
};

/// Builds an agent of the requested family; parameter totals are checked at
/// construction (1985 for mlp/snn, 1977 for qmlp/qsnn).
std::unique_ptr<QFunction> build_agent(AgentKind kind, const AgentConfig &config, Rng &rng);

} // namespace qspirl
