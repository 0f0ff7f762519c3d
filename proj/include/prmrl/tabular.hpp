#pragma once

#include <memory>

#include "prmrl/metrics.hpp"
#include "prmrl/product.hpp"
#include "prmrl/shaping.hpp"

namespace prmrl {

// Maps environment states to dense indices: directly for enumerable
// environments, through a box grid otherwise.
class EnvIndexer {
public:
    EnvIndexer(const EnvModel& env, const std::vector<double>& grid_widths = {});

    std::size_t count() const { return count_; }
    std::size_t index(const std::vector<double>& x) const;

private:
    const EnvModel* env_;
    bool enumerable_;
    Bounds bounds_;
    std::vector<double> widths_;
    std::vector<std::size_t> cells_;
    std::size_t count_;
};

class QTable {
public:
    QTable(std::size_t env_states, std::size_t machine_states, std::size_t actions, double init);

    double get(std::size_t e, std::size_t m, std::size_t a) const { return q_[offset(e, m, a)]; }
    void set(std::size_t e, std::size_t m, std::size_t a, double v) { q_[offset(e, m, a)] = v; }
    std::uint32_t visits(std::size_t e, std::size_t m, std::size_t a) const {
        return visits_[offset(e, m, a)];
    }

    double max_value(std::size_t e, std::size_t m) const;
    std::vector<std::size_t> argmax_set(std::size_t e, std::size_t m, double tie_tol = 0.0) const;

    // Bellman update, a "<-kappa" b style: terminal successors back up the
    // bare reward.
    void update(std::size_t e, std::size_t m, std::size_t a, double reward, std::size_t e_next,
                std::size_t m_next, bool terminal, double kappa, double lambda);

    std::size_t env_states() const { return env_states_; }
    std::size_t machine_states() const { return machine_states_; }
    std::size_t actions() const { return actions_; }

private:
    std::size_t offset(std::size_t e, std::size_t m, std::size_t a) const {
        return (e * machine_states_ + m) * actions_ + a;
    }
    std::size_t env_states_, machine_states_, actions_;
    std::vector<double> q_;
    std::vector<std::uint32_t> visits_;
};

std::size_t epsilon_greedy(const QTable& q, std::size_t e, std::size_t m, double epsilon,
                           Rng& rng);

struct TabularParams {
    double lambda = 0.9;
    double kappa = 0.5;
    double epsilon = 0.1;
    double optimistic_init = 2.0;
    long max_training_steps = 50000;
    long episode_step_cap = 1000;
    bool use_prme = false;
    bool use_shaping = false;
    std::size_t counterfactual_cap = 0;  // 0: all modes x 32 samples
    double shaping_tol = 1e-6;
    long metric_window = 100;
    long checkpoint_every = 100;
    long policy_snapshot_every = 0;  // 0: only metrics, no greedy snapshots
};

struct TabularSetup {
    const EnvModel* env = nullptr;
    std::vector<AttachedMachine> machines;
    std::vector<const Discretization*> discs;
    std::vector<double> env_grid;  // grid widths for non-enumerable environments
};

struct PolicySnapshot {
    long step = 0;
    std::vector<std::uint8_t> actions;  // greedy action per (env state, machine state)
};

struct TabularResult {
    std::unique_ptr<QTable> q;
    MetricSeries metrics;
    std::vector<PolicySnapshot> snapshots;
    long episodes = 0;
    long updates = 0;
    std::vector<std::size_t> machine_sizes;
};

// Joint index over the attached machines' discretized states.
std::size_t joint_machine_index(const std::vector<const Discretization*>& discs,
                                const std::vector<HybridState>& states);

TabularResult train_tabular(const TabularSetup& setup, const TabularParams& params,
                            std::uint64_t seed);

}  // namespace prmrl
