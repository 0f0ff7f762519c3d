#pragma once

#include "prmrl/metrics.hpp"
#include "prmrl/mlp.hpp"
#include "prmrl/product.hpp"
#include "prmrl/shaping.hpp"

namespace prmrl {

// Ring buffer of experiences with oldest-first eviction and uniform
// with-replacement batch sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    }

    void push(Experience e);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Experience& sample(Rng& rng) const { return data_[rng.index(data_.size())]; }
    // Entry by age, 0 = oldest surviving element.
    const Experience& oldest(std::size_t i) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // insertion point once full
    std::vector<Experience> data_;
};

// Network input encoding: environment state scaled into [0,1] by its
// bounds, machine mode one-hot, machine psi scaled into [0,1].
class Featurizer {
public:
    Featurizer(const EnvModel& env, const PrmDefinition& prm);

    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_dim() const { return action_dim_; }

    std::vector<double> state(const std::vector<double>& x, const HybridState& rho) const;
    void write_state(const std::vector<double>& x, const HybridState& rho, double* out) const;

private:
    Bounds env_bounds_;
    const PrmDefinition* prm_;
    std::size_t state_dim_;
    std::size_t action_dim_;
};

struct DdpgParams {
    double lambda = 0.99;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double soft_update_rate = 1e-4;    // the iota of target <-iota online
    long target_update_period = 300;   // gradient steps between soft updates
    std::vector<std::size_t> hidden = {64, 64};
    std::size_t batch_scale = 128;     // mini-batch 128 h, capped below
    std::size_t batch_cap = 1024;
    std::size_t buffer_scale = 50000;  // capacity 50000 h
    double noise_sigma_frac = 0.1;     // exploration sigma per action half-width
    long warmup = 1000;                // buffer size before learning starts
    long max_training_steps = 20000;
    long episode_step_cap = 200;
    bool use_prme = false;
    bool use_shaping = false;
    std::size_t counterfactual_cap = 0;  // 0: all modes x 32
    double shaping_tol = 1e-6;
    long metric_window = 100;
    long checkpoint_every = 100;
};

struct DdpgSetup {
    const EnvModel* env = nullptr;
    AttachedMachine machine;
    const Discretization* disc = nullptr;
};

struct DdpgResult {
    Mlp actor;
    Mlp critic;
    MetricSeries metrics;
    long episodes = 0;
    long gradient_steps = 0;
    long buffer_inserts = 0;
    std::size_t replay_h = 1;
};

// Critic regression target: r plus the discounted target-critic value at
// the successor under the target actor, or bare r on terminal successors.
double critic_target(const Experience& e, const Mlp& actor_target, const Mlp& critic_target_net,
                     const Featurizer& feat, double lambda, bool terminal);

DdpgResult ddpg_train(const DdpgSetup& setup, const DdpgParams& params, std::uint64_t seed);

// Average raw reward per step of a fixed policy with episode resets;
// actor == nullptr plays uniform random actions from the box.
double policy_average_reward(const DdpgSetup& setup, const Mlp* actor, long steps,
                             long episode_step_cap, Rng& rng);

}  // namespace prmrl
