#pragma once

#include "prmrl/product.hpp"
#include "prmrl/shaping.hpp"

namespace prmrl {

// Exact enumeration of the office x discretized-machine product MDP. The
// office kernel is closed form (1/3 splits with wall bumps and stationary
// h/t cells) and the machine side is the induced finite machine, so value
// iteration here is an independent brute-force oracle for the learners.
class ProductOracle {
public:
    ProductOracle(const OfficeEnv& env, std::vector<AttachedMachine> machines,
                  std::vector<const Discretization*> discs, double lambda,
                  std::size_t state_limit = 2'000'000);

    std::size_t env_states() const { return n_env_; }
    std::size_t machine_states() const { return n_machine_; }
    std::size_t states() const { return n_env_ * n_machine_; }
    std::size_t actions() const { return n_actions_; }
    std::size_t state_of(std::size_t env_cell, std::size_t machine) const {
        return env_cell * n_machine_ + machine;
    }
    std::size_t initial_state() const;
    bool terminal(std::size_t state) const { return terminal_machine_[state % n_machine_]; }

    struct Successor {
        std::size_t state;
        double probability;
        double reward;         // averaged machine reward
        double shaped_reward;  // with per-machine potentials applied
    };
    const std::vector<Successor>& successors(std::size_t state, std::size_t action) const {
        return table_[state * n_actions_ + action];
    }

    // Exact value iteration; `shaped` switches the reward stream.
    std::vector<double> optimal_values(bool shaped = false, double tol = 1e-12) const;
    std::vector<double> q_values(const std::vector<double>& v, std::size_t state,
                                 bool shaped = false) const;
    // Greedy action sets at every state under the given values.
    std::vector<std::vector<std::size_t>> greedy_sets(const std::vector<double>& v,
                                                      bool shaped = false,
                                                      double tie_tol = 1e-9) const;
    // Exact evaluation of a deterministic policy (action index per state).
    std::vector<double> policy_values(const std::vector<std::size_t>& policy,
                                      double tol = 1e-12) const;

    double lambda() const { return lambda_; }

private:
    const OfficeEnv* env_;
    std::vector<AttachedMachine> machines_;
    std::vector<const Discretization*> discs_;
    double lambda_;
    std::size_t n_env_ = 0, n_machine_ = 0, n_actions_ = 0;
    std::vector<bool> terminal_machine_;
    std::vector<std::vector<Successor>> table_;
};

}  // namespace prmrl
