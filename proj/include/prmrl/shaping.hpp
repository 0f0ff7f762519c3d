#pragma once

#include <string>

#include "prmrl/discretize.hpp"

namespace prmrl {

// Optimal value of the discretized machine played as its own MDP (labels as
// actions), with the shaping potential read off as Phi = -V*. Terminal
// states keep value zero and potential zero.
class PotentialTable {
public:
    PotentialTable(std::vector<double> values, double lambda, double residual)
        : values_(std::move(values)), lambda_(lambda), residual_(residual) {}

    double value(std::size_t id) const { return values_.at(id); }
    double potential(std::size_t id) const { return -values_.at(id); }
    double lambda() const { return lambda_; }
    double residual() const { return residual_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    double lambda_;
    double residual_;
};

struct ValueIterationOptions {
    double tol = 1e-6;
};

// Value iteration over the discretized machine with the exact stopping rule
// err >= ((1 - lambda) / lambda) * tol. Guards that reference k are
// evaluated at k = 0; the discrete machine is treated as stationary.
PotentialTable value_iteration(const Discretization& disc, double lambda,
                               const ValueIterationOptions& opts = {});

// Potential-based shaping of one machine transition.
inline double shaped_reward(double reward, std::size_t from_id, std::size_t to_id,
                            const PotentialTable& table) {
    return reward - table.lambda() * table.potential(to_id) + table.potential(from_id);
}

// CSV dump of the potential per discretized state: id, mode, cell center, value.
std::string potential_csv(const Discretization& disc, const PotentialTable& table);

}  // namespace prmrl
