#pragma once

#include <utility>
#include <vector>

#include "prmrl/common.hpp"

namespace prmrl {

// Affine ODE  dpsi = (A psi + b) dk  attached to a machine mode. Every flow
// in the supported machine families is affine; nonlinear flows are out of
// scope.
struct FlowSpec {
    // Row-major dim x dim matrix; empty matrix means A = 0.
    std::vector<double> matrix;
    std::vector<double> offset;

    std::size_t dim() const { return offset.size(); }

    double a(std::size_t row, std::size_t col) const {
        return matrix.empty() ? 0.0 : matrix[row * dim() + col];
    }

    bool is_diagonal() const;

    // Entry-wise comparison; an empty matrix equals an explicit zero matrix.
    bool operator==(const FlowSpec& o) const {
        if (offset != o.offset) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                if (a(i, j) != o.a(i, j)) return false;
        return true;
    }

    static FlowSpec zero(std::size_t dim) {
        return FlowSpec{{}, std::vector<double>(dim, 0.0)};
    }
    static FlowSpec constant(std::vector<double> rates) { return FlowSpec{{}, std::move(rates)}; }
};

using Bounds = std::vector<std::pair<double, double>>;

// Advances psi by dt under the flow. Diagonal (including zero) matrices get
// the exact exponential solution; anything else falls back to fixed-step
// RK4 with 100 substeps. The result is clamped to `bounds` componentwise
// when bounds are given.
std::vector<double> flow_step(const FlowSpec& flow, const std::vector<double>& psi, double dt,
                              const Bounds* bounds = nullptr);

// RK4 path regardless of matrix shape, exposed for cross-checking the
// closed form. Same clamping rule.
std::vector<double> flow_step_rk4(const FlowSpec& flow, const std::vector<double>& psi, double dt,
                                  const Bounds* bounds = nullptr);

void clamp_to_bounds(std::vector<double>& psi, const Bounds& bounds);

}  // namespace prmrl
