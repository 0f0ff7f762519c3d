#include "prmrl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prmrl {

namespace {

void check_inputs(const FlowSpec& flow, const std::vector<double>& psi, double dt) {
    if (flow.dim() != psi.size())
        throw DefinitionError("flow dimension " + std::to_string(flow.dim()) +
                              " does not match psi dimension " + std::to_string(psi.size()));
    if (!flow.matrix.empty() && flow.matrix.size() != flow.dim() * flow.dim())
        throw DefinitionError("flow matrix is not dim x dim");
    if (dt <= 0.0) throw DefinitionError("flow_step requires dt > 0");
    for (double v : psi)
        if (!std::isfinite(v)) throw NumericError("non-finite psi entering flow_step");
}

// dy/dt = A y + b
void derivative(const FlowSpec& flow, const std::vector<double>& y, std::vector<double>& out) {
    const std::size_t n = flow.dim();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = flow.offset[i];
        if (!flow.matrix.empty())
            for (std::size_t j = 0; j < n; ++j) acc += flow.matrix[i * n + j] * y[j];
        out[i] = acc;
    }
}

}  // namespace

bool FlowSpec::is_diagonal() const {
    if (matrix.empty()) return true;
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && matrix[i * n + j] != 0.0) return false;
    return true;
}

void clamp_to_bounds(std::vector<double>& psi, const Bounds& bounds) {
    for (std::size_t i = 0; i < psi.size() && i < bounds.size(); ++i)
        psi[i] = std::clamp(psi[i], bounds[i].first, bounds[i].second);
}

std::vector<double> flow_step(const FlowSpec& flow, const std::vector<double>& psi, double dt,
                              const Bounds* bounds) {
    check_inputs(flow, psi, dt);
    std::vector<double> out(psi.size());
    if (flow.is_diagonal()) {
        // Per-dimension scalar affine ODE: psi' = a psi + b has the exact
        // solution e^{a dt} psi + (b/a)(e^{a dt} - 1), degenerating to
        // psi + b dt when a = 0.
        const std::size_t n = flow.dim();
        for (std::size_t i = 0; i < n; ++i) {
            const double a = flow.a(i, i);
            const double b = flow.offset[i];
            if (a == 0.0) {
                out[i] = psi[i] + b * dt;
            } else {
                const double e = std::exp(a * dt);
                out[i] = e * psi[i] + (b / a) * (e - 1.0);
            }
        }
        if (bounds) clamp_to_bounds(out, *bounds);
        return out;
    }
    return flow_step_rk4(flow, psi, dt, bounds);
}

std::vector<double> flow_step_rk4(const FlowSpec& flow, const std::vector<double>& psi, double dt,
                                  const Bounds* bounds) {
    check_inputs(flow, psi, dt);
    constexpr int kSubsteps = 100;
    const double h = dt / kSubsteps;
    const std::size_t n = flow.dim();

    std::vector<double> y = psi;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int s = 0; s < kSubsteps; ++s) {
        derivative(flow, y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        derivative(flow, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        derivative(flow, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        derivative(flow, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (bounds) clamp_to_bounds(y, *bounds);
    return y;
}

}  // namespace prmrl
