#include "prmrl/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prmrl {

Discretization::Discretization(const PrmDefinition& prm, std::vector<double> widths)
    : prm_(&prm), widths_(std::move(widths)) {
    const std::size_t dim = prm.psi_dim();
    if (widths_.size() != dim)
        throw ConfigError("discretization widths count != psi dimension");
    cells_.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        if (!(widths_[d] > 0.0)) throw ConfigError("non-positive discretization width");
        const auto [lo, hi] = prm.psi_bounds[d];
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw ConfigError("cannot discretize unbounded variable " + prm.var_names[d]);
        cells_[d] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / widths_[d])));
    }

    std::size_t total = prm.mode_count();
    for (std::size_t d = 0; d < dim; ++d) total *= cells_[d];
    states_.reserve(total);
    terminal_.reserve(total);

    // Mode-major enumeration, then row-major over cell indices.
    std::vector<std::size_t> idx(dim, 0);
    for (int mode = 0; mode < static_cast<int>(prm.mode_count()); ++mode) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            State s;
            s.mode = mode;
            s.center.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                const auto [lo, hi] = prm.psi_bounds[d];
                const double start = lo + static_cast<double>(idx[d]) * widths_[d];
                const double end = std::min(start + widths_[d], hi);
                s.center[d] = 0.5 * (start + end);
            }
            const std::size_t id = states_.size();
            const bool term = is_terminal(prm, HybridState{mode, s.center, 0});
            states_.push_back(std::move(s));
            terminal_.push_back(term);
            (term ? terminal_ids_ : nonterminal_).push_back(id);

            if (dim == 0) break;
            std::size_t d = dim;
            while (d > 0) {
                --d;
                if (++idx[d] < cells_[d]) break;
                idx[d] = 0;
                if (d == 0) goto next_mode;
            }
            continue;
        next_mode:
            break;
        }
    }
}

std::size_t Discretization::cell_of(std::size_t dim, double value) const {
    const auto [lo, hi] = prm_->psi_bounds[dim];
    if (value < lo || value > hi)
        throw NumericError("psi value " + std::to_string(value) + " outside bounds of " +
                           prm_->var_names[dim]);
    const auto cell = static_cast<long>(std::floor((value - lo) / widths_[dim]));
    if (cell < 0) return 0;
    if (cell >= static_cast<long>(cells_[dim])) return cells_[dim] - 1;
    return static_cast<std::size_t>(cell);
}

std::vector<double> Discretization::snap(const std::vector<double>& psi) const {
    std::vector<double> out(psi.size());
    for (std::size_t d = 0; d < psi.size(); ++d) {
        const auto [lo, hi] = prm_->psi_bounds[d];
        const double start = lo + static_cast<double>(cell_of(d, psi[d])) * widths_[d];
        const double end = std::min(start + widths_[d], hi);
        out[d] = 0.5 * (start + end);
    }
    return out;
}

std::size_t Discretization::id_of(int mode, const std::vector<double>& psi) const {
    std::size_t id = static_cast<std::size_t>(mode);
    for (std::size_t d = 0; d < psi.size(); ++d) id = id * cells_[d] + cell_of(d, psi[d]);
    return id;
}

Discretization::Transition Discretization::step(std::size_t id, Label label, long k) const {
    const auto res = prm_step(*prm_, hybrid(id, k), label);
    return {id_of(res.state), res.reward};
}

Discretization discretize_prm(const PrmDefinition& prm, std::vector<double> widths) {
    return Discretization(prm, std::move(widths));
}

}  // namespace prmrl
