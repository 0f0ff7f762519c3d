#pragma once

#include <vector>

#include "prmrl/prm.hpp"

namespace prmrl {

// Finite abstraction of a machine's hybrid state set: the cross product of
// modes with a per-dimension box partition of psi_bounds. Cells are
// half-open [lo, lo+w) except the last one per dimension, which absorbs the
// upper boundary.
class Discretization {
public:
    struct State {
        int mode = 0;
        std::vector<double> center;
    };

    Discretization(const PrmDefinition& prm, std::vector<double> widths);

    const PrmDefinition& prm() const { return *prm_; }
    std::size_t size() const { return states_.size(); }
    const State& state(std::size_t id) const { return states_[id]; }
    bool terminal(std::size_t id) const { return terminal_[id]; }
    const std::vector<std::size_t>& nonterminal_ids() const { return nonterminal_; }
    const std::vector<std::size_t>& terminal_ids() const { return terminal_ids_; }
    const std::vector<double>& widths() const { return widths_; }
    std::size_t cells(std::size_t dim) const { return cells_[dim]; }

    // Cell index of one coordinate; boundary points belong to the cell they
    // start, the top bound to the last cell.
    std::size_t cell_of(std::size_t dim, double value) const;

    // Cell-center representative of an arbitrary in-bounds psi.
    std::vector<double> snap(const std::vector<double>& psi) const;

    // Discrete state id of (mode, psi).
    std::size_t id_of(int mode, const std::vector<double>& psi) const;
    std::size_t id_of(const HybridState& state) const { return id_of(state.mode, state.psi); }

    // Cell-center hybrid state for a discrete id, stamped with step counter k.
    HybridState hybrid(std::size_t id, long k = 0) const {
        return HybridState{states_[id].mode, states_[id].center, k};
    }

    // Machine step of the induced finite machine: advance the cell-center
    // state by one label and snap the successor back onto the grid.
    struct Transition {
        std::size_t next_id;
        double reward;
    };
    Transition step(std::size_t id, Label label, long k = 0) const;

private:
    const PrmDefinition* prm_;
    std::vector<double> widths_;
    std::vector<std::size_t> cells_;
    std::vector<State> states_;
    std::vector<bool> terminal_;
    std::vector<std::size_t> nonterminal_;
    std::vector<std::size_t> terminal_ids_;
};

Discretization discretize_prm(const PrmDefinition& prm, std::vector<double> widths);

}  // namespace prmrl
