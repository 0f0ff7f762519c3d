#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prmrl/flow.hpp"
#include "prmrl/label.hpp"

namespace prmrl {

// Boolean formula over atomic propositions. The tree is kept for the
// serializer; evaluation against a label goes through a precompiled truth
// table (one bit per label) since alphabets are tiny.
struct BoolExpr {
    enum class Kind { Atom, Not, And, Or };

    Kind kind = Kind::Atom;
    std::size_t atom = 0;
    std::vector<BoolExpr> children;

    static BoolExpr make_atom(std::size_t bit) { return {Kind::Atom, bit, {}}; }
    static BoolExpr make_not(BoolExpr e) { return {Kind::Not, 0, {std::move(e)}}; }
    static BoolExpr make_and(BoolExpr a, BoolExpr b);
    static BoolExpr make_or(BoolExpr a, BoolExpr b);

    bool eval(Label label) const;
    bool operator==(const BoolExpr& o) const;
};

// Conjunct of the form  c . psi + d k  in [lo, hi], with either end
// optionally open or infinite.
struct LinearPredicate {
    std::vector<double> coeff;
    double k_coeff = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    bool holds(const std::vector<double>& psi, double k) const;
    bool operator==(const LinearPredicate& o) const = default;
};

struct Guard {
    BoolExpr formula;
    std::uint64_t truth_table = 0;  // bit per label; filled by compile()
    std::vector<LinearPredicate> predicates;

    void compile(std::size_t prop_count);
    bool enabled(Label label, const std::vector<double>& psi, double k) const {
        if (!((truth_table >> label) & 1u)) return false;
        for (const auto& p : predicates)
            if (!p.holds(psi, k)) return false;
        return true;
    }
    bool operator==(const Guard& o) const {
        return formula == o.formula && predicates == o.predicates;
    }
};

struct Edge {
    Guard guard;
    int target = 0;
    double reward = 0.0;
    bool operator==(const Edge& o) const = default;
};

struct Mode {
    std::string name;
    FlowSpec flow;
    std::vector<Edge> edges;
    bool operator==(const Mode& o) const = default;
};

// Terminal region: a mode, optionally restricted by continuous predicates.
// An empty predicate list marks the whole mode terminal.
struct TerminalSpec {
    int mode = 0;
    std::vector<LinearPredicate> predicates;
    bool operator==(const TerminalSpec& o) const = default;
};

struct PrmDefinition {
    std::string name;
    PropositionSet props;
    std::vector<std::string> var_names;
    std::vector<Mode> modes;
    std::vector<double> psi_init;
    int initial_mode = 0;
    std::vector<TerminalSpec> terminals;
    Bounds psi_bounds;
    double tau = 1.0;

    std::size_t psi_dim() const { return psi_init.size(); }
    std::size_t mode_count() const { return modes.size(); }
    int find_mode(const std::string& mode_name) const;

    // Structural sanity independent of guard semantics; throws
    // DefinitionError on violation. Also compiles guard truth tables.
    void finalize();

    bool operator==(const PrmDefinition& o) const;
};

// The machine's live hybrid state: discrete mode, continuous component and
// the global step counter that k-referencing guards see.
struct HybridState {
    int mode = 0;
    std::vector<double> psi;
    long step = 0;

    bool operator==(const HybridState& o) const = default;
};

struct PrmStepResult {
    HybridState state;
    double reward = 0.0;
};

HybridState initial_state(const PrmDefinition& prm);

bool is_terminal(const PrmDefinition& prm, const HybridState& state);

// One synchronous machine step driven by an observed label: integrate psi
// over one tau interval under the current mode's flow, then take the unique
// edge enabled at (label, new psi, step + 1). Terminal states are blocking:
// they are returned unchanged with reward 0.
PrmStepResult prm_step(const PrmDefinition& prm, const HybridState& state, Label label);

}  // namespace prmrl
