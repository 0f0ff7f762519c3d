#include "prmrl/prm.hpp"

#include <cmath>
#include <sstream>

namespace prmrl {

BoolExpr BoolExpr::make_and(BoolExpr a, BoolExpr b) {
    BoolExpr e{Kind::And, 0, {}};
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
}

BoolExpr BoolExpr::make_or(BoolExpr a, BoolExpr b) {
    BoolExpr e{Kind::Or, 0, {}};
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
}

bool BoolExpr::eval(Label label) const {
    switch (kind) {
        case Kind::Atom: return has_bit(label, atom);
        case Kind::Not: return !children[0].eval(label);
        case Kind::And: return children[0].eval(label) && children[1].eval(label);
        case Kind::Or: return children[0].eval(label) || children[1].eval(label);
    }
    return false;
}

bool BoolExpr::operator==(const BoolExpr& o) const {
    return kind == o.kind && atom == o.atom && children == o.children;
}

bool LinearPredicate::holds(const std::vector<double>& psi, double k) const {
    double v = k_coeff * k;
    for (std::size_t i = 0; i < coeff.size(); ++i) v += coeff[i] * psi[i];
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
}

void Guard::compile(std::size_t prop_count) {
    const std::size_t labels = std::size_t{1} << prop_count;
    truth_table = 0;
    for (std::size_t l = 0; l < labels; ++l)
        if (formula.eval(static_cast<Label>(l))) truth_table |= std::uint64_t{1} << l;
}

int PrmDefinition::find_mode(const std::string& mode_name) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].name == mode_name) return static_cast<int>(i);
    return -1;
}

void PrmDefinition::finalize() {
    const std::size_t dim = psi_dim();
    if (props.size() > 6)  // 2^6 labels fit the 64-bit guard truth tables
        throw DefinitionError("alphabet too large for guard truth tables");
    if (var_names.size() != dim) throw DefinitionError("var name count != psi dimension");
    if (psi_bounds.size() != dim) throw DefinitionError("psi_bounds count != psi dimension");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(psi_bounds[i].first <= psi_bounds[i].second))
            throw DefinitionError("empty bounds for variable " + var_names[i]);
        if (psi_init[i] < psi_bounds[i].first || psi_init[i] > psi_bounds[i].second)
            throw DefinitionError("initial value of " + var_names[i] + " outside bounds");
    }
    if (modes.empty()) throw DefinitionError("machine has no modes");
    if (initial_mode < 0 || initial_mode >= static_cast<int>(modes.size()))
        throw DefinitionError("initial mode out of range");
    if (tau <= 0.0) throw DefinitionError("tau must be positive");
    for (auto& m : modes) {
        if (m.flow.dim() != dim) throw DefinitionError("flow dimension mismatch in " + m.name);
        for (auto& e : m.edges) {
            if (e.target < 0 || e.target >= static_cast<int>(modes.size()))
                throw DefinitionError("edge target out of range in " + m.name);
            if (!std::isfinite(e.reward))
                throw DefinitionError("non-finite edge reward in " + m.name);
            for (const auto& p : e.guard.predicates)
                if (p.coeff.size() != dim)
                    throw DefinitionError("guard predicate dimension mismatch in " + m.name);
            e.guard.compile(props.size());
        }
    }
    for (const auto& t : terminals) {
        if (t.mode < 0 || t.mode >= static_cast<int>(modes.size()))
            throw DefinitionError("terminal mode out of range");
        for (const auto& p : t.predicates)
            if (p.coeff.size() != dim) throw DefinitionError("terminal predicate dimension mismatch");
    }
    if (is_terminal(*this, initial_state(*this)))
        throw DefinitionError("initial state lies in the terminal set");
}

bool PrmDefinition::operator==(const PrmDefinition& o) const {
    return name == o.name && props == o.props && var_names == o.var_names && modes == o.modes &&
           psi_init == o.psi_init && initial_mode == o.initial_mode && terminals == o.terminals &&
           psi_bounds == o.psi_bounds && tau == o.tau;
}

HybridState initial_state(const PrmDefinition& prm) {
    return HybridState{prm.initial_mode, prm.psi_init, 0};
}

bool is_terminal(const PrmDefinition& prm, const HybridState& state) {
    for (const auto& t : prm.terminals) {
        if (t.mode != state.mode) continue;
        bool all = true;
        for (const auto& p : t.predicates)
            if (!p.holds(state.psi, static_cast<double>(state.step))) {
                all = false;
                break;
            }
        if (all) return true;
    }
    return false;
}

namespace {

std::string describe_psi(const std::vector<double>& psi) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < psi.size(); ++i) os << (i ? ", " : "") << psi[i];
    os << "]";
    return os.str();
}

std::string describe_label(const PrmDefinition& prm, Label label) {
    auto syms = prm.props.symbols_of(label);
    std::string out = "{";
    for (std::size_t i = 0; i < syms.size(); ++i) out += (i ? "," : "") + syms[i];
    return out + "}";
}

}  // namespace

PrmStepResult prm_step(const PrmDefinition& prm, const HybridState& state, Label label) {
    if (is_terminal(prm, state)) return {state, 0.0};  // blocking

    const Mode& mode = prm.modes[state.mode];
    std::vector<double> psi = state.psi;
    if (!psi.empty()) psi = flow_step(mode.flow, psi, prm.tau, &prm.psi_bounds);
    const long next_step = state.step + 1;
    const double k = static_cast<double>(next_step);

    const Edge* chosen = nullptr;
    for (const auto& e : mode.edges) {
        if (!e.guard.enabled(label, psi, k)) continue;
        if (chosen) {
            throw TotalityError("multiple guards enabled in mode " + mode.name + " for label " +
                                describe_label(prm, label) + " at psi " + describe_psi(psi));
        }
        chosen = &e;
    }
    if (!chosen)
        throw TotalityError("no guard enabled in mode " + mode.name + " for label " +
                            describe_label(prm, label) + " at psi " + describe_psi(psi));

    return {HybridState{chosen->target, std::move(psi), next_step}, chosen->reward};
}

}  // namespace prmrl
