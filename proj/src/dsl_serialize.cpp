#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "prmrl/dsl.hpp"

namespace prmrl {

namespace {

std::string fmt_double(double v) {
    if (v == 0.0) return "0";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct TermWriter {
    std::ostringstream os;
    bool first = true;

    void add(double coeff, const std::string& symbol) {
        if (coeff == 0.0) return;
        const double mag = std::fabs(coeff);
        const bool neg = coeff < 0.0;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        if (symbol.empty()) {
            os << fmt_double(mag);
        } else if (mag == 1.0) {
            os << symbol;
        } else {
            os << fmt_double(mag) << "*" << symbol;
        }
    }

    std::string str() {
        if (first) return "0";
        return os.str();
    }
};

std::string affine_str(const std::vector<double>& coeff, double k_coeff, double constant,
                       const std::vector<std::string>& var_names) {
    TermWriter w;
    for (std::size_t i = 0; i < coeff.size(); ++i) w.add(coeff[i], var_names[i]);
    w.add(k_coeff, "k");
    w.add(constant, "");
    return w.str();
}

std::string predicate_str(const LinearPredicate& p, const std::vector<std::string>& var_names) {
    std::ostringstream os;
    os << "(" << affine_str(p.coeff, p.k_coeff, 0.0, var_names) << " in "
       << (p.lo_open ? "(" : "[") << fmt_double(p.lo) << ", " << fmt_double(p.hi)
       << (p.hi_open ? ")" : "]") << ")";
    return os.str();
}

int precedence(BoolExpr::Kind kind) {
    switch (kind) {
        case BoolExpr::Kind::Or: return 1;
        case BoolExpr::Kind::And: return 2;
        case BoolExpr::Kind::Not: return 3;
        case BoolExpr::Kind::Atom: return 4;
    }
    return 4;
}

void formula_str(const BoolExpr& e, const PropositionSet& props, int parent, std::ostream& os) {
    const int self = precedence(e.kind);
    const bool parens = self < parent;
    if (parens) os << "(";
    switch (e.kind) {
        case BoolExpr::Kind::Atom: os << props.name(e.atom); break;
        case BoolExpr::Kind::Not:
            os << "!";
            formula_str(e.children[0], props, self + 1, os);
            break;
        case BoolExpr::Kind::And:
            formula_str(e.children[0], props, self, os);
            os << " & ";
            formula_str(e.children[1], props, self + 1, os);
            break;
        case BoolExpr::Kind::Or:
            formula_str(e.children[0], props, self, os);
            os << " | ";
            formula_str(e.children[1], props, self + 1, os);
            break;
    }
    if (parens) os << ")";
}

}  // namespace

std::string serialize_prm(const PrmDefinition& prm) {
    std::ostringstream os;
    os << "machine " << prm.name << "\n";
    os << "alphabet {";
    for (std::size_t i = 0; i < prm.props.size(); ++i)
        os << (i ? ", " : " ") << prm.props.name(i);
    os << (prm.props.size() ? " }" : "}") << "\n";
    for (std::size_t i = 0; i < prm.var_names.size(); ++i) {
        os << "var " << prm.var_names[i] << " : real init " << fmt_double(prm.psi_init[i])
           << " bounds [" << fmt_double(prm.psi_bounds[i].first) << ", "
           << fmt_double(prm.psi_bounds[i].second) << "]\n";
    }
    for (std::size_t m = 0; m < prm.modes.size(); ++m) {
        const Mode& mode = prm.modes[m];
        os << "mode " << mode.name;
        if (static_cast<int>(m) == prm.initial_mode) os << " init";
        os << " {\n";
        // Flow assignments for variables with a non-trivial derivative.
        std::ostringstream flow;
        for (std::size_t v = 0; v < prm.var_names.size(); ++v) {
            std::vector<double> row(prm.var_names.size(), 0.0);
            bool any = mode.flow.offset[v] != 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                row[j] = mode.flow.a(v, j);
                any = any || row[j] != 0.0;
            }
            if (!any) continue;
            flow << " " << prm.var_names[v] << "' = "
                 << affine_str(row, 0.0, mode.flow.offset[v], prm.var_names) << ";";
        }
        if (!flow.str().empty()) os << "  flow {" << flow.str() << " }\n";
        for (const auto& e : mode.edges) {
            os << "  on ";
            formula_str(e.guard.formula, prm.props, 0, os);
            for (const auto& p : e.guard.predicates)
                os << " & " << predicate_str(p, prm.var_names);
            os << " -> " << prm.modes[e.target].name << " reward " << fmt_double(e.reward)
               << "\n";
        }
        os << "}\n";
    }
    for (const auto& t : prm.terminals) {
        os << "terminal " << prm.modes[t.mode].name;
        if (!t.predicates.empty()) {
            os << " when ";
            for (std::size_t i = 0; i < t.predicates.size(); ++i)
                os << (i ? " & " : "") << predicate_str(t.predicates[i], prm.var_names);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace prmrl
