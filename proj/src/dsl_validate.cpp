#include <cmath>
#include <sstream>

#include "prmrl/dsl.hpp"

namespace prmrl {

namespace {

bool fully_terminal(const PrmDefinition& prm, int mode) {
    for (const auto& t : prm.terminals)
        if (t.mode == mode && t.predicates.empty()) return true;
    return false;
}

std::string psi_str(const std::vector<double>& psi) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < psi.size(); ++i) os << (i ? ", " : "") << psi[i];
    os << "]";
    return os.str();
}

}  // namespace

std::vector<Diagnostic> validate_prm(const PrmDefinition& prm, const ValidateOptions& opts) {
    std::vector<Diagnostic> out;
    auto error = [&](const std::string& msg) {
        out.push_back(Diagnostic{Diagnostic::Severity::Error, msg, 1, 1});
    };

    if (is_terminal(prm, initial_state(prm))) error("initial state lies in the terminal set");
    for (const auto& m : prm.modes)
        for (const auto& e : m.edges)
            if (!std::isfinite(e.reward)) error("non-finite reward in mode " + m.name);

    // Sample grid over psi: per-dimension midpoints of a uniform partition.
    const std::size_t dim = prm.psi_dim();
    const int n = std::max(1, opts.psi_samples_per_dim);
    std::vector<std::vector<double>> axis(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const auto [lo, hi] = prm.psi_bounds[d];
        for (int i = 0; i < n; ++i)
            axis[d].push_back(lo + (i + 0.5) * (hi - lo) / n);
    }
    std::vector<std::vector<double>> grid;
    std::vector<double> point(dim, 0.0);
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        for (std::size_t d = 0; d < dim; ++d) point[d] = axis[d][idx[d]];
        grid.push_back(point);
        if (dim == 0) break;
        std::size_t d = dim;
        bool done = true;
        while (d > 0) {
            --d;
            if (++idx[d] < axis[d].size()) {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if (done) break;
    }

    // Guard determinism and totality over every label, sampled psi and k.
    for (int mode = 0; mode < static_cast<int>(prm.mode_count()); ++mode) {
        if (fully_terminal(prm, mode)) continue;
        bool gap_reported = false, overlap_reported = false;
        for (Label label = 0; label < prm.props.label_count(); ++label) {
            for (const auto& psi : grid) {
                for (double k : opts.k_samples) {
                    HybridState probe{mode, psi, static_cast<long>(k)};
                    if (is_terminal(prm, probe)) continue;  // blocking region
                    int enabled = 0;
                    for (const auto& e : prm.modes[mode].edges)
                        if (e.guard.enabled(label, psi, k)) ++enabled;
                    if (enabled == 0 && !gap_reported) {
                        gap_reported = true;
                        auto syms = prm.props.symbols_of(label);
                        std::string ls;
                        for (const auto& s : syms) ls += (ls.empty() ? "" : ",") + s;
                        error("mode " + prm.modes[mode].name + " has no edge for label {" + ls +
                              "} at psi " + psi_str(psi) + ", k=" + std::to_string(k));
                    } else if (enabled > 1 && !overlap_reported) {
                        overlap_reported = true;
                        auto syms = prm.props.symbols_of(label);
                        std::string ls;
                        for (const auto& s : syms) ls += (ls.empty() ? "" : ",") + s;
                        error("mode " + prm.modes[mode].name + " has " + std::to_string(enabled) +
                              " edges enabled for label {" + ls + "} at psi " + psi_str(psi) +
                              ", k=" + std::to_string(k));
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace prmrl
