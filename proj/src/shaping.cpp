#include "prmrl/shaping.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace prmrl {

namespace {

// Cached one-step table of the discrete machine: successor id and reward
// for every (state, label) pair, k pinned to zero.
struct DiscreteDynamics {
    std::size_t labels;
    std::vector<std::size_t> next;
    std::vector<double> reward;

    DiscreteDynamics(const Discretization& disc)
        : labels(disc.prm().props.label_count()),
          next(disc.size() * labels),
          reward(disc.size() * labels) {
        for (std::size_t id : disc.nonterminal_ids()) {
            for (std::size_t l = 0; l < labels; ++l) {
                const auto t = disc.step(id, static_cast<Label>(l), 0);
                next[id * labels + l] = t.next_id;
                reward[id * labels + l] = t.reward;
                if (!std::isfinite(t.reward))
                    throw NumericError("non-finite reward in discretized machine");
            }
        }
    }
};

}  // namespace

PotentialTable value_iteration(const Discretization& disc, double lambda,
                               const ValueIterationOptions& opts) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must lie in (0,1)");
    if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw ConfigError("tol must lie in (0,1)");

    const DiscreteDynamics dyn(disc);
    const double bound = (1.0 - lambda) / lambda * opts.tol;
    std::vector<double> v(disc.size(), 0.0);

    auto backup = [&](std::size_t id) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < dyn.labels; ++l) {
            const double q = dyn.reward[id * dyn.labels + l] + lambda * v[dyn.next[id * dyn.labels + l]];
            best = std::max(best, q);
        }
        return best;
    };

    double residual = 0.0;
    while (true) {
        double err;
        do {
            err = 0.0;
            for (std::size_t id : disc.nonterminal_ids()) {
                const double updated = backup(id);
                err = std::max(err, std::fabs(updated - v[id]));
                v[id] = updated;
            }
        } while (err >= bound);
        // In-place sweeps can leave a slightly larger true residual; verify
        // against a frozen copy and keep sweeping if needed.
        residual = 0.0;
        for (std::size_t id : disc.nonterminal_ids())
            residual = std::max(residual, std::fabs(backup(id) - v[id]));
        if (residual < bound) break;
    }
    return PotentialTable(std::move(v), lambda, residual);
}

std::string potential_csv(const Discretization& disc, const PotentialTable& table) {
    auto fmt = [](double x) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, res.ptr);
    };
    std::ostringstream os;
    os << "state,mode,center,potential\n";
    for (std::size_t id = 0; id < disc.size(); ++id) {
        const auto& s = disc.state(id);
        os << id << "," << disc.prm().modes[s.mode].name << ",\"";
        for (std::size_t d = 0; d < s.center.size(); ++d)
            os << (d ? ";" : "") << fmt(s.center[d]);
        os << "\"," << fmt(table.potential(id)) << "\n";
    }
    return os.str();
}

}  // namespace prmrl
