#include "prmrl/oracle.hpp"

#include <cmath>
#include <limits>

namespace prmrl {

ProductOracle::ProductOracle(const OfficeEnv& env, std::vector<AttachedMachine> machines,
                             std::vector<const Discretization*> discs, double lambda,
                             std::size_t state_limit)
    : env_(&env), machines_(std::move(machines)), discs_(std::move(discs)), lambda_(lambda) {
    if (machines_.empty() || machines_.size() != discs_.size())
        throw ConfigError("oracle needs one discretization per machine");
    if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("oracle lambda must lie in [0,1)");
    n_env_ = *env.state_count();
    n_machine_ = 1;
    for (const auto* d : discs_) n_machine_ *= d->size();
    n_actions_ = env.actions().count();
    if (n_env_ * n_machine_ > state_limit)
        throw ConfigError("product state space exceeds the oracle limit");

    // Joint terminal flags and per-machine shaping potentials. Shaping needs
    // lambda in (0,1); outside that the shaped stream falls back to raw.
    const std::size_t T = machines_.size();
    const bool can_shape = lambda_ > 0.0 && lambda_ < 1.0;
    std::vector<PotentialTable> potentials;
    if (can_shape)
        for (const auto* d : discs_) potentials.push_back(value_iteration(*d, lambda_));
    terminal_machine_.assign(n_machine_, false);
    std::vector<std::size_t> ids(T);
    for (std::size_t m = 0; m < n_machine_; ++m) {
        std::size_t rest = m;
        for (std::size_t i = T; i-- > 0;) {
            ids[i] = rest % discs_[i]->size();
            rest /= discs_[i]->size();
        }
        for (std::size_t i = 0; i < T; ++i)
            if (discs_[i]->terminal(ids[i])) terminal_machine_[m] = true;
    }

    // Per-machine one-step tables over (id, env label).
    struct MachineTable {
        std::size_t labels;
        std::vector<std::size_t> next;
        std::vector<double> reward;
        std::vector<double> shaped;
    };
    const std::size_t env_labels = env.propositions().label_count();
    std::vector<MachineTable> mt(T);
    for (std::size_t i = 0; i < T; ++i) {
        const auto* d = discs_[i];
        mt[i].labels = env_labels;
        mt[i].next.assign(d->size() * env_labels, 0);
        mt[i].reward.assign(d->size() * env_labels, 0.0);
        mt[i].shaped.assign(d->size() * env_labels, 0.0);
        for (std::size_t id = 0; id < d->size(); ++id) {
            for (std::size_t l = 0; l < env_labels; ++l) {
                if (d->terminal(id)) {
                    mt[i].next[id * env_labels + l] = id;
                    continue;
                }
                const Label label = machines_[i].translate(static_cast<Label>(l));
                const auto t = d->step(id, label, 0);
                mt[i].next[id * env_labels + l] = t.next_id;
                mt[i].reward[id * env_labels + l] = t.reward;
                mt[i].shaped[id * env_labels + l] =
                    can_shape ? shaped_reward(t.reward, id, t.next_id, potentials[i]) : t.reward;
            }
        }
    }

    // Assemble the product transition table.
    table_.resize(states() * n_actions_);
    for (std::size_t cell = 0; cell < n_env_; ++cell) {
        for (std::size_t a = 0; a < n_actions_; ++a) {
            const auto env_succ = env_->transition(cell, static_cast<int>(a));
            for (std::size_t m = 0; m < n_machine_; ++m) {
                const std::size_t s = state_of(cell, m);
                auto& row = table_[s * n_actions_ + a];
                if (terminal_machine_[m]) continue;  // absorbing, value pinned to zero
                std::size_t rest = m;
                for (std::size_t i = T; i-- > 0;) {
                    ids[i] = rest % discs_[i]->size();
                    rest /= discs_[i]->size();
                }
                for (const auto& [next_cell, p] : env_succ) {
                    const Label env_label = env_->label_of(
                        {static_cast<double>(env_->floor_cells()[next_cell].second),
                         static_cast<double>(env_->floor_cells()[next_cell].first)});
                    std::size_t m_next = 0;
                    double reward = 0.0, shaped = 0.0;
                    for (std::size_t i = 0; i < T; ++i) {
                        const std::size_t o = ids[i] * env_labels + env_label;
                        m_next = m_next * discs_[i]->size() + mt[i].next[o];
                        reward += mt[i].reward[o];
                        shaped += mt[i].shaped[o];
                    }
                    row.push_back({state_of(next_cell, m_next), p,
                                   reward / static_cast<double>(T),
                                   shaped / static_cast<double>(T)});
                }
            }
        }
    }
}

std::size_t ProductOracle::initial_state() const {
    const auto x0 = env_->initial_state();
    const std::size_t cell = env_->state_index(x0);
    std::size_t m = 0;
    for (std::size_t i = 0; i < machines_.size(); ++i)
        m = m * discs_[i]->size() + discs_[i]->id_of(prmrl::initial_state(*machines_[i].prm));
    return state_of(cell, m);
}

std::vector<double> ProductOracle::optimal_values(bool shaped, double tol) const {
    std::vector<double> v(states(), 0.0);
    double err = 0.0;
    do {
        err = 0.0;
        for (std::size_t s = 0; s < states(); ++s) {
            if (terminal(s)) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < n_actions_; ++a) {
                double q = 0.0;
                for (const auto& succ : table_[s * n_actions_ + a])
                    q += succ.probability *
                         ((shaped ? succ.shaped_reward : succ.reward) + lambda_ * v[succ.state]);
                best = std::max(best, q);
            }
            err = std::max(err, std::fabs(best - v[s]));
            v[s] = best;
        }
    } while (err > tol);
    return v;
}

std::vector<double> ProductOracle::q_values(const std::vector<double>& v, std::size_t state,
                                            bool shaped) const {
    std::vector<double> q(n_actions_, 0.0);
    for (std::size_t a = 0; a < n_actions_; ++a)
        for (const auto& succ : table_[state * n_actions_ + a])
            q[a] += succ.probability *
                    ((shaped ? succ.shaped_reward : succ.reward) + lambda_ * v[succ.state]);
    return q;
}

std::vector<std::vector<std::size_t>> ProductOracle::greedy_sets(const std::vector<double>& v,
                                                                 bool shaped,
                                                                 double tie_tol) const {
    std::vector<std::vector<std::size_t>> out(states());
    for (std::size_t s = 0; s < states(); ++s) {
        const auto q = q_values(v, s, shaped);
        double best = q[0];
        for (double x : q) best = std::max(best, x);
        for (std::size_t a = 0; a < n_actions_; ++a)
            if (q[a] >= best - tie_tol) out[s].push_back(a);
    }
    return out;
}

std::vector<double> ProductOracle::policy_values(const std::vector<std::size_t>& policy,
                                                 double tol) const {
    std::vector<double> v(states(), 0.0);
    double err = 0.0;
    do {
        err = 0.0;
        for (std::size_t s = 0; s < states(); ++s) {
            if (terminal(s)) continue;
            double q = 0.0;
            for (const auto& succ : table_[s * n_actions_ + policy[s]])
                q += succ.probability * (succ.reward + lambda_ * v[succ.state]);
            err = std::max(err, std::fabs(q - v[s]));
            v[s] = q;
        }
    } while (err > tol);
    return v;
}

}  // namespace prmrl
