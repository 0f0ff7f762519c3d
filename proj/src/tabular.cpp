#include "prmrl/tabular.hpp"

#include <algorithm>
#include <cmath>

namespace prmrl {

EnvIndexer::EnvIndexer(const EnvModel& env, const std::vector<double>& grid_widths)
    : env_(&env), enumerable_(env.state_count().has_value()) {
    if (enumerable_) {
        count_ = *env.state_count();
        return;
    }
    if (grid_widths.empty())
        throw ConfigError("environment " + env.name() +
                          " needs an env_grid to be used by a tabular learner");
    bounds_ = env.state_bounds();
    if (grid_widths.size() != bounds_.size())
        throw ConfigError("env_grid width count does not match the state dimension");
    widths_ = grid_widths;
    count_ = 1;
    for (std::size_t d = 0; d < bounds_.size(); ++d) {
        if (!(widths_[d] > 0.0)) throw ConfigError("non-positive env_grid width");
        cells_.push_back(std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::ceil((bounds_[d].second - bounds_[d].first) / widths_[d]))));
        count_ *= cells_.back();
    }
}

std::size_t EnvIndexer::index(const std::vector<double>& x) const {
    if (enumerable_) return env_->state_index(x);
    std::size_t id = 0;
    for (std::size_t d = 0; d < cells_.size(); ++d) {
        const double clamped = std::clamp(x[d], bounds_[d].first, bounds_[d].second);
        auto cell = static_cast<long>(std::floor((clamped - bounds_[d].first) / widths_[d]));
        cell = std::clamp<long>(cell, 0, static_cast<long>(cells_[d]) - 1);
        id = id * cells_[d] + static_cast<std::size_t>(cell);
    }
    return id;
}

QTable::QTable(std::size_t env_states, std::size_t machine_states, std::size_t actions,
               double init)
    : env_states_(env_states),
      machine_states_(machine_states),
      actions_(actions),
      q_(env_states * machine_states * actions, init),
      visits_(env_states * machine_states * actions, 0) {
    if (actions == 0) throw ConfigError("empty action set");
}

double QTable::max_value(std::size_t e, std::size_t m) const {
    double best = q_[offset(e, m, 0)];
    for (std::size_t a = 1; a < actions_; ++a) best = std::max(best, q_[offset(e, m, a)]);
    return best;
}

std::vector<std::size_t> QTable::argmax_set(std::size_t e, std::size_t m, double tie_tol) const {
    const double best = max_value(e, m);
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < actions_; ++a)
        if (q_[offset(e, m, a)] >= best - tie_tol) out.push_back(a);
    return out;
}

void QTable::update(std::size_t e, std::size_t m, std::size_t a, double reward,
                    std::size_t e_next, std::size_t m_next, bool terminal, double kappa,
                    double lambda) {
    const double target = terminal ? reward : reward + lambda * max_value(e_next, m_next);
    const std::size_t o = offset(e, m, a);
    q_[o] += kappa * (target - q_[o]);
    ++visits_[o];
}

std::size_t epsilon_greedy(const QTable& q, std::size_t e, std::size_t m, double epsilon,
                           Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.index(q.actions());
    const auto best = q.argmax_set(e, m);
    return best.size() == 1 ? best[0] : best[rng.index(best.size())];
}

std::size_t joint_machine_index(const std::vector<const Discretization*>& discs,
                                const std::vector<HybridState>& states) {
    std::size_t id = 0;
    for (std::size_t i = 0; i < discs.size(); ++i) id = id * discs[i]->size() + discs[i]->id_of(states[i]);
    return id;
}

namespace {

// One machine-side transition of a (possibly counterfactual) experience.
struct MachineMove {
    std::size_t from;
    std::size_t to;
    double reward;    // shaped when shaping is on
    bool terminal;
};

// Joint update item shared by actual and counterfactual experiences.
struct UpdateItem {
    std::size_t m_from;
    std::size_t m_to;
    double reward;
    bool terminal;
};

class Trainer {
public:
    Trainer(const TabularSetup& setup, const TabularParams& params, std::uint64_t seed)
        : setup_(setup),
          params_(params),
          rng_(seed),
          env_index_(*setup.env, setup.env_grid),
          window_(static_cast<std::size_t>(params.metric_window)) {
        if (setup_.machines.empty()) throw ConfigError("tabular training needs a machine");
        machine_total_ = 1;
        for (const auto* d : setup_.discs) {
            result_.machine_sizes.push_back(d->size());
            machine_total_ *= d->size();
        }
        const auto& acts = setup_.env->actions();
        if (!acts.is_finite())
            throw ConfigError("tabular learning needs a finite action environment");
        result_.q = std::make_unique<QTable>(env_index_.count(), machine_total_, acts.count(),
                                             params_.optimistic_init);
        if (params_.use_shaping)
            for (const auto* d : setup_.discs)
                potentials_.push_back(
                    value_iteration(*d, params_.lambda, {params_.shaping_tol}));
        cap_ = params_.counterfactual_cap;
        if (cap_ == 0)
            for (const auto& m : setup_.machines) cap_ += m.prm->mode_count() * 32;
    }

    TabularResult run() {
        ProductState state = product_initial(*setup_.env, setup_.machines);
        long episode_steps = 0;
        for (long step = 1; step <= params_.max_training_steps; ++step) {
            const std::size_t e = env_index_.index(state.x);
            const std::size_t m = joint_machine_index(setup_.discs, state.machines);
            const auto action = epsilon_greedy(*result_.q, e, m, params_.epsilon, rng_);
            const auto res = product_step(*setup_.env, setup_.machines, state,
                                          Action::discrete(static_cast<int>(action)), rng_);
            window_.push(res.reward);  // raw product reward, never shaped

            const std::size_t e_next = env_index_.index(res.state.x);
            apply_updates(state, res, e, e_next, action);

            if (step % params_.checkpoint_every == 0)
                result_.metrics.push_back({step, window_.average()});
            if (params_.policy_snapshot_every > 0 && step % params_.policy_snapshot_every == 0)
                take_snapshot(step);

            ++episode_steps;
            if (res.done || episode_steps >= params_.episode_step_cap) {
                state = product_initial(*setup_.env, setup_.machines);
                episode_steps = 0;
                ++result_.episodes;
            } else {
                state = res.state;
            }
        }
        return std::move(result_);
    }

private:
    double maybe_shape(std::size_t machine, double reward, std::size_t from, std::size_t to) const {
        if (!params_.use_shaping) return reward;
        return shaped_reward(reward, from, to, potentials_[machine]);
    }

    // Machine-side move of the actual experience for machine i.
    MachineMove actual_move(const ProductState& state, const ProductStepResult& res,
                            std::size_t i) const {
        const auto* d = setup_.discs[i];
        MachineMove mv;
        mv.from = d->id_of(state.machines[i]);
        mv.to = d->id_of(res.state.machines[i]);
        mv.terminal = is_terminal(*setup_.machines[i].prm, res.state.machines[i]);
        mv.reward = maybe_shape(i, res.machine_rewards[i], mv.from, mv.to);
        return mv;
    }

    // Counterfactual moves of machine i for the observed label, one per
    // non-terminal discretized state.
    std::vector<MachineMove> counterfactual_moves(std::size_t i, Label env_label, long k) const {
        const auto* d = setup_.discs[i];
        const Label label = setup_.machines[i].translate(env_label);
        std::vector<MachineMove> out;
        out.reserve(d->nonterminal_ids().size());
        for (std::size_t id : d->nonterminal_ids()) {
            const auto t = d->step(id, label, k);
            MachineMove mv;
            mv.from = id;
            mv.to = t.next_id;
            mv.terminal = d->terminal(t.next_id);
            mv.reward = maybe_shape(i, t.reward, mv.from, mv.to);
            out.push_back(mv);
        }
        return out;
    }

    void apply_updates(const ProductState& state, const ProductStepResult& res, std::size_t e,
                       std::size_t e_next, std::size_t action) {
        const std::size_t T = setup_.machines.size();
        std::vector<MachineMove> actual(T);
        for (std::size_t i = 0; i < T; ++i) actual[i] = actual_move(state, res, i);

        std::vector<UpdateItem> batch;
        batch.push_back(combine(actual));

        if (params_.use_prme) {
            std::vector<std::vector<MachineMove>> moves(T);
            std::size_t total = 1;
            for (std::size_t i = 0; i < T; ++i) {
                moves[i] = counterfactual_moves(i, res.env_label, state.machines[i].step);
                total *= moves[i].size();
            }
            if (total <= cap_) {
                // Full cross product of per-machine counterfactual moves.
                std::vector<std::size_t> idx(T, 0);
                std::vector<MachineMove> combo(T);
                while (true) {
                    for (std::size_t i = 0; i < T; ++i) combo[i] = moves[i][idx[i]];
                    batch.push_back(combine(combo));
                    std::size_t d = T;
                    bool done = true;
                    while (d > 0) {
                        --d;
                        if (++idx[d] < moves[d].size()) {
                            done = false;
                            break;
                        }
                        idx[d] = 0;
                    }
                    if (done) break;
                }
            } else {
                // Uniform sample of distinct joint combinations. The actual
                // experience is already in the batch, so no forced include.
                std::vector<std::size_t> seen;
                std::vector<MachineMove> combo(T);
                while (seen.size() < cap_) {
                    std::size_t flat = rng_.index(total);
                    if (std::find(seen.begin(), seen.end(), flat) != seen.end()) continue;
                    seen.push_back(flat);
                    for (std::size_t i = T; i-- > 0;) {
                        combo[i] = moves[i][flat % moves[i].size()];
                        flat /= moves[i].size();
                    }
                    batch.push_back(combine(combo));
                }
            }
        }

        for (const auto& item : batch) {
            result_.q->update(e, item.m_from, action, item.reward, e_next, item.m_to,
                              item.terminal, params_.kappa, params_.lambda);
            ++result_.updates;
        }
    }

    UpdateItem combine(const std::vector<MachineMove>& moves) const {
        UpdateItem item{0, 0, 0.0, false};
        for (std::size_t i = 0; i < moves.size(); ++i) {
            item.m_from = item.m_from * setup_.discs[i]->size() + moves[i].from;
            item.m_to = item.m_to * setup_.discs[i]->size() + moves[i].to;
            item.reward += moves[i].reward;
            item.terminal = item.terminal || moves[i].terminal;
        }
        item.reward /= static_cast<double>(moves.size());
        return item;
    }

    const TabularSetup& setup_;
    TabularParams params_;
    Rng rng_;
    EnvIndexer env_index_;
    RewardWindow window_;
    std::vector<PotentialTable> potentials_;
    std::size_t machine_total_ = 1;
    std::size_t cap_ = 0;
    TabularResult result_;
};

}  // namespace

TabularResult train_tabular(const TabularSetup& setup, const TabularParams& params,
                            std::uint64_t seed) {
    return Trainer(setup, params, seed).run();
}

}  // namespace prmrl
