#include "prmrl/ddpg.hpp"

#include <algorithm>
#include <cmath>

namespace prmrl {

void ReplayBuffer::push(Experience e) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(e));
        return;
    }
    data_[head_] = std::move(e);
    head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::oldest(std::size_t i) const {
    if (i >= data_.size()) throw ConfigError("replay buffer index out of range");
    if (data_.size() < capacity_) return data_[i];
    return data_[(head_ + i) % capacity_];
}

Featurizer::Featurizer(const EnvModel& env, const PrmDefinition& prm)
    : env_bounds_(env.state_bounds()), prm_(&prm) {
    state_dim_ = env_bounds_.size() + prm.mode_count() + prm.psi_dim();
    action_dim_ = env.actions().dim();
    if (env.actions().is_finite())
        throw ConfigError("the deep learner needs a continuous action environment");
}

void Featurizer::write_state(const std::vector<double>& x, const HybridState& rho,
                             double* out) const {
    std::size_t o = 0;
    for (std::size_t d = 0; d < env_bounds_.size(); ++d) {
        const auto [lo, hi] = env_bounds_[d];
        out[o++] = hi > lo ? (x[d] - lo) / (hi - lo) : 0.0;
    }
    for (std::size_t m = 0; m < prm_->mode_count(); ++m)
        out[o++] = static_cast<int>(m) == rho.mode ? 1.0 : 0.0;
    for (std::size_t d = 0; d < prm_->psi_dim(); ++d) {
        const auto [lo, hi] = prm_->psi_bounds[d];
        out[o++] = hi > lo ? (rho.psi[d] - lo) / (hi - lo) : 0.0;
    }
}

std::vector<double> Featurizer::state(const std::vector<double>& x, const HybridState& rho) const {
    std::vector<double> out(state_dim_);
    write_state(x, rho, out.data());
    return out;
}

double critic_target(const Experience& e, const Mlp& actor_target, const Mlp& critic_target_net,
                     const Featurizer& feat, double lambda, bool terminal) {
    if (terminal) return e.reward;
    const auto s_next = feat.state(e.x_next, e.rho_next);
    const auto a_next = actor_target.forward(s_next);
    std::vector<double> sa(s_next);
    sa.insert(sa.end(), a_next.begin(), a_next.end());
    return e.reward + lambda * critic_target_net.forward(sa)[0];
}

namespace {

class DdpgTrainer {
public:
    DdpgTrainer(const DdpgSetup& setup, const DdpgParams& params, std::uint64_t seed)
        : setup_(setup),
          params_(params),
          rng_(seed),
          feat_(*setup.env, *setup.machine.prm),
          buffer_(1),
          window_(static_cast<std::size_t>(params.metric_window)) {
        const std::size_t h =
            params_.use_prme ? setup_.disc->nonterminal_ids().size() : std::size_t{1};
        replay_h_ = h;
        buffer_ = ReplayBuffer(params_.buffer_scale * h);
        batch_ = std::min(params_.batch_scale * h, params_.batch_cap);

        const auto& box = setup_.env->actions().box;
        std::vector<std::size_t> critic_sizes{feat_.state_dim() + feat_.action_dim()};
        std::vector<std::size_t> actor_sizes{feat_.state_dim()};
        for (auto hsize : params_.hidden) {
            critic_sizes.push_back(hsize);
            actor_sizes.push_back(hsize);
        }
        critic_sizes.push_back(1);
        actor_sizes.push_back(feat_.action_dim());

        actor_ = Mlp(actor_sizes, box);
        critic_ = Mlp(critic_sizes);
        actor_.init_random(rng_);
        critic_.init_random(rng_);
        actor_target_ = actor_;
        critic_target_ = critic_;
        adam_actor_.init(actor_);
        adam_critic_.init(critic_);

        if (params_.use_shaping)
            potential_ = value_iteration(*setup_.disc, params_.lambda, {params_.shaping_tol});

        cap_ = params_.counterfactual_cap;
        if (cap_ == 0) cap_ = setup_.machine.prm->mode_count() * 32;

        for (const auto& [lo, hi] : box) sigma_.push_back(params_.noise_sigma_frac * 0.5 * (hi - lo));
    }

    DdpgResult run() {
        std::vector<AttachedMachine> machines{setup_.machine};
        ProductState state = product_initial(*setup_.env, machines);
        long episode_steps = 0;
        for (long step = 1; step <= params_.max_training_steps; ++step) {
            // Exploration action: actor output plus Gaussian noise, kept in the box.
            auto action_value = actor_.forward(feat_.state(state.x, state.machines[0]));
            const auto& box = setup_.env->actions().box;
            for (std::size_t d = 0; d < action_value.size(); ++d) {
                action_value[d] += rng_.gaussian(0.0, sigma_[d]);
                action_value[d] = std::clamp(action_value[d], box[d].first, box[d].second);
            }
            const Action action = Action::continuous(action_value);
            const auto res = product_step(*setup_.env, machines, state, action, rng_);
            window_.push(res.reward);

            Experience actual;
            actual.x = state.x;
            actual.rho = state.machines[0];
            actual.u = action;
            actual.reward = res.machine_rewards[0];
            actual.x_next = res.state.x;
            actual.rho_next = res.state.machines[0];
            store(std::move(actual));

            if (params_.use_prme) {
                auto batch = counterfactual_experiences(*setup_.env, state.x, action, res.state.x,
                                                        setup_.machine, *setup_.disc, cap_, rng_,
                                                        state.machines[0]);
                for (auto& e : batch) store(std::move(e));
            }

            if (buffer_.size() >= std::max<std::size_t>(batch_, params_.warmup)) learn();

            if (step % params_.checkpoint_every == 0)
                result_.metrics.push_back({step, window_.average()});

            ++episode_steps;
            if (res.done || episode_steps >= params_.episode_step_cap) {
                state = product_initial(*setup_.env, machines);
                episode_steps = 0;
                ++result_.episodes;
            } else {
                state = res.state;
            }
        }
        result_.actor = std::move(actor_);
        result_.critic = std::move(critic_);
        result_.gradient_steps = grad_steps_;
        result_.replay_h = replay_h_;
        return std::move(result_);
    }

private:
    void store(Experience e) {
        if (params_.use_shaping) {
            const std::size_t from = setup_.disc->id_of(e.rho);
            const std::size_t to = setup_.disc->id_of(e.rho_next);
            e.reward = shaped_reward(e.reward, from, to, *potential_);
        }
        buffer_.push(std::move(e));
        ++result_.buffer_inserts;
    }

    void learn() {
        const std::size_t n = batch_;
        const std::size_t sdim = feat_.state_dim();
        const std::size_t adim = feat_.action_dim();

        std::vector<double> s(n * sdim), sa(n * (sdim + adim)), s_next(n * sdim);
        std::vector<double> targets(n);
        std::vector<const Experience*> picked(n);
        std::vector<bool> terminal(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Experience& e = buffer_.sample(rng_);
            picked[i] = &e;
            feat_.write_state(e.x, e.rho, s.data() + i * sdim);
            feat_.write_state(e.x_next, e.rho_next, s_next.data() + i * sdim);
            std::copy_n(s.data() + i * sdim, sdim, sa.data() + i * (sdim + adim));
            std::copy(e.u.value.begin(), e.u.value.end(), sa.data() + i * (sdim + adim) + sdim);
            terminal[i] = is_terminal(*setup_.machine.prm, e.rho_next);
        }

        // Regression targets from the target networks.
        auto next_trace = actor_target_.forward_batch(s_next, n);
        const auto& a_next = actor_target_.output_of(next_trace);
        std::vector<double> sa_next(n * (sdim + adim));
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(s_next.data() + i * sdim, sdim, sa_next.data() + i * (sdim + adim));
            std::copy_n(a_next.data() + i * adim, adim, sa_next.data() + i * (sdim + adim) + sdim);
        }
        auto qn_trace = critic_target_.forward_batch(std::move(sa_next), n);
        const auto& q_next = critic_target_.output_of(qn_trace);
        for (std::size_t i = 0; i < n; ++i)
            targets[i] = terminal[i] ? picked[i]->reward
                                     : picked[i]->reward + params_.lambda * q_next[i];

        // Critic step on the mean squared Bellman error.
        auto q_trace = critic_.forward_batch(sa, n);
        std::vector<double> dq;
        mse_loss(critic_.output_of(q_trace), targets, &dq);
        Mlp::Gradients cgrads;
        cgrads.init(critic_);
        critic_.backward(q_trace, std::move(dq), cgrads);
        adam_critic_.apply(critic_, cgrads, params_.critic_lr);

        // Actor ascent on (1/N) sum q(s, actor(s)) through the frozen critic.
        auto a_trace = actor_.forward_batch(s, n);
        const auto& a_pred = actor_.output_of(a_trace);
        std::vector<double> sa_pred(n * (sdim + adim));
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(s.data() + i * sdim, sdim, sa_pred.data() + i * (sdim + adim));
            std::copy_n(a_pred.data() + i * adim, adim, sa_pred.data() + i * (sdim + adim) + sdim);
        }
        auto qa_trace = critic_.forward_batch(std::move(sa_pred), n);
        std::vector<double> dout(n, -1.0 / static_cast<double>(n));  // minimize -J
        Mlp::Gradients scratch;
        scratch.init(critic_);
        std::vector<double> dinput;
        critic_.backward(qa_trace, std::move(dout), scratch, &dinput);
        std::vector<double> dact(n * adim);
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(dinput.data() + i * (sdim + adim) + sdim, adim, dact.data() + i * adim);
        Mlp::Gradients agrads;
        agrads.init(actor_);
        actor_.backward(a_trace, std::move(dact), agrads);
        adam_actor_.apply(actor_, agrads, params_.actor_lr);

        ++grad_steps_;
        if (grad_steps_ % params_.target_update_period == 0) {
            critic_target_.soft_update_from(critic_, params_.soft_update_rate);
            actor_target_.soft_update_from(actor_, params_.soft_update_rate);
        }
    }

    const DdpgSetup& setup_;
    DdpgParams params_;
    Rng rng_;
    Featurizer feat_;
    ReplayBuffer buffer_;
    std::size_t batch_ = 0;
    std::size_t replay_h_ = 1;
    std::size_t cap_ = 0;
    std::vector<double> sigma_;
    Mlp actor_, critic_, actor_target_, critic_target_;
    AdamState adam_actor_, adam_critic_;
    std::optional<PotentialTable> potential_;
    RewardWindow window_;
    long grad_steps_ = 0;
    DdpgResult result_;
};

}  // namespace

DdpgResult ddpg_train(const DdpgSetup& setup, const DdpgParams& params, std::uint64_t seed) {
    DdpgTrainer trainer(setup, params, seed);
    return trainer.run();
}

double policy_average_reward(const DdpgSetup& setup, const Mlp* actor, long steps,
                             long episode_step_cap, Rng& rng) {
    std::vector<AttachedMachine> machines{setup.machine};
    Featurizer feat(*setup.env, *setup.machine.prm);
    const auto& box = setup.env->actions().box;
    ProductState state = product_initial(*setup.env, machines);
    long episode_steps = 0;
    double total = 0.0;
    for (long step = 0; step < steps; ++step) {
        std::vector<double> a;
        if (actor) {
            a = actor->forward(feat.state(state.x, state.machines[0]));
        } else {
            for (const auto& [lo, hi] : box) a.push_back(rng.uniform(lo, hi));
        }
        const auto res = product_step(*setup.env, machines, state, Action::continuous(a), rng);
        total += res.reward;
        ++episode_steps;
        if (res.done || episode_steps >= episode_step_cap) {
            state = product_initial(*setup.env, machines);
            episode_steps = 0;
        } else {
            state = res.state;
        }
    }
    return total / static_cast<double>(steps);
}

}  // namespace prmrl
