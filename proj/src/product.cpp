#include "prmrl/product.hpp"

#include <algorithm>

namespace prmrl {

AttachedMachine::AttachedMachine(const PrmDefinition& machine, const PropositionSet& env_props,
                                 const std::vector<std::pair<std::string, std::string>>& renames)
    : prm(&machine) {
    bit_map.assign(machine.props.size(), -1);
    for (std::size_t bit = 0; bit < machine.props.size(); ++bit) {
        std::string env_name = machine.props.name(bit);
        for (const auto& [from, to] : renames)
            if (from == env_name) {
                env_name = to;
                break;
            }
        if (auto env_bit = env_props.find(env_name))
            bit_map[bit] = static_cast<int>(*env_bit);
    }
}

ProductState product_initial(const EnvModel& env, const std::vector<AttachedMachine>& machines) {
    ProductState s;
    s.x = env.initial_state();
    s.machines.reserve(machines.size());
    for (const auto& m : machines) s.machines.push_back(initial_state(*m.prm));
    return s;
}

ProductStepResult product_step(const EnvModel& env, const std::vector<AttachedMachine>& machines,
                               const ProductState& state, const Action& action, Rng& rng) {
    if (machines.empty() || state.machines.size() != machines.size())
        throw ConfigError("product_step needs one machine state per attached machine");
    ProductStepResult out;
    out.state.x = env.step(state.x, action, rng);
    out.env_label = env.label_of(out.state.x);
    out.state.machines.reserve(machines.size());
    out.machine_rewards.reserve(machines.size());
    double total = 0.0;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        const auto res =
            prm_step(*machines[i].prm, state.machines[i], machines[i].translate(out.env_label));
        total += res.reward;
        out.machine_rewards.push_back(res.reward);
        out.done = out.done || is_terminal(*machines[i].prm, res.state);
        out.state.machines.push_back(std::move(res.state));
    }
    out.reward = total / static_cast<double>(machines.size());
    return out;
}

std::vector<Experience> counterfactual_experiences(
    const EnvModel& env, const std::vector<double>& x, const Action& u,
    const std::vector<double>& x_next, const AttachedMachine& machine, const Discretization& disc,
    std::size_t cap, Rng& rng, const std::optional<HybridState>& actual) {
    if (cap == 0) throw ConfigError("counterfactual cap must be at least 1");
    const auto& pool = disc.nonterminal_ids();
    if (pool.empty()) throw ConfigError("machine has no non-terminal discretized states");

    const Label label = machine.translate(env.label_of(x_next));
    const long k = actual ? actual->step : 0;

    std::vector<std::size_t> selected;
    if (pool.size() <= cap) {
        selected = pool;
    } else {
        // Uniform sample without replacement, always keeping the cell that
        // holds the actual machine state.
        std::vector<std::size_t> shuffled = pool;
        for (std::size_t i = 0; i + 1 < shuffled.size(); ++i) {
            const std::size_t j = i + rng.index(shuffled.size() - i);
            std::swap(shuffled[i], shuffled[j]);
        }
        shuffled.resize(cap);
        if (actual) {
            const std::size_t actual_id = disc.id_of(*actual);
            if (!disc.terminal(actual_id) &&
                std::find(shuffled.begin(), shuffled.end(), actual_id) == shuffled.end())
                shuffled.back() = actual_id;
        }
        selected = std::move(shuffled);
    }

    std::vector<Experience> out;
    out.reserve(selected.size());
    for (std::size_t id : selected) {
        const HybridState from = disc.hybrid(id, k);
        const auto res = prm_step(*machine.prm, from, label);
        Experience e;
        e.x = x;
        e.rho = from;
        e.u = u;
        e.reward = res.reward;
        e.x_next = x_next;
        e.rho_next = res.state;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace prmrl
