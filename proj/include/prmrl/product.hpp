#pragma once

#include <optional>

#include "prmrl/discretize.hpp"
#include "prmrl/envs.hpp"

namespace prmrl {

// A machine wired to an environment: guard symbols are matched to the
// environment's propositions by name, everything else reads as absent.
// An optional rename map lets a machine symbol track a differently named
// environment event.
struct AttachedMachine {
    const PrmDefinition* prm = nullptr;
    std::vector<int> bit_map;  // machine bit -> env bit, or -1

    AttachedMachine() = default;
    AttachedMachine(const PrmDefinition& machine, const PropositionSet& env_props,
                    const std::vector<std::pair<std::string, std::string>>& renames = {});

    Label translate(Label env_label) const {
        Label out = 0;
        for (std::size_t bit = 0; bit < bit_map.size(); ++bit)
            if (bit_map[bit] >= 0 && has_bit(env_label, static_cast<std::size_t>(bit_map[bit])))
                out |= Label{1} << bit;
        return out;
    }
};

struct ProductState {
    std::vector<double> x;
    std::vector<HybridState> machines;
};

// One product transition, a 6-tuple.
struct Experience {
    std::vector<double> x;
    HybridState rho;
    Action u;
    double reward = 0.0;
    std::vector<double> x_next;
    HybridState rho_next;
};

struct ProductStepResult {
    ProductState state;
    double reward = 0.0;                  // average across attached machines
    std::vector<double> machine_rewards;  // per-machine rewards before averaging
    Label env_label = 0;                  // label of the successor env state
    bool done = false;                    // some machine reached its terminal set
};

ProductState product_initial(const EnvModel& env, const std::vector<AttachedMachine>& machines);

// Synchronous product step: sample the environment, read the label of the
// successor, and advance every attached machine. Terminal machines stay put
// and contribute zero reward.
ProductStepResult product_step(const EnvModel& env, const std::vector<AttachedMachine>& machines,
                               const ProductState& state, const Action& action, Rng& rng);

// The counterfactual experience set of one observed environment transition:
// the machine replays (x, u, x') from every non-terminal state of its
// discretization. When the set exceeds `cap`, a uniform sample without
// replacement is taken, always keeping the cell of `actual` (when given).
// Counterfactual states inherit the step counter of the actual state so
// k-referencing guards see the live clock.
std::vector<Experience> counterfactual_experiences(
    const EnvModel& env, const std::vector<double>& x, const Action& u,
    const std::vector<double>& x_next, const AttachedMachine& machine, const Discretization& disc,
    std::size_t cap, Rng& rng, const std::optional<HybridState>& actual = std::nullopt);

}  // namespace prmrl
