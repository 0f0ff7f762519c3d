#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prmrl/label.hpp"
#include "prmrl/flow.hpp"
#include "prmrl/rng.hpp"

namespace prmrl {

// Either a finite action list or a box of continuous actions.
struct ActionSpace {
    std::vector<std::string> names;                // finite case, for reporting
    std::vector<std::vector<double>> finite;       // finite case, action vectors
    Bounds box;                                    // continuous case

    bool is_finite() const { return !finite.empty(); }
    std::size_t count() const { return finite.size(); }
    std::size_t dim() const { return is_finite() ? finite.front().size() : box.size(); }
};

struct Action {
    int index = -1;                 // finite action id, -1 for continuous
    std::vector<double> value;      // continuous action vector

    static Action discrete(int i) { return Action{i, {}}; }
    static Action continuous(std::vector<double> v) { return Action{-1, std::move(v)}; }
};

// Additive Gaussian disturbance: scale * N(0, variance) per component.
// Disabling gives the deterministic skeleton.
struct NoiseSpec {
    double scale = 1.0;
    double variance = 1.0;
    bool enabled = true;

    double sample(Rng& rng) const {
        return enabled ? scale * rng.gaussian(0.0, std::sqrt(variance)) : 0.0;
    }
};

class EnvModel {
public:
    virtual ~EnvModel() = default;

    virtual const std::string& name() const = 0;
    virtual const PropositionSet& propositions() const = 0;
    virtual const ActionSpace& actions() const = 0;
    virtual std::vector<double> initial_state() const = 0;
    virtual std::vector<double> step(const std::vector<double>& x, const Action& u,
                                     Rng& rng) const = 0;
    virtual Label label_of(const std::vector<double>& x) const = 0;
    virtual Bounds state_bounds() const = 0;

    // Finite state enumeration, available for grid environments only.
    virtual std::optional<std::size_t> state_count() const { return std::nullopt; }
    virtual std::size_t state_index(const std::vector<double>&) const {
        throw ConfigError("environment " + name() + " is not enumerable");
    }
};

// --- office grid world ------------------------------------------------------

struct OfficeMap {
    int width = 0;
    int height = 0;
    std::string cells;  // row-major map characters

    char at(int row, int col) const { return cells[static_cast<std::size_t>(row) * width + col]; }
    bool wall(int row, int col) const {
        return row < 0 || row >= height || col < 0 || col >= width || at(row, col) == '#';
    }

    static OfficeMap parse(const std::string& text);
    static OfficeMap load(const std::string& path);
};

class OfficeEnv : public EnvModel {
public:
    enum Direction { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3 };

    explicit OfficeEnv(OfficeMap map);

    const std::string& name() const override { return name_; }
    const PropositionSet& propositions() const override { return props_; }
    const ActionSpace& actions() const override { return actions_; }
    std::vector<double> initial_state() const override;
    std::vector<double> step(const std::vector<double>& x, const Action& u,
                             Rng& rng) const override;
    Label label_of(const std::vector<double>& x) const override;
    Bounds state_bounds() const override;

    std::optional<std::size_t> state_count() const override { return cell_ids_.size(); }
    std::size_t state_index(const std::vector<double>& x) const override;

    const OfficeMap& map() const { return map_; }
    // Floor cells in enumeration order as (row, col) pairs.
    const std::vector<std::pair<int, int>>& floor_cells() const { return cell_ids_; }
    // Exact next-state distribution of one action, as (cell index, probability).
    std::vector<std::pair<std::size_t, double>> transition(std::size_t cell,
                                                           int action) const;

private:
    bool stationary(int row, int col) const {
        const char ch = map_.at(row, col);
        return ch == 'h' || ch == 't';
    }
    std::pair<int, int> move(int row, int col, int dir) const;

    std::string name_ = "office";
    OfficeMap map_;
    PropositionSet props_;
    ActionSpace actions_;
    int start_row_ = 0, start_col_ = 0;
    std::vector<std::pair<int, int>> cell_ids_;
    std::vector<int> index_of_cell_;  // row*width+col -> enumeration index or -1
};

// --- continuous benchmarks --------------------------------------------------

class TwoTankEnv : public EnvModel {
public:
    explicit TwoTankEnv(NoiseSpec noise = {0.01, 0.01, true});

    const std::string& name() const override { return name_; }
    const PropositionSet& propositions() const override { return props_; }
    const ActionSpace& actions() const override { return actions_; }
    std::vector<double> initial_state() const override { return {10.0, 10.0}; }
    std::vector<double> step(const std::vector<double>& x, const Action& u,
                             Rng& rng) const override;
    Label label_of(const std::vector<double>& x) const override;
    Bounds state_bounds() const override { return {{0, 100}, {0, 100}}; }

private:
    std::string name_ = "two_tank";
    PropositionSet props_;
    ActionSpace actions_;
    NoiseSpec noise_;
};

class FiveRoomEnv : public EnvModel {
public:
    explicit FiveRoomEnv(NoiseSpec noise = {0.01, 0.01, true});

    const std::string& name() const override { return name_; }
    const PropositionSet& propositions() const override { return props_; }
    const ActionSpace& actions() const override { return actions_; }
    std::vector<double> initial_state() const override { return {19, 19, 19, 19, 19}; }
    std::vector<double> step(const std::vector<double>& x, const Action& u,
                             Rng& rng) const override;
    Label label_of(const std::vector<double>& x) const override;
    Bounds state_bounds() const override { return Bounds(5, {15.0, 25.0}); }

private:
    std::string name_ = "five_room";
    PropositionSet props_;
    ActionSpace actions_;
    NoiseSpec noise_;
};

class FiveRoadEnv : public EnvModel {
public:
    explicit FiveRoadEnv(NoiseSpec noise = {0.7, 0.7, true});

    const std::string& name() const override { return name_; }
    const PropositionSet& propositions() const override { return props_; }
    const ActionSpace& actions() const override { return actions_; }
    std::vector<double> initial_state() const override { return {0.5, 5, 5, 5, 5}; }
    std::vector<double> step(const std::vector<double>& x, const Action& u,
                             Rng& rng) const override;
    Label label_of(const std::vector<double>& x) const override;
    // Densities may leave the nominal box; the bounds describe it anyway.
    Bounds state_bounds() const override { return Bounds(5, {0.0, 10.0}); }

private:
    std::string name_ = "five_road";
    PropositionSet props_;
    ActionSpace actions_;
    NoiseSpec noise_;
};

// 1-d drift environment: the state moves by the chosen action inside
// [0, 10], with the region [4, 6] labeled b.
class Toy1dEnv : public EnvModel {
public:
    explicit Toy1dEnv(NoiseSpec noise = {1.0, 0.0025, false});

    const std::string& name() const override { return name_; }
    const PropositionSet& propositions() const override { return props_; }
    const ActionSpace& actions() const override { return actions_; }
    std::vector<double> initial_state() const override { return {1.0}; }
    std::vector<double> step(const std::vector<double>& x, const Action& u,
                             Rng& rng) const override;
    Label label_of(const std::vector<double>& x) const override;
    Bounds state_bounds() const override { return {{0.0, 10.0}}; }

private:
    std::string name_ = "toy_1d";
    PropositionSet props_;
    ActionSpace actions_;
    NoiseSpec noise_;
};

struct EnvConfig {
    std::string name;
    std::string map_path;       // office only
    std::string map_text;       // inline alternative for tests
    bool noise_enabled = true;
};

std::unique_ptr<EnvModel> make_env(const EnvConfig& config);

}  // namespace prmrl
