#pragma once

#include <filesystem>

#include "prmrl/ddpg.hpp"
#include "prmrl/dsl.hpp"
#include "prmrl/oracle.hpp"
#include "prmrl/tabular.hpp"

namespace prmrl {

struct MachineRef {
    std::string path;
    std::vector<std::pair<std::string, std::string>> renames;  // machine symbol -> env symbol
    std::vector<double> grid;                                  // discretization widths
};

struct ExperimentConfig {
    EnvConfig env;
    std::vector<MachineRef> machines;
    std::string algorithm = "ql";  // ql, ql_rs, prme, prme_rs, ddpg, ddpg_rs,
                                   // ddpg_prme, ddpg_prme_rs
    int trials = 1;
    std::uint64_t base_seed = 1;
    std::vector<double> env_grid;  // tabular state grid for continuous environments
    TabularParams tabular;
    DdpgParams ddpg;
    std::string output_dir = "run_output";
    int jobs = 1;

    bool is_deep() const { return algorithm.rfind("ddpg", 0) == 0; }

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text,
                                           const std::string& base_dir = ".");
    std::string resolved_json() const;
};

// Immutable per-run assets shared by all trials.
struct ExperimentAssets {
    std::unique_ptr<EnvModel> env;
    std::vector<PrmDefinition> prms;
    std::vector<std::unique_ptr<Discretization>> discs;
    std::vector<AttachedMachine> machines;

    std::vector<const Discretization*> disc_ptrs() const {
        std::vector<const Discretization*> out;
        for (const auto& d : discs) out.push_back(d.get());
        return out;
    }
};

ExperimentAssets load_assets(const ExperimentConfig& config);

struct ExperimentResult {
    std::vector<TrialSeries> trials;
    std::vector<AggregateRow> aggregate;
    std::filesystem::path output_dir;
};

// Runs the configured trials on a worker pool, writes metrics.csv,
// aggregate.csv, curve.svg, metadata.json and, per learner, qtable.bin or
// actor.bin/critic.bin from the first trial into the output directory.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Office-only exact solution of the enumerated product, the oracle behind
// the convergence and shaping acceptance checks.
struct OracleReport {
    double value_at_initial = 0.0;
    std::size_t states = 0;
    std::size_t actions = 0;
    bool shaping_invariant = true;
};
OracleReport oracle_product_vi(const ExperimentConfig& config);

// Max-Q per map cell at the chosen machine mode; walls come out as missing.
struct HeatmapGrid {
    int width = 0, height = 0;
    std::vector<double> values;    // row-major
    std::vector<bool> present;
};
HeatmapGrid export_heatmap(const QTable& q, const OfficeEnv& env,
                           const std::vector<const Discretization*>& discs,
                           const std::string& mode_name);
std::string heatmap_csv(const HeatmapGrid& grid);

// Self-contained SVG renderings.
std::string render_curve_svg(const std::vector<AggregateRow>& rows, const std::string& title);
std::string render_heatmap_svg(const HeatmapGrid& grid);

// metrics.csv (long form) and aggregate.csv writers used by run_experiment.
std::string metrics_csv(const std::vector<TrialSeries>& trials);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

void save_qtable(const QTable& q, const std::string& path);
std::unique_ptr<QTable> load_qtable(const std::string& path);

}  // namespace prmrl
