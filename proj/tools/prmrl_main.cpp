#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prmrl/harness.hpp"

namespace {

int cmd_validate(const std::string& path) {
    const auto doc = prmrl::SourceDocument::from_file(path);
    const auto parsed = prmrl::parse_prm(doc);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) std::cerr << path << ": " << d.str() << "\n";
        return 1;
    }
    const auto issues = prmrl::validate_prm(*parsed.machine);
    bool bad = false;
    for (const auto& d : issues) {
        std::cerr << path << ": " << d.str() << "\n";
        bad = bad || d.severity == prmrl::Diagnostic::Severity::Error;
    }
    if (bad) return 1;
    std::cout << path << ": ok (" << parsed.machine->mode_count() << " modes, "
              << parsed.machine->psi_dim() << " continuous variables)\n";
    return 0;
}

int cmd_train(const std::string& config_path) {
    const auto config = prmrl::ExperimentConfig::from_json_file(config_path);
    const auto result = prmrl::run_experiment(config);
    int failures = 0;
    for (const auto& t : result.trials) failures += t.failed ? 1 : 0;
    std::cout << "wrote " << (result.output_dir / "metrics.csv").string() << " ("
              << result.trials.size() - failures << "/" << result.trials.size()
              << " trials completed)\n";
    if (failures == static_cast<int>(result.trials.size()))
        throw prmrl::ConfigError("every trial failed");
    return 0;
}

int cmd_oracle(const std::string& config_path) {
    const auto config = prmrl::ExperimentConfig::from_json_file(config_path);
    const auto report = prmrl::oracle_product_vi(config);
    nlohmann::json j{{"value_at_initial", report.value_at_initial},
                     {"states", report.states},
                     {"actions", report.actions},
                     {"shaping_invariant", report.shaping_invariant}};
    std::cout << j.dump(2) << "\n";
    std::ofstream out(std::filesystem::path(config.output_dir) / "oracle.json");
    if (out) out << j.dump(2) << "\n";
    return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& output) {
    std::ifstream in(metrics_path);
    if (!in) throw prmrl::ConfigError("cannot open " + metrics_path);
    std::string header;
    std::getline(in, header);
    std::vector<prmrl::TrialSeries> trials;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw prmrl::ConfigError("malformed metrics row: " + line);
        const long step = std::stol(line.substr(0, c1));
        const int trial = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        const double value = std::stod(line.substr(c2 + 1));
        while (static_cast<int>(trials.size()) <= trial) {
            trials.push_back({static_cast<int>(trials.size()), {}, 0.0, false, ""});
        }
        trials[static_cast<std::size_t>(trial)].points.push_back({step, value});
    }
    const auto rows = prmrl::aggregate_percentiles(trials);
    std::ofstream out(output);
    if (!out) throw prmrl::ConfigError("cannot write " + output);
    out << prmrl::render_curve_svg(rows, metrics_path);
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_heatmap(const std::string& run_dir, const std::string& mode, const std::string& svg_out) {
    namespace fs = std::filesystem;
    const auto meta_path = fs::path(run_dir) / "metadata.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw prmrl::ConfigError("cannot open " + meta_path.string());
    std::string text((std::istreambuf_iterator<char>(meta_in)), std::istreambuf_iterator<char>());
    const auto config = prmrl::ExperimentConfig::from_json_text(text, run_dir);
    if (config.is_deep()) throw prmrl::ConfigError("heatmaps need a tabular run");

    const auto assets = prmrl::load_assets(config);
    const auto* office = dynamic_cast<const prmrl::OfficeEnv*>(assets.env.get());
    if (!office) throw prmrl::ConfigError("heatmaps need the office environment");
    const auto q = prmrl::load_qtable((fs::path(run_dir) / "qtable.bin").string());
    const auto grid = prmrl::export_heatmap(*q, *office, assets.disc_ptrs(), mode);

    const auto csv_path = fs::path(run_dir) / ("heatmap_" + mode + ".csv");
    std::ofstream csv(csv_path);
    if (!csv) throw prmrl::ConfigError("cannot write " + csv_path.string());
    csv << prmrl::heatmap_csv(grid);
    std::cout << "wrote " << csv_path.string() << "\n";
    if (!svg_out.empty()) {
        std::ofstream svg(svg_out);
        if (!svg) throw prmrl::ConfigError("cannot write " + svg_out);
        svg << prmrl::render_heatmap_svg(grid);
        std::cout << "wrote " << svg_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physics-informed reward machine toolkit"};
    app.require_subcommand(1);

    std::string machine_file, config_file, metrics_file, svg_file = "curve.svg";
    std::string run_dir, mode_name, heatmap_svg;

    auto* validate = app.add_subcommand("validate", "parse and validate a .prm machine");
    validate->add_option("file", machine_file, "machine file")->required();

    auto* train = app.add_subcommand("train", "run a training experiment from a config");
    train->add_option("--config", config_file, "experiment config (json)")->required();

    auto* oracle = app.add_subcommand("oracle", "exact product value iteration");
    oracle->add_option("--config", config_file, "experiment config (json)")->required();

    auto* plot = app.add_subcommand("plot", "render metrics.csv into an svg curve");
    plot->add_option("metrics", metrics_file, "metrics.csv path")->required();
    plot->add_option("-o,--output", svg_file, "output svg path");

    auto* heatmap = app.add_subcommand("heatmap", "max-Q heatmap of a tabular run");
    heatmap->add_option("--run", run_dir, "run output directory")->required();
    heatmap->add_option("--mode", mode_name, "machine mode name")->required();
    heatmap->add_option("--svg", heatmap_svg, "also render an svg raster");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(machine_file);
        if (train->parsed()) return cmd_train(config_file);
        if (oracle->parsed()) return cmd_oracle(config_file);
        if (plot->parsed()) return cmd_plot(metrics_file, svg_file);
        if (heatmap->parsed()) return cmd_heatmap(run_dir, mode_name, heatmap_svg);
    } catch (const prmrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
