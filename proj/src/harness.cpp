#include "prmrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace prmrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).string();
}

void parse_tabular(const json& j, TabularParams& p) {
    p.lambda = j.value("lambda", p.lambda);
    p.kappa = j.value("kappa", p.kappa);
    p.epsilon = j.value("epsilon", p.epsilon);
    p.optimistic_init = j.value("optimistic_init", p.optimistic_init);
    p.counterfactual_cap = j.value("counterfactual_cap", p.counterfactual_cap);
    p.shaping_tol = j.value("shaping_tol", p.shaping_tol);
}

void parse_ddpg(const json& j, DdpgParams& p) {
    p.lambda = j.value("lambda", p.lambda);
    p.actor_lr = j.value("actor_lr", p.actor_lr);
    p.critic_lr = j.value("critic_lr", p.critic_lr);
    p.soft_update_rate = j.value("soft_update_rate", p.soft_update_rate);
    p.target_update_period = j.value("target_update_period", p.target_update_period);
    if (j.contains("hidden")) p.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    p.batch_scale = j.value("batch_scale", p.batch_scale);
    p.batch_cap = j.value("batch_cap", p.batch_cap);
    p.buffer_scale = j.value("buffer_scale", p.buffer_scale);
    p.noise_sigma_frac = j.value("noise_sigma", p.noise_sigma_frac);
    p.warmup = j.value("warmup", p.warmup);
    p.counterfactual_cap = j.value("counterfactual_cap", p.counterfactual_cap);
    p.shaping_tol = j.value("shaping_tol", p.shaping_tol);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text, fs::path(path).parent_path().string());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        const auto& je = j.at("env");
        c.env.name = je.at("name").get<std::string>();
        c.env.map_path = resolve_path(base_dir, je.value("map", ""));
        c.env.noise_enabled = je.value("noise", true);

        for (const auto& jm : j.at("machines")) {
            MachineRef ref;
            if (jm.is_string()) {
                ref.path = resolve_path(base_dir, jm.get<std::string>());
            } else {
                ref.path = resolve_path(base_dir, jm.at("path").get<std::string>());
                if (jm.contains("rename"))
                    for (const auto& [from, to] : jm.at("rename").items())
                        ref.renames.emplace_back(from, to.get<std::string>());
                if (jm.contains("grid")) ref.grid = jm.at("grid").get<std::vector<double>>();
            }
            c.machines.push_back(std::move(ref));
        }

        c.algorithm = j.value("algorithm", c.algorithm);
        c.trials = j.value("trials", c.trials);
        c.base_seed = j.value("base_seed", c.base_seed);
        if (j.contains("env_grid")) c.env_grid = j.at("env_grid").get<std::vector<double>>();
        c.output_dir = resolve_path(base_dir, j.value("output_dir", c.output_dir));
        c.jobs = j.value("jobs", c.jobs);

        const long steps = j.value("max_training_steps", 50000L);
        const long cap = j.value("episode_step_cap", 1000L);
        const long window = j.value("metric_window", 100L);
        const long every = j.value("checkpoint_every", 100L);
        for (auto* base : {&c.tabular.max_training_steps, &c.ddpg.max_training_steps})
            *base = steps;
        c.tabular.episode_step_cap = c.ddpg.episode_step_cap = cap;
        c.tabular.metric_window = c.ddpg.metric_window = window;
        c.tabular.checkpoint_every = c.ddpg.checkpoint_every = every;
        if (j.contains("tabular")) parse_tabular(j.at("tabular"), c.tabular);
        if (j.contains("ddpg")) parse_ddpg(j.at("ddpg"), c.ddpg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }

    static const std::vector<std::string> algos{"ql",   "ql_rs",   "prme",      "prme_rs",
                                                "ddpg", "ddpg_rs", "ddpg_prme", "ddpg_prme_rs"};
    if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end())
        throw ConfigError("unknown algorithm '" + c.algorithm + "'");
    if (c.trials < 1) throw ConfigError("trials must be at least 1");
    if (c.machines.empty()) throw ConfigError("config needs at least one machine");

    c.tabular.use_prme = c.algorithm == "prme" || c.algorithm == "prme_rs";
    c.tabular.use_shaping = c.algorithm == "ql_rs" || c.algorithm == "prme_rs";
    c.ddpg.use_prme = c.algorithm == "ddpg_prme" || c.algorithm == "ddpg_prme_rs";
    c.ddpg.use_shaping = c.algorithm == "ddpg_rs" || c.algorithm == "ddpg_prme_rs";
    return c;
}

std::string ExperimentConfig::resolved_json() const {
    json j;
    j["env"] = {{"name", env.name}, {"map", env.map_path}, {"noise", env.noise_enabled}};
    j["machines"] = json::array();
    for (const auto& m : machines) {
        json jm{{"path", m.path}, {"grid", m.grid}};
        json renames = json::object();
        for (const auto& [from, to] : m.renames) renames[from] = to;
        jm["rename"] = renames;
        j["machines"].push_back(jm);
    }
    j["algorithm"] = algorithm;
    j["trials"] = trials;
    j["base_seed"] = base_seed;
    j["env_grid"] = env_grid;
    j["output_dir"] = output_dir;
    j["jobs"] = jobs;
    const auto& active = is_deep() ? ddpg.max_training_steps : tabular.max_training_steps;
    j["max_training_steps"] = active;
    j["episode_step_cap"] = is_deep() ? ddpg.episode_step_cap : tabular.episode_step_cap;
    j["metric_window"] = is_deep() ? ddpg.metric_window : tabular.metric_window;
    j["checkpoint_every"] = is_deep() ? ddpg.checkpoint_every : tabular.checkpoint_every;
    j["percentile_method"] = "linear interpolation between order statistics";
    j["tabular"] = {{"lambda", tabular.lambda},
                    {"kappa", tabular.kappa},
                    {"epsilon", tabular.epsilon},
                    {"optimistic_init", tabular.optimistic_init},
                    {"use_prme", tabular.use_prme},
                    {"use_shaping", tabular.use_shaping},
                    {"counterfactual_cap", tabular.counterfactual_cap},
                    {"shaping_tol", tabular.shaping_tol}};
    j["ddpg"] = {{"lambda", ddpg.lambda},
                 {"actor_lr", ddpg.actor_lr},
                 {"critic_lr", ddpg.critic_lr},
                 {"soft_update_rate", ddpg.soft_update_rate},
                 {"target_update_period", ddpg.target_update_period},
                 {"hidden", ddpg.hidden},
                 {"batch_scale", ddpg.batch_scale},
                 {"batch_cap", ddpg.batch_cap},
                 {"buffer_scale", ddpg.buffer_scale},
                 {"noise_sigma", ddpg.noise_sigma_frac},
                 {"warmup", ddpg.warmup},
                 {"use_prme", ddpg.use_prme},
                 {"use_shaping", ddpg.use_shaping},
                 {"counterfactual_cap", ddpg.counterfactual_cap},
                 {"shaping_tol", ddpg.shaping_tol}};
    return j.dump(2);
}

ExperimentAssets load_assets(const ExperimentConfig& config) {
    ExperimentAssets a;
    a.env = make_env(config.env);
    a.prms.reserve(config.machines.size());
    for (const auto& ref : config.machines) a.prms.push_back(load_prm_file(ref.path));
    for (std::size_t i = 0; i < a.prms.size(); ++i) {
        const auto& ref = config.machines[i];
        std::vector<double> grid = ref.grid;
        if (grid.empty()) {
            // Default: one cell per dimension, machine modes only.
            for (const auto& [lo, hi] : a.prms[i].psi_bounds) grid.push_back(hi - lo > 0 ? hi - lo : 1.0);
        }
        a.discs.push_back(std::make_unique<Discretization>(a.prms[i], grid));
        a.machines.emplace_back(a.prms[i], a.env->propositions(), ref.renames);
    }
    return a;
}

std::string metrics_csv(const std::vector<TrialSeries>& trials) {
    std::string out = "step,trial,avg_reward\n";
    for (const auto& t : trials) {
        if (t.failed) continue;
        for (const auto& p : t.points) {
            out += std::to_string(p.step);
            out += ',';
            out += std::to_string(t.trial);
            out += ',';
            out += format_double(p.value);
            out += '\n';
        }
    }
    return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "step,p25,median,p75\n";
    for (const auto& r : rows) {
        out += std::to_string(r.step);
        out += ',';
        out += format_double(r.p25);
        out += ',';
        out += format_double(r.median);
        out += ',';
        out += format_double(r.p75);
        out += '\n';
    }
    return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

TrialSeries run_one_trial(const ExperimentConfig& config, const ExperimentAssets& assets,
                          int trial, std::unique_ptr<QTable>* qtable_out, DdpgResult* ddpg_out) {
    TrialSeries series;
    series.trial = trial;
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(trial);
        if (config.is_deep()) {
            if (assets.machines.size() != 1)
                throw ConfigError("the deep learner takes exactly one machine");
            DdpgSetup setup{assets.env.get(), assets.machines[0], assets.discs[0].get()};
            auto result = ddpg_train(setup, config.ddpg, seed);
            series.points = std::move(result.metrics);
            if (ddpg_out) *ddpg_out = std::move(result);
        } else {
            TabularSetup setup;
            setup.env = assets.env.get();
            setup.machines = assets.machines;
            setup.discs = assets.disc_ptrs();
            setup.env_grid = config.env_grid;
            auto result = train_tabular(setup, config.tabular, seed);
            series.points = std::move(result.metrics);
            if (qtable_out) *qtable_out = std::move(result.q);
        }
    } catch (const std::exception& e) {
        series.failed = true;
        series.error = e.what();
    }
    series.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return series;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto assets = load_assets(config);
    ExperimentResult result;
    result.output_dir = config.output_dir;
    fs::create_directories(result.output_dir);

    result.trials.resize(static_cast<std::size_t>(config.trials));
    std::unique_ptr<QTable> first_qtable;
    DdpgResult first_ddpg;

    const int jobs = std::max(1, config.jobs);
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int trial = next.fetch_add(1);
            if (trial >= config.trials) return;
            result.trials[static_cast<std::size_t>(trial)] =
                run_one_trial(config, assets, trial, trial == 0 ? &first_qtable : nullptr,
                              trial == 0 ? &first_ddpg : nullptr);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& t : result.trials)
        if (t.failed)
            std::cerr << "warning: trial " << t.trial << " failed: " << t.error << "\n";

    result.aggregate = aggregate_percentiles(result.trials);

    write_file(result.output_dir / "metrics.csv", metrics_csv(result.trials));
    write_file(result.output_dir / "aggregate.csv", aggregate_csv(result.aggregate));
    write_file(result.output_dir / "curve.svg",
               render_curve_svg(result.aggregate, config.env.name + " / " + config.algorithm));

    json meta = json::parse(config.resolved_json());
    json runtimes = json::array();
    for (const auto& t : result.trials)
        runtimes.push_back({{"trial", t.trial},
                            {"runtime_seconds", t.runtime_seconds},
                            {"failed", t.failed},
                            {"error", t.error}});
    meta["trial_runtimes"] = runtimes;
    write_file(result.output_dir / "metadata.json", meta.dump(2));

    if (!config.is_deep() && first_qtable) {
        save_qtable(*first_qtable, (result.output_dir / "qtable.bin").string());
    } else if (config.is_deep() && first_ddpg.actor.layer_count() > 0) {
        first_ddpg.actor.save((result.output_dir / "actor.bin").string());
        first_ddpg.critic.save((result.output_dir / "critic.bin").string());
    }
    return result;
}

OracleReport oracle_product_vi(const ExperimentConfig& config) {
    const auto assets = load_assets(config);
    const auto* office = dynamic_cast<const OfficeEnv*>(assets.env.get());
    if (!office) throw ConfigError("the product oracle needs the office environment");
    ProductOracle oracle(*office, assets.machines, assets.disc_ptrs(), config.tabular.lambda);
    OracleReport report;
    report.states = oracle.states();
    report.actions = oracle.actions();
    const auto v = oracle.optimal_values();
    report.value_at_initial = v[oracle.initial_state()];
    const auto plain = oracle.greedy_sets(v, false);
    const auto shaped = oracle.greedy_sets(oracle.optimal_values(true), true);
    report.shaping_invariant = plain == shaped;
    return report;
}

HeatmapGrid export_heatmap(const QTable& q, const OfficeEnv& env,
                           const std::vector<const Discretization*>& discs,
                           const std::string& mode_name) {
    if (discs.empty()) throw ConfigError("heatmap needs at least one machine");
    HeatmapGrid grid;
    grid.width = env.map().width;
    grid.height = env.map().height;
    grid.values.assign(static_cast<std::size_t>(grid.width) * grid.height, 0.0);
    grid.present.assign(grid.values.size(), false);

    // Machine states whose first-machine mode carries the requested name.
    const int mode = discs[0]->prm().find_mode(mode_name);
    if (mode < 0) throw ConfigError("unknown mode '" + mode_name + "'");
    std::size_t rest_total = 1;
    for (std::size_t i = 1; i < discs.size(); ++i) rest_total *= discs[i]->size();
    std::vector<std::size_t> machine_ids;
    for (std::size_t id = 0; id < discs[0]->size(); ++id)
        if (discs[0]->state(id).mode == mode)
            for (std::size_t rest = 0; rest < rest_total; ++rest)
                machine_ids.push_back(id * rest_total + rest);

    for (std::size_t cell = 0; cell < env.floor_cells().size(); ++cell) {
        const auto [row, col] = env.floor_cells()[cell];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t m : machine_ids) best = std::max(best, q.max_value(cell, m));
        grid.values[static_cast<std::size_t>(row) * grid.width + col] = best;
        grid.present[static_cast<std::size_t>(row) * grid.width + col] = true;
    }
    return grid;
}

std::string heatmap_csv(const HeatmapGrid& grid) {
    std::string out = "row,col,max_q\n";
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * grid.width + c;
            out += std::to_string(r);
            out += ',';
            out += std::to_string(c);
            out += ',';
            if (grid.present[i]) out += format_double(grid.values[i]);
            out += '\n';
        }
    return out;
}

void save_qtable(const QTable& q, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out.write("PRMQ", 4);
    const std::uint64_t dims[3] = {q.env_states(), q.machine_states(), q.actions()};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    for (std::size_t e = 0; e < q.env_states(); ++e)
        for (std::size_t m = 0; m < q.machine_states(); ++m)
            for (std::size_t a = 0; a < q.actions(); ++a) {
                const double v = q.get(e, m, a);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
}

std::unique_ptr<QTable> load_qtable(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PRMQ", 4) != 0)
        throw ConfigError(path + " is not a Q-table file");
    std::uint64_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    auto q = std::make_unique<QTable>(dims[0], dims[1], dims[2], 0.0);
    for (std::size_t e = 0; e < dims[0]; ++e)
        for (std::size_t m = 0; m < dims[1]; ++m)
            for (std::size_t a = 0; a < dims[2]; ++a) {
                double v = 0.0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                q->set(e, m, a, v);
            }
    if (!in) throw ConfigError(path + " is truncated");
    return q;
}

}  // namespace prmrl
