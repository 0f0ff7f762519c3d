#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prmrl/harness.hpp"

namespace py = pybind11;
using namespace prmrl;

namespace {

PrmDefinition parse_or_throw(const std::string& text) {
    const auto result = parse_prm(SourceDocument::inline_text(text));
    if (!result.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : result.diagnostics) msg += "\n  " + d.str();
        throw ConfigError(msg);
    }
    return *result.machine;
}

std::vector<std::string> validate_text(const std::string& text) {
    const auto result = parse_prm(SourceDocument::inline_text(text));
    std::vector<std::string> out;
    for (const auto& d : result.diagnostics) out.push_back(d.str());
    if (result.ok())
        for (const auto& d : validate_prm(*result.machine)) out.push_back(d.str());
    return out;
}

}  // namespace

PYBIND11_MODULE(_prmrl, m) {
    m.doc() = "physics-informed reward machine toolkit";

    py::register_exception<ConfigError>(m, "PrmConfigError");
    py::register_exception<TotalityError>(m, "PrmTotalityError");

    py::class_<HybridState>(m, "HybridState")
        .def(py::init<>())
        .def_readwrite("mode", &HybridState::mode)
        .def_readwrite("psi", &HybridState::psi)
        .def_readwrite("step", &HybridState::step)
        .def("__repr__", [](const HybridState& s) {
            std::string out = "HybridState(mode=" + std::to_string(s.mode) + ", psi=[";
            for (std::size_t i = 0; i < s.psi.size(); ++i)
                out += (i ? ", " : "") + std::to_string(s.psi[i]);
            return out + "], step=" + std::to_string(s.step) + ")";
        });

    py::class_<PrmDefinition>(m, "Machine")
        .def_property_readonly("name", [](const PrmDefinition& p) { return p.name; })
        .def_property_readonly("mode_count", &PrmDefinition::mode_count)
        .def_property_readonly("psi_dim", &PrmDefinition::psi_dim)
        .def_property_readonly("mode_names",
                               [](const PrmDefinition& p) {
                                   std::vector<std::string> out;
                                   for (const auto& mo : p.modes) out.push_back(mo.name);
                                   return out;
                               })
        .def_property_readonly("alphabet",
                               [](const PrmDefinition& p) { return p.props.symbols(); })
        .def("initial_state", [](const PrmDefinition& p) { return initial_state(p); })
        .def("is_terminal",
             [](const PrmDefinition& p, const HybridState& s) { return is_terminal(p, s); })
        .def(
            "step",
            [](const PrmDefinition& p, const HybridState& s,
               const std::vector<std::string>& label) {
                const auto res = prm_step(p, s, p.props.label_of(label));
                return py::make_tuple(res.state, res.reward);
            },
            py::arg("state"), py::arg("label"))
        .def("serialize", [](const PrmDefinition& p) { return serialize_prm(p); });

    m.def("parse", &parse_or_throw, py::arg("text"), "Parse a .prm source string.");
    m.def("parse_file", [](const std::string& path) { return load_prm_file(path); });
    m.def("validate", &validate_text, py::arg("text"),
          "Diagnostics for a .prm source string; empty means valid.");

    m.def(
        "flow_step",
        [](const std::vector<double>& matrix, const std::vector<double>& offset,
           const std::vector<double>& psi, double dt) {
            return flow_step(FlowSpec{matrix, offset}, psi, dt);
        },
        py::arg("matrix"), py::arg("offset"), py::arg("psi"), py::arg("dt"),
        "Advance the affine flow dpsi = (A psi + b) dk by dt.");

    m.def(
        "value_iteration",
        [](const PrmDefinition& p, const std::vector<double>& grid, double lam, double tol) {
            const auto disc = discretize_prm(p, grid);
            const auto table = value_iteration(disc, lam, {tol});
            std::vector<std::pair<int, double>> out;
            for (std::size_t id = 0; id < disc.size(); ++id)
                out.emplace_back(disc.state(id).mode, table.potential(id));
            return out;
        },
        py::arg("machine"), py::arg("grid"), py::arg("lambda_") = 0.9, py::arg("tol") = 1e-6,
        "Shaping potentials per discretized state as (mode, potential) pairs.");

    m.def(
        "counterfactual_count",
        [](const PrmDefinition& p, const std::vector<double>& grid) {
            const auto disc = discretize_prm(p, grid);
            return disc.nonterminal_ids().size();
        },
        py::arg("machine"), py::arg("grid"),
        "Size of the counterfactual experience set per environment step.");

    m.def(
        "env_step",
        [](const std::string& name, const std::vector<double>& x,
           const std::vector<double>& action, std::uint64_t seed, bool noise) {
            EnvConfig cfg;
            cfg.name = name;
            cfg.noise_enabled = noise;
            const auto env = make_env(cfg);
            Rng rng(seed);
            Action u = env->actions().is_finite()
                           ? Action::discrete(static_cast<int>(action.at(0)))
                           : Action::continuous(action);
            const auto next = env->step(x, u, rng);
            const auto label = env->label_of(next);
            return py::make_tuple(next, env->propositions().symbols_of(label));
        },
        py::arg("env"), py::arg("state"), py::arg("action"), py::arg("seed") = 0,
        py::arg("noise") = false,
        "One environment step; finite-action envs take the action index.");

    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& base_dir) {
            const auto config = ExperimentConfig::from_json_text(config_json, base_dir);
            const auto result = run_experiment(config);
            py::dict out;
            out["output_dir"] = result.output_dir.string();
            py::list rows;
            for (const auto& r : result.aggregate) {
                py::dict row;
                row["step"] = r.step;
                row["p25"] = r.p25;
                row["median"] = r.median;
                row["p75"] = r.p75;
                rows.append(row);
            }
            out["aggregate"] = rows;
            return out;
        },
        py::arg("config_json"), py::arg("base_dir") = ".",
        "Run a full experiment from a JSON config string.");

    m.def("oracle_value", [](const std::string& config_json, const std::string& base_dir) {
        const auto config = ExperimentConfig::from_json_text(config_json, base_dir);
        const auto report = oracle_product_vi(config);
        py::dict out;
        out["value_at_initial"] = report.value_at_initial;
        out["states"] = report.states;
        out["shaping_invariant"] = report.shaping_invariant;
        return out;
    });
}
