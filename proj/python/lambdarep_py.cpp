#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lambdarep/acceptance.hpp"
#include "lambdarep/cli.hpp"
#include "lambdarep/error.hpp"
#include "lambdarep/experiments.hpp"
#include "lambdarep/oracle.hpp"

namespace py = pybind11;
using namespace lambdarep;

namespace {

Environment load(const std::string& path, std::optional<double> gamma) {
  EnvOverrides o;
  o.gamma = gamma;
  return build_environment(load_env_config(path), o);
}

Policy policy_or_uniform(const TabularMDP& mdp, const std::optional<Matrix>& probs) {
  return probs ? Policy(*probs) : Policy::uniform(mdp.n_states(), mdp.n_actions());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lambda representations for diminishing rewards";

  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<TabularMDP>(m, "TabularMDP")
      .def(py::init<Matrix, int, double, Vector>(), py::arg("transitions"), py::arg("n_actions"), py::arg("gamma"),
           py::arg("start_distribution"))
      .def_property_readonly("n_states", &TabularMDP::n_states)
      .def_property_readonly("n_actions", &TabularMDP::n_actions)
      .def_property_readonly("gamma", &TabularMDP::gamma)
      .def_property_readonly("transitions", &TabularMDP::transitions)
      .def_property_readonly("start_distribution", &TabularMDP::start_distribution);

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("name", [](const Environment& e) { return e.config.name; })
      .def_property_readonly("mdp", &Environment::mdp, py::return_value_policy::reference_internal)
      .def_property_readonly("r_bar", [](const Environment& e) { return e.spec.r_bar; })
      .def_property_readonly("decay", [](const Environment& e) { return e.spec.lambda; })
      .def_property_readonly("horizon", [](const Environment& e) { return e.config.horizon; })
      .def_property_readonly("goal_states", [](const Environment& e) { return e.world.goal_states; })
      .def("state_at", [](const Environment& e, int r, int c) { return e.world.state_at(r, c); })
      .def("coords", [](const Environment& e, int s) { return e.world.coords(s); });

  m.def("load_environment", &load, py::arg("path"), py::arg("gamma") = std::nullopt,
        "Load a JSON environment config.");
  m.def("default_config_dir", &default_config_dir);

  m.def("policy_matrix", [](const TabularMDP& mdp, const std::optional<Matrix>& probs) {
    return policy_transition_matrix(mdp, policy_or_uniform(mdp, probs));
  }, py::arg("mdp"), py::arg("policy") = std::nullopt);

  m.def(
      "solve_lambda_r",
      [](const Matrix& P, double gamma, const Vector& lambda, double tol, int max_iters) {
        SolveOptions o;
        o.tol = tol;
        o.max_iters = max_iters;
        const LambdaR r = solve_lambda_r(P, gamma, lambda, o);
        py::dict d;
        d["phi"] = r.phi;
        d["iterations"] = r.iterations;
        d["residuals"] = r.residuals;
        d["error_bound"] = r.error_bound;
        return d;
      },
      py::arg("P"), py::arg("gamma"), py::arg("decay"), py::arg("tol") = 5e-2, py::arg("max_iters") = 100000,
      "Iterate the lambda-representation operator from (1 - lambda) I.");
  m.def("exact_lambda_r", &exact_lambda_r, py::arg("P"), py::arg("gamma"), py::arg("decay"));
  m.def("successor_representation", &successor_representation, py::arg("P"), py::arg("gamma"));
  m.def("closed_form", &closed_form, py::arg("case_id"), py::arg("gamma"), py::arg("decay"));

  m.def(
      "mc_lambda_r",
      [](const TabularMDP& mdp, const Vector& lambda, int start, int rollouts, std::uint64_t seed,
         const std::optional<Matrix>& probs) {
        const McEstimate e = mc_lambda_r(mdp, policy_or_uniform(mdp, probs), lambda, start, rollouts, 0, seed);
        return py::make_tuple(e.mean, e.se, e.truncation_bias);
      },
      py::arg("mdp"), py::arg("decay"), py::arg("start"), py::arg("rollouts"), py::arg("seed") = 0,
      py::arg("policy") = std::nullopt, "Monte-Carlo row Phi(start, .) as (mean, se, truncation_bias).");

  m.def(
      "q_lambda_learning",
      [](const Environment& env, double lambda, int episodes, double alpha, std::uint64_t seed) {
        LearnerConfig cfg;
        cfg.lambda = uniform_lambda(env.mdp().n_states(), lambda);
        cfg.episodes = episodes;
        cfg.alpha = alpha;
        cfg.horizon = env.config.horizon;
        cfg.seed = seed;
        const QLearnResult r = q_lambda_learning(env.mdp(), env.spec, cfg);
        return py::make_tuple(r.returns, r.table.phi);
      },
      py::arg("env"), py::arg("decay"), py::arg("episodes") = 500, py::arg("alpha") = 0.1, py::arg("seed") = 0,
      "Online Q_lambda-learning; returns (episode returns, Phi table).");

  m.def(
      "gpi_returns",
      [](const Environment& env, const std::vector<double>& lambdas, int episodes, int repetitions,
         std::uint64_t seed) {
        GpiSweepOptions o;
        o.lambdas = lambdas;
        o.episodes = episodes;
        o.repetitions = repetitions;
        o.seed = seed;
        py::dict d;
        for (const auto& e : gpi_sweep(env, o)) d[py::float_(e.lambda_hat)] = e.undiscounted;
        return d;
      },
      py::arg("env"), py::arg("decays"), py::arg("episodes") = 50, py::arg("repetitions") = 3, py::arg("seed") = 0,
      "GPE+GPI undiscounted returns keyed by the agent's decay guess.");

  m.def("estimate_decay", &estimate_lambda, py::arg("pairs"));

  m.def(
      "run_acceptance",
      [](std::uint64_t seed, const std::vector<int>& only) {
        AcceptanceOptions o;
        o.seed = seed;
        o.only = only;
        py::list out;
        for (const auto& r : run_acceptance(o).results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 7, py::arg("only") = std::vector<int>{});

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command line; returns (exit code, stdout, stderr).");

  m.attr("__version__") = library_version();
}
