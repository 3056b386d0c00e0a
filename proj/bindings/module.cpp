// Copyright 2026 The cmgames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmg/config.hpp"
#include "cmg/domains.hpp"
#include "cmg/exploitability.hpp"
#include "cmg/occupancy.hpp"
#include "cmg/pgl.hpp"
#include "cmg/solvers.hpp"

namespace py = pybind11;

namespace {

cmg::AnnealType anneal_from_int(int type) {
  switch (type) {
    case 0: return cmg::AnnealType::kNone;
    case 1: return cmg::AnnealType::kType1;
    case 2: return cmg::AnnealType::kType2;
    case 3: return cmg::AnnealType::kType3;
    default: throw cmg::SpecError("anneal type must be 0, 1, 2, or 3");
  }
}

cmg::SolveOptions make_options(long iterations, double lr, int anneal,
                               double tau0, int stride, int eps_cadence) {
  cmg::SolveOptions options;
  options.iterations = iterations;
  options.adam.lr = lr;
  options.schedule.type = anneal_from_int(anneal);
  options.schedule.initial_tau = tau0;
  options.trace_stride = stride;
  options.eps_cadence = eps_cadence;
  return options;
}

}  // namespace

PYBIND11_MODULE(_cmgames, m) {
  m.doc() = "solvers and exploitability certification for convex Markov games";

  py::register_exception<cmg::SpecError>(m, "SpecError");
  py::register_exception<cmg::NumericError>(m, "NumericError");

  py::class_<cmg::GameSpec>(m, "GameSpec")
      .def(py::init<>())
      .def_readwrite("n_players", &cmg::GameSpec::n_players)
      .def_readwrite("n_states", &cmg::GameSpec::n_states)
      .def_readwrite("action_counts", &cmg::GameSpec::action_counts)
      .def_readwrite("transition", &cmg::GameSpec::transition)
      .def_readwrite("gamma", &cmg::GameSpec::gamma)
      .def_readwrite("mu0", &cmg::GameSpec::mu0)
      .def("joint_action_count", &cmg::GameSpec::joint_action_count);

  py::class_<cmg::UtilitySpec>(m, "UtilitySpec");

  py::class_<cmg::PolicyProfile>(m, "PolicyProfile")
      .def(py::init<>())
      .def_readwrite("policies", &cmg::PolicyProfile::policies);

  py::class_<cmg::LogitProfile>(m, "LogitProfile")
      .def(py::init<>())
      .def_readwrite("logits", &cmg::LogitProfile::logits);

  py::class_<cmg::ValidationReport>(m, "ValidationReport")
      .def_property_readonly("ok", &cmg::ValidationReport::ok)
      .def_readonly("issues", &cmg::ValidationReport::issues)
      .def("__str__", &cmg::ValidationReport::to_string);

  py::class_<cmg::LoadedGame>(m, "Game")
      .def_readwrite("spec", &cmg::LoadedGame::spec)
      .def_readwrite("utilities", &cmg::LoadedGame::utilities);

  py::class_<cmg::FlowMatrix>(m, "FlowMatrix")
      .def_readonly("A", &cmg::FlowMatrix::A)
      .def_readonly("rhs", &cmg::FlowMatrix::rhs);

  py::class_<cmg::LossReport>(m, "LossReport")
      .def_readonly("loss", &cmg::LossReport::loss)
      .def_readonly("player_norms", &cmg::LossReport::player_norms)
      .def_readonly("tau", &cmg::LossReport::tau)
      .def_readonly("bound", &cmg::LossReport::bound);

  py::class_<cmg::TracePoint>(m, "TracePoint")
      .def_readonly("iter", &cmg::TracePoint::iter)
      .def_readonly("tau", &cmg::TracePoint::tau)
      .def_readonly("loss", &cmg::TracePoint::loss)
      .def_readonly("bound", &cmg::TracePoint::bound)
      .def_readonly("epsilon", &cmg::TracePoint::epsilon)
      .def_readonly("wallclock_ms", &cmg::TracePoint::wallclock_ms);

  py::class_<cmg::AnnealEvent>(m, "AnnealEvent")
      .def_readonly("iter", &cmg::AnnealEvent::iter)
      .def_readonly("tau_before", &cmg::AnnealEvent::tau_before)
      .def_readonly("tau_after", &cmg::AnnealEvent::tau_after)
      .def_readonly("loss", &cmg::AnnealEvent::loss);

  py::class_<cmg::RunTrace>(m, "RunTrace")
      .def_readonly("points", &cmg::RunTrace::points)
      .def_readonly("anneal_events", &cmg::RunTrace::anneal_events);

  py::class_<cmg::SolveResult>(m, "SolveResult")
      .def_readonly("policy", &cmg::SolveResult::policy)
      .def_readonly("logits", &cmg::SolveResult::logits)
      .def_readonly("trace", &cmg::SolveResult::trace)
      .def_readonly("aborted", &cmg::SolveResult::aborted);

  py::class_<cmg::BestResponseResult>(m, "BestResponseResult")
      .def_readonly("mu", &cmg::BestResponseResult::mu)
      .def_readonly("utility", &cmg::BestResponseResult::utility)
      .def_readonly("gap", &cmg::BestResponseResult::gap)
      .def_readonly("iterations", &cmg::BestResponseResult::iterations)
      .def_readonly("certified", &cmg::BestResponseResult::certified);

  py::class_<cmg::ExploitabilityReport>(m, "ExploitabilityReport")
      .def_readonly("per_player", &cmg::ExploitabilityReport::per_player)
      .def_readonly("max_epsilon", &cmg::ExploitabilityReport::max_epsilon)
      .def_readonly("certified", &cmg::ExploitabilityReport::certified);

  py::class_<cmg::PerStateExploitability>(m, "PerStateExploitability")
      .def_readonly("per_state", &cmg::PerStateExploitability::per_state)
      .def_readonly("per_state_per_player",
                    &cmg::PerStateExploitability::per_state_per_player)
      .def_readonly("max_epsilon", &cmg::PerStateExploitability::max_epsilon)
      .def_readonly("certified", &cmg::PerStateExploitability::certified);

  py::class_<cmg::SolverDefaults>(m, "SolverDefaults")
      .def_readonly("lr", &cmg::SolverDefaults::lr)
      .def_property_readonly("anneal",
                             [](const cmg::SolverDefaults& d) {
                               return static_cast<int>(d.anneal);
                             })
      .def_readonly("iterations", &cmg::SolverDefaults::iterations)
      .def_readonly("initial_tau", &cmg::SolverDefaults::initial_tau)
      .def_readonly("gaussian_init", &cmg::SolverDefaults::gaussian_init);

  py::class_<cmg::DomainCatalogEntry>(m, "DomainCatalogEntry")
      .def_readonly("name", &cmg::DomainCatalogEntry::name)
      .def_readonly("description", &cmg::DomainCatalogEntry::description)
      .def_readonly("spec", &cmg::DomainCatalogEntry::spec)
      .def_readonly("utilities", &cmg::DomainCatalogEntry::utilities)
      .def_readonly("defaults", &cmg::DomainCatalogEntry::defaults);

  // game_core
  m.def("validate_spec", &cmg::validate_spec);
  m.def("load_spec", &cmg::load_spec, py::arg("document"));
  m.def("save_spec", &cmg::save_spec, py::arg("spec"), py::arg("utilities"));
  m.def("uniform_profile", &cmg::uniform_profile);

  // occupancy
  m.def("joint_kernel", &cmg::joint_kernel);
  m.def("state_occupancy", &cmg::state_occupancy);
  m.def("player_occupancy", &cmg::player_occupancy, py::arg("spec"),
        py::arg("profile"), py::arg("player"));
  m.def("flow_matrix", &cmg::flow_matrix, py::arg("spec"), py::arg("profile"),
        py::arg("player"));
  m.def("policy_from_occupancy", &cmg::policy_from_occupancy, py::arg("mu"),
        py::arg("mass_floor") = 1e-12);

  // pgl
  m.def("tangent_projection", &cmg::tangent_projection);
  m.def("pgl_loss", &cmg::pgl_loss, py::arg("spec"), py::arg("utilities"),
        py::arg("profile"), py::arg("tau"));

  // solvers
  m.def("uniform_logits", &cmg::uniform_logits);
  m.def("gaussian_logits", &cmg::gaussian_logits, py::arg("spec"),
        py::arg("seed"));
  m.def("to_policy", &cmg::to_policy);
  m.def(
      "pgl_minimize",
      [](const cmg::GameSpec& spec, const cmg::UtilitySpec& utilities,
         const cmg::LogitProfile& init, long iterations, double lr, int anneal,
         double tau0, int stride, int eps_cadence) {
        return cmg::pgl_minimize(
            spec, utilities, init,
            make_options(iterations, lr, anneal, tau0, stride, eps_cadence));
      },
      py::arg("spec"), py::arg("utilities"), py::arg("init"),
      py::arg("iterations") = 8000, py::arg("lr") = 0.1,
      py::arg("anneal") = 1, py::arg("tau0") = 1.0, py::arg("stride") = 10,
      py::arg("eps_cadence") = 0);
  m.def("sim_descent", &cmg::sim_descent, py::arg("spec"),
        py::arg("utilities"), py::arg("init"), py::arg("lr"),
        py::arg("iterations"), py::arg("tau") = 0.0, py::arg("stride") = 10);
  m.def("rr_descent", &cmg::rr_descent, py::arg("spec"), py::arg("utilities"),
        py::arg("init"), py::arg("lr"), py::arg("iterations"),
        py::arg("tau") = 0.0, py::arg("stride") = 10);

  // exploitability
  m.def("linear_best_response", &cmg::linear_best_response, py::arg("spec"),
        py::arg("profile"), py::arg("player"), py::arg("reward_vec"));
  m.def("best_response", &cmg::best_response, py::arg("spec"),
        py::arg("utilities"), py::arg("profile"), py::arg("player"),
        py::arg("tol") = 1e-6, py::arg("max_iters") = 100000,
        py::arg("tau") = 0.0);
  m.def("exploitability", &cmg::exploitability, py::arg("spec"),
        py::arg("utilities"), py::arg("profile"), py::arg("tol") = 1e-6,
        py::arg("tau") = 0.0);
  m.def("per_state_exploitability", &cmg::per_state_exploitability,
        py::arg("spec"), py::arg("utilities"), py::arg("profile"),
        py::arg("tol") = 1e-6, py::arg("tau") = 0.0);

  // domains
  m.def("domain_catalog", &cmg::domain_catalog,
        py::return_value_policy::reference);
  m.def(
      "find_domain",
      [](const std::string& name) -> const cmg::DomainCatalogEntry* {
        const cmg::DomainCatalogEntry* entry = cmg::find_domain(name);
        if (entry == nullptr) {
          throw cmg::SpecError("unknown domain '" + name + "'");
        }
        return entry;
      },
      py::return_value_policy::reference, py::arg("name"));
  m.def("human_ipd_profile", &cmg::human_ipd_profile);
}
