/*
 Copyright 2026 The delayh2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <tuple>
#include <vector>

#include "delayh2/delay_model.hpp"
#include "delayh2/errors.hpp"
#include "delayh2/problem_config.hpp"
#include "delayh2/state_space.hpp"
#include "delayh2/synthesis.hpp"
#include "delayh2/verify.hpp"

namespace py = pybind11;
using namespace delayh2;

namespace {

DelayGraph make_graph(std::vector<int> comp_delays,
                      const std::vector<std::tuple<int, int, int>>& edges) {
  DelayGraph g;
  g.comp_delays = std::move(comp_delays);
  for (const auto& [from, to, delay] : edges) g.edges.push_back({from, to, delay});
  return g;
}

py::dict synthesis_dict(const SynthesisResult& r) {
  py::dict d;
  d["controller"] = r.controller;
  d["v_star"] = r.v_star.blocks;
  d["p11_norm_sq"] = r.p11_norm_sq;
  d["qp_cost"] = r.qp_cost;
  d["total_norm_sq"] = r.total_norm_sq;
  return d;
}

}  // namespace

PYBIND11_MODULE(_delayh2, m) {
  m.doc() = "H2-optimal controller synthesis under communication delay constraints";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error);
  py::register_exception<UnstableSystem>(m, "UnstableSystem", error);
  py::register_exception<SolverFailure>(m, "SolverFailure", error);
  py::register_exception<AssumptionViolated>(m, "AssumptionViolated", error);
  py::register_exception<NotStronglyConnected>(m, "NotStronglyConnected", error);
  py::register_exception<BezoutCheckFailed>(m, "BezoutCheckFailed", error);
  py::register_exception<QIViolation>(m, "QIViolation", error);
  py::register_exception<IllPosed>(m, "IllPosed", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);

  py::class_<StateSpaceModel>(m, "StateSpaceModel")
      .def(py::init<Matrix, Matrix, Matrix, Matrix>(), py::arg("a"), py::arg("b"), py::arg("c"),
           py::arg("d"))
      .def_property_readonly("a", &StateSpaceModel::a)
      .def_property_readonly("b", &StateSpaceModel::b)
      .def_property_readonly("c", &StateSpaceModel::c)
      .def_property_readonly("d", &StateSpaceModel::d)
      .def_property_readonly("states", &StateSpaceModel::states)
      .def_property_readonly("inputs", &StateSpaceModel::inputs)
      .def_property_readonly("outputs", &StateSpaceModel::outputs)
      .def("is_stable", &StateSpaceModel::is_stable, py::arg("tol") = kStabilityTol)
      .def("__repr__", [](const StateSpaceModel& g) {
        return "<StateSpaceModel states=" + std::to_string(g.states()) +
               " inputs=" + std::to_string(g.inputs()) +
               " outputs=" + std::to_string(g.outputs()) + ">";
      });

  m.def(
      "impulse_response",
      [](const StateSpaceModel& g, std::size_t horizon) { return impulse_response(g, horizon).terms; },
      py::arg("g"), py::arg("horizon"), "Markov parameters G_0..G_horizon.");
  m.def("h2_norm_sq", &h2_norm_sq, py::arg("g"));
  m.def(
      "dare_solve",
      [](const Matrix& a, const Matrix& b, const Matrix& q) { return dare_solve(a, b, q); },
      py::arg("a"), py::arg("b"), py::arg("q"));

  py::class_<GeneralizedPlant>(m, "GeneralizedPlant")
      .def(py::init([](Matrix a, Matrix b1, Matrix b2, Matrix c1, Matrix c2, Matrix d12,
                       Matrix d21, std::vector<int> block_rows, std::vector<int> block_cols) {
             GeneralizedPlant p{std::move(a),  std::move(b1),  std::move(b2), std::move(c1),
                                std::move(c2), std::move(d12), std::move(d21)};
             p.block_rows = std::move(block_rows);
             p.block_cols = std::move(block_cols);
             return p;
           }),
           py::arg("a"), py::arg("b1"), py::arg("b2"), py::arg("c1"), py::arg("c2"),
           py::arg("d12"), py::arg("d21"), py::arg("block_rows"), py::arg("block_cols"))
      .def_readonly("a", &GeneralizedPlant::a)
      .def_readonly("b1", &GeneralizedPlant::b1)
      .def_readonly("b2", &GeneralizedPlant::b2)
      .def_readonly("c1", &GeneralizedPlant::c1)
      .def_readonly("c2", &GeneralizedPlant::c2)
      .def_readonly("d12", &GeneralizedPlant::d12)
      .def_readonly("d21", &GeneralizedPlant::d21)
      .def_readonly("block_rows", &GeneralizedPlant::block_rows)
      .def_readonly("block_cols", &GeneralizedPlant::block_cols)
      .def("validate", &GeneralizedPlant::validate, py::arg("tol") = 1e-9)
      .def("g22", &GeneralizedPlant::g22);

  py::class_<ConstraintSpace>(m, "ConstraintSpace")
      .def(py::init<std::vector<int>, std::vector<int>, std::vector<BoolMatrix>>(),
           py::arg("block_rows"), py::arg("block_cols"), py::arg("patterns"))
      .def_static("repeated", &ConstraintSpace::repeated, py::arg("block_rows"),
                  py::arg("block_cols"), py::arg("pattern"), py::arg("horizon"))
      .def_property_readonly("horizon", &ConstraintSpace::horizon)
      .def_property_readonly("patterns", &ConstraintSpace::patterns)
      .def("implied_delays", [](const ConstraintSpace& cs) { return cs.implied_delays().values(); });

  m.def(
      "delay_matrix",
      [](std::vector<int> comp_delays, const std::vector<std::tuple<int, int, int>>& edges) {
        return delay_matrix(make_graph(std::move(comp_delays), edges)).values();
      },
      py::arg("comp_delays"), py::arg("edges"),
      "Delay matrix of a communication graph; edges are (from, to, delay) with 0-based nodes.");
  m.def(
      "constraint_space",
      [](const IntMatrix& d, std::vector<int> block_rows, std::vector<int> block_cols) {
        return constraint_space(DelayMatrix(d), std::move(block_rows), std::move(block_cols));
      },
      py::arg("d"), py::arg("block_rows"), py::arg("block_cols"));
  m.def(
      "check_qi",
      [](const IntMatrix& d, const IntMatrix& p) -> py::tuple {
        const auto r = check_qi(DelayMatrix(d), p);
        if (!r.witness) return py::make_tuple(r.holds, py::none());
        const auto& w = *r.witness;
        return py::make_tuple(r.holds, py::make_tuple(w[0], w[1], w[2], w[3]));
      },
      py::arg("d"), py::arg("plant_delays"),
      "Returns (holds, witness) where witness is a 0-based (k, i, j, l) tuple or None.");

  m.def(
      "synthesize",
      [](const GeneralizedPlant& plant, const ConstraintSpace& cs, bool check) {
        SynthesisOptions opts;
        opts.check_qi = check;
        return synthesis_dict(synthesize(plant, cs, opts));
      },
      py::arg("plant"), py::arg("cs"), py::arg("check_qi") = false);
  m.def(
      "closed_loop",
      [](const GeneralizedPlant& plant, const StateSpaceModel& k) { return closed_loop(plant, k).model; },
      py::arg("plant"), py::arg("k"));
  m.def(
      "conforms",
      [](const StateSpaceModel& k, const ConstraintSpace& cs, double rel_tol) {
        return conformance(k, cs, rel_tol).conforms;
      },
      py::arg("k"), py::arg("cs"), py::arg("rel_tol") = 1e-7);

  m.def(
      "synthesize_config",
      [](const std::string& path, std::optional<int> horizon) {
        const auto cfg = load_config(path);
        return synthesis_dict(synthesize(cfg.require_plant(), cfg.constraint_space(horizon)));
      },
      py::arg("path"), py::arg("horizon") = py::none(),
      "Load a JSON problem file and synthesize its controller.");
}
