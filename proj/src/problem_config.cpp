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

#include "delayh2/problem_config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "delayh2/errors.hpp"

namespace delayh2 {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  Eigen::Index cols = -1;
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) fail(where + " row " + std::to_string(r), "expected an array");
    const auto len = static_cast<Eigen::Index>(j[r].size());
    if (cols < 0) cols = len;
    if (len != cols) {
      fail(where + " row " + std::to_string(r),
           "has " + std::to_string(len) + " entries, expected " + std::to_string(cols));
    }
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        fail(where + " row " + std::to_string(r) + " column " + std::to_string(c),
             "expected a number");
      }
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

IntMatrix parse_int_matrix(const json& j, const std::string& where) {
  const Matrix m = parse_matrix(j, where);
  IntMatrix out = m.cast<int>();
  if ((out.cast<double>() - m).cwiseAbs().maxCoeff() > 0.0) fail(where, "expected integers");
  return out;
}

BoolMatrix parse_pattern(const json& j, const std::string& where) {
  const Matrix m = parse_matrix(j, where);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m(i) != 0.0 && m(i) != 1.0) fail(where, "pattern entries must be 0 or 1");
  }
  return (m.array() != 0.0).matrix();
}

std::vector<int> parse_blocks(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of block sizes");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() <= 0) fail(where, "block sizes must be positive integers");
    out.push_back(v.get<int>());
  }
  return out;
}

int parse_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

// Feedthrough blocks may be written as the string "zeros".
Matrix parse_plant_matrix(const json& plant, const char* key, Eigen::Index rows,
                          Eigen::Index cols) {
  const std::string where = std::string("plant.") + key;
  const auto& j = field(plant, key, "plant");
  if (j.is_string() && j.get<std::string>() == "zeros") {
    if (rows < 0 || cols < 0) fail(where, "\"zeros\" needs the shape implied by other matrices");
    return Matrix::Zero(rows, cols);
  }
  return parse_matrix(j, where);
}

GeneralizedPlant parse_plant(const json& j) {
  GeneralizedPlant p;
  p.a = parse_matrix(field(j, "A", "plant"), "plant.A");
  const auto n = p.a.rows();
  p.b1 = parse_plant_matrix(j, "B1", -1, -1);
  p.b2 = parse_plant_matrix(j, "B2", -1, -1);
  p.c1 = parse_plant_matrix(j, "C1", -1, -1);
  p.c2 = parse_plant_matrix(j, "C2", -1, -1);
  p.d12 = parse_plant_matrix(j, "D12", p.c1.rows(), p.b2.cols());
  p.d21 = parse_plant_matrix(j, "D21", p.c2.rows(), p.b1.cols());
  auto check = [&](const Matrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      fail(std::string("plant.") + name, "is " + std::to_string(m.rows()) + "x" +
                                             std::to_string(m.cols()) + ", expected " +
                                             std::to_string(r) + "x" + std::to_string(c));
    }
  };
  check(p.a, n, n, "A");
  check(p.b1, n, p.b1.cols(), "B1");
  check(p.b2, n, p.b2.cols(), "B2");
  check(p.c1, p.c1.rows(), n, "C1");
  check(p.c2, p.c2.rows(), n, "C2");
  check(p.d12, p.c1.rows(), p.b2.cols(), "D12");
  check(p.d21, p.c2.rows(), p.b1.cols(), "D21");
  return p;
}

DelayGraph parse_graph(const json& j) {
  DelayGraph g;
  const auto& comp = field(j, "comp_delays", "constraint.graph");
  if (!comp.is_array()) fail("constraint.graph.comp_delays", "expected an array");
  for (std::size_t i = 0; i < comp.size(); ++i) {
    g.comp_delays.push_back(parse_int(comp[i], "constraint.graph.comp_delays[" + std::to_string(i) + "]"));
  }
  if (j.contains("edges")) {
    const auto& edges = j.at("edges");
    if (!edges.is_array()) fail("constraint.graph.edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string where = "constraint.graph.edges[" + std::to_string(i) + "]";
      g.edges.push_back({parse_int(field(edges[i], "from", where), where + ".from"),
                         parse_int(field(edges[i], "to", where), where + ".to"),
                         parse_int(field(edges[i], "delay", where), where + ".delay")});
    }
  }
  return g;
}

BoolMatrix template_pattern(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  BoolMatrix p = BoolMatrix::Constant(rows, cols, false);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (name == "full") {
        p(i, j) = true;
      } else if (name == "block_diagonal") {
        p(i, j) = i == j;
      } else if (name == "lower_triangular") {
        p(i, j) = j <= i;
      } else {
        fail("constraint.repeated_pattern.template", "unknown template '" + name + "'");
      }
    }
  }
  return p;
}

ConstraintSpec parse_constraint(const json& j, const ProblemConfig& cfg) {
  static constexpr const char* kStyles[] = {"graph", "delay_matrix", "patterns",
                                            "repeated_pattern"};
  int present = 0;
  for (const char* s : kStyles) present += j.contains(s) ? 1 : 0;
  if (present != 1) {
    fail("constraint", "exactly one of graph, delay_matrix, patterns, repeated_pattern is required");
  }
  if (j.contains("graph")) return parse_graph(j.at("graph"));
  if (j.contains("delay_matrix")) {
    try {
      return DelayMatrix(parse_int_matrix(j.at("delay_matrix"), "constraint.delay_matrix"));
    } catch (const DimensionMismatch& e) {
      fail("constraint.delay_matrix", e.what());
    }
  }
  if (j.contains("patterns")) {
    const auto& arr = j.at("patterns");
    if (!arr.is_array()) fail("constraint.patterns", "expected an array of patterns");
    std::vector<BoolMatrix> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      out.push_back(parse_pattern(arr[k], "constraint.patterns[" + std::to_string(k) + "]"));
    }
    return out;
  }
  const auto& rp = j.at("repeated_pattern");
  RepeatedPattern out;
  if (rp.contains("pattern") == rp.contains("template")) {
    fail("constraint.repeated_pattern", "give exactly one of 'pattern' or 'template'");
  }
  if (rp.contains("pattern")) {
    out.pattern = parse_pattern(rp.at("pattern"), "constraint.repeated_pattern.pattern");
  } else {
    if (!rp.at("template").is_string()) fail("constraint.repeated_pattern.template", "expected a string");
    out.pattern = template_pattern(rp.at("template").get<std::string>(),
                                   static_cast<Eigen::Index>(cfg.block_rows.size()),
                                   static_cast<Eigen::Index>(cfg.block_cols.size()));
  }
  if (rp.contains("horizon")) {
    out.horizon = parse_int(rp.at("horizon"), "constraint.repeated_pattern.horizon");
    if (*out.horizon < 0) fail("constraint.repeated_pattern.horizon", "must be >= 0");
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Shapes survive JSON even when a dimension is zero.
Matrix sized_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (rows == 0 || cols == 0) return Matrix(rows, cols);
  Matrix m = parse_matrix(j, where);
  if (m.rows() != rows || m.cols() != cols) fail(where, "shape does not match the declared dimensions");
  return m;
}

}  // namespace

ConstraintSpace ProblemConfig::constraint_space(std::optional<int> horizon) const {
  return std::visit(
      [&](const auto& spec) -> ConstraintSpace {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, DelayGraph>) {
          return delayh2::constraint_space(delayh2::delay_matrix(spec), block_rows, block_cols);
        } else if constexpr (std::is_same_v<T, DelayMatrix>) {
          return delayh2::constraint_space(spec, block_rows, block_cols);
        } else if constexpr (std::is_same_v<T, std::vector<BoolMatrix>>) {
          return ConstraintSpace(block_rows, block_cols, spec);
        } else {
          const auto n = horizon ? horizon : spec.horizon;
          if (!n) throw ConfigError("constraint.repeated_pattern: no horizon given");
          return ConstraintSpace::repeated(block_rows, block_cols, spec.pattern, *n);
        }
      },
      constraint);
}

DelayMatrix ProblemConfig::delay_matrix(std::optional<int> horizon) const {
  if (const auto* g = std::get_if<DelayGraph>(&constraint)) return delayh2::delay_matrix(*g);
  if (const auto* d = std::get_if<DelayMatrix>(&constraint)) return *d;
  return constraint_space(horizon).implied_delays();
}

const GeneralizedPlant& ProblemConfig::require_plant() const {
  if (!plant) throw ConfigError("plant: this command needs a plant description");
  return *plant;
}

ProblemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level: expected an object");

  ProblemConfig cfg;
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  const auto& blocks = field(j, "blocks", "top level");
  cfg.block_rows = parse_blocks(field(blocks, "rows", "blocks"), "blocks.rows");
  cfg.block_cols = parse_blocks(field(blocks, "cols", "blocks"), "blocks.cols");

  if (j.contains("plant")) {
    cfg.plant = parse_plant(j.at("plant"));
    cfg.plant->block_rows = cfg.block_rows;
    cfg.plant->block_cols = cfg.block_cols;
  }
  const auto& cons = field(j, "constraint", "top level");
  cfg.constraint = parse_constraint(cons, cfg);
  if (cons.contains("plant_delays")) {
    cfg.plant_delays = parse_int_matrix(cons.at("plant_delays"), "constraint.plant_delays");
  }
  if (!cfg.plant && !cfg.plant_delays) {
    throw ConfigError("top level: need a plant or constraint.plant_delays");
  }
  if (j.contains("options")) {
    const auto& o = j.at("options");
    if (o.contains("tol")) {
      if (!o.at("tol").is_number()) fail("options.tol", "expected a number");
      cfg.tol = o.at("tol").get<double>();
    }
  }

  // Surface structural problems as config errors with the field name.
  try {
    if (cfg.plant) {
      auto sum = [](const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); };
      if (sum(cfg.block_rows) != cfg.plant->controls()) {
        fail("blocks.rows", "sizes must sum to the number of columns of plant.B2");
      }
      if (sum(cfg.block_cols) != cfg.plant->measurements()) {
        fail("blocks.cols", "sizes must sum to the number of rows of plant.C2");
      }
    }
    if (!std::holds_alternative<RepeatedPattern>(cfg.constraint)) cfg.constraint_space();
  } catch (const DimensionMismatch& e) {
    throw ConfigError(std::string("constraint: ") + e.what());
  } catch (const NotStronglyConnected& e) {
    throw ConfigError(std::string("constraint.graph: ") + e.what());
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_controller_file(std::ostream& os, const std::string& name,
                           const SynthesisResult& result, int horizon) {
  const auto& k = result.controller;
  json j;
  j["name"] = name;
  j["controller"] = {{"states", k.states()},
                     {"inputs", k.inputs()},
                     {"outputs", k.outputs()},
                     {"A", matrix_json(k.a())},
                     {"B", matrix_json(k.b())},
                     {"C", matrix_json(k.c())},
                     {"D", matrix_json(k.d())}};
  json v = json::array();
  for (const auto& blk : result.v_star.blocks) v.push_back(matrix_json(blk));
  j["horizon"] = horizon;
  j["v_star"] = std::move(v);
  j["p11_norm_sq"] = result.p11_norm_sq;
  j["qp_cost"] = result.qp_cost;
  j["total_norm_sq"] = result.total_norm_sq;
  j["norm"] = std::sqrt(result.total_norm_sq);
  os << std::setprecision(17) << j.dump(2) << "\n";
}

ControllerFile parse_controller_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  ControllerFile out;
  if (j.contains("name")) out.name = j.at("name").get<std::string>();
  const auto& k = field(j, "controller", "top level");
  const auto n = parse_int(field(k, "states", "controller"), "controller.states");
  const auto m = parse_int(field(k, "inputs", "controller"), "controller.inputs");
  const auto p = parse_int(field(k, "outputs", "controller"), "controller.outputs");
  try {
    out.controller = StateSpaceModel(sized_matrix(field(k, "A", "controller"), n, n, "controller.A"),
                                     sized_matrix(field(k, "B", "controller"), n, m, "controller.B"),
                                     sized_matrix(field(k, "C", "controller"), p, n, "controller.C"),
                                     sized_matrix(field(k, "D", "controller"), p, m, "controller.D"));
  } catch (const DimensionMismatch& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
  if (j.contains("horizon")) out.horizon = parse_int(j.at("horizon"), "horizon");
  if (j.contains("norm") && j.at("norm").is_number()) out.norm = j.at("norm").get<double>();
  return out;
}

ControllerFile load_controller_file(const std::string& path) {
  try {
    return parse_controller_file(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace delayh2
