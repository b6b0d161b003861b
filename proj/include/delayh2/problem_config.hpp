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

#ifndef DELAYH2_PROBLEM_CONFIG_HPP
#define DELAYH2_PROBLEM_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "delayh2/delay_model.hpp"
#include "delayh2/synthesis.hpp"

namespace delayh2 {

/// One pattern applied at every lag 1..N; N comes from the file or a sweep.
struct RepeatedPattern {
  BoolMatrix pattern;
  std::optional<int> horizon;
};

using ConstraintSpec =
    std::variant<DelayGraph, DelayMatrix, std::vector<BoolMatrix>, RepeatedPattern>;

/**
 * Problem description loaded from a JSON file:
 *
 *   {
 *     "name": "...",
 *     "plant": {"A": [[..]], "B1": .., "B2": .., "C1": .., "C2": .., "D12": .., "D21": ..},
 *     "blocks": {"rows": [..], "cols": [..]},
 *     "constraint": { exactly one of
 *        "graph": {"comp_delays": [..], "edges": [{"from": 0, "to": 1, "delay": 1}, ..]},
 *        "delay_matrix": [[..]],
 *        "patterns": [ [[0/1..]], .. ],
 *        "repeated_pattern": {"pattern": [[..]] | "template": "block_diagonal" |
 *                             "lower_triangular" | "full", "horizon": N}
 *        , optional "plant_delays": [[..]] },
 *     "options": {"tol": 1e-9}
 *   }
 */
struct ProblemConfig {
  std::string name;
  std::optional<GeneralizedPlant> plant;
  std::vector<int> block_rows;
  std::vector<int> block_cols;
  ConstraintSpec constraint;
  /// Overrides the G22 block delays used by the QI test.
  std::optional<IntMatrix> plant_delays;
  double tol = 1e-9;

  /// Horizon override only applies to repeated patterns.
  ConstraintSpace constraint_space(std::optional<int> horizon = std::nullopt) const;
  /// Delay matrix given directly, derived from the graph, or implied by the patterns.
  DelayMatrix delay_matrix(std::optional<int> horizon = std::nullopt) const;
  const GeneralizedPlant& require_plant() const;
};

/// Throws ConfigError naming the field or the parse position.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Synthesized controller plus the figures it was reported with.
struct ControllerFile {
  std::string name;
  StateSpaceModel controller;
  std::optional<int> horizon;
  std::optional<double> norm;
};

void write_controller_file(std::ostream& os, const std::string& name,
                           const SynthesisResult& result, int horizon);
ControllerFile parse_controller_file(const std::string& text);
ControllerFile load_controller_file(const std::string& path);

}  // namespace delayh2

#endif  // DELAYH2_PROBLEM_CONFIG_HPP
