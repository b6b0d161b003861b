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

#ifndef DELAYH2_TOOLS_COMMANDS_HPP
#define DELAYH2_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "delayh2/problem_config.hpp"

namespace delayh2::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kCheckFailed = 2,
};

struct CommandOptions {
  std::optional<std::string> out_path;
  std::optional<std::string> controller_path;
  int n_min = 1;
  int n_max = 1;
  bool force = false;
  std::optional<double> tol;
  /// Worker threads for sweep; 0 picks hardware concurrency.
  unsigned threads = 0;
};

int cmd_check_qi(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_synth(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_sweep(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_verify(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
               std::ostream& err);

/// Entry point shared by the executable and the tests.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace delayh2::cli

#endif  // DELAYH2_TOOLS_COMMANDS_HPP
