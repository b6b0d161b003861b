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

#ifndef DELAYH2_ERRORS_HPP
#define DELAYH2_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace delayh2 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be Schur stable has spectral radius >= 1 - tol.
class UnstableSystem : public Error {
 public:
  using Error::Error;
};

/// Iterative or direct linear solve failed (non-convergence, singularity).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption on the plant does not hold numerically.
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

class NotStronglyConnected : public Error {
 public:
  using Error::Error;
};

class BezoutCheckFailed : public Error {
 public:
  using Error::Error;
};

class QIViolation : public Error {
 public:
  using Error::Error;
};

/// Feedback interconnection is not well posed (controller has feedthrough).
class IllPosed : public Error {
 public:
  using Error::Error;
};

/// Malformed problem description; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace delayh2

#endif  // DELAYH2_ERRORS_HPP
