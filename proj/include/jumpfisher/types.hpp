// Copyright 2026 The jumpfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jumpfisher {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Bad run configuration or violated precondition (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence, singular operators, underflow
/// (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The no-click generator is singular: some subspace never produces a
/// monitored jump, so waiting times are not normalizable.
class DarkSubspaceError : public NumericalError {
 public:
  explicit DarkSubspaceError(const std::string& what) : NumericalError(what) {}
};

/// More than one candidate stationary state.
class DegenerateSteadyStateError : public NumericalError {
 public:
  explicit DegenerateSteadyStateError(const std::string& what)
      : NumericalError(what) {}
};

/// A vanishing probability density carries a nonvanishing parameter
/// derivative: the Fisher information diverges.
class InfiniteInformationError : public NumericalError {
 public:
  explicit InfiniteInformationError(const std::string& what)
      : NumericalError(what) {}
};

/// Requested computation does not apply to the given model, e.g. a
/// renewal-only formula on a non-renewal process (CLI exit code 4).
class ModelModeError : public std::runtime_error {
 public:
  explicit ModelModeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumpfisher
