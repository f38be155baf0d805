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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jumpfisher/superop.hpp"
#include "jumpfisher/types.hpp"

namespace jumpfisher {

/// One decay channel of a parameterized Lindblad family. The rate is
/// absorbed into the operator (L_k carries its sqrt(gamma_k) factor);
/// the detector efficiency is kept separate.
struct JumpChannel {
  std::string label;
  std::function<ComplexMatrix(const RealVector&)> operator_at;
  double efficiency = 1.0;
  bool monitored = true;
};

/// A theta-parameterized open-system model: Hamiltonian, jump channels,
/// and optional initial state, all as functions of the parameter vector.
/// Builders are pure; a model is safe to share across threads.
struct LindbladModel {
  int dim = 0;
  std::string name;
  std::vector<std::string> param_names;
  RealVector theta;  // reference parameter point
  std::function<ComplexMatrix(const RealVector&)> hamiltonian_at;
  std::vector<JumpChannel> channels;
  std::optional<std::function<ComplexMatrix(const RealVector&)>> initial_state;
  std::function<bool(const RealVector&)> valid_region;  // defaults to all
  std::vector<std::string> notes;  // builder warnings (e.g. truncation)

  int param_index(const std::string& name) const;
  bool theta_valid(const RealVector& th) const;

  /// Initial state at theta; falls back to the stationary state of the
  /// assembled Liouvillian when the model declares none.
  ComplexMatrix initial_state_at(const RealVector& th) const;

  std::vector<int> monitored_indices() const;
};

/// The superoperators of a model assembled at a fixed parameter point:
/// the full generator, the no-click generator, and the click
/// superoperators of the monitored channels (efficiency folded in).
struct ModelOperators {
  int dim = 0;
  RealVector theta;
  ComplexMatrix hamiltonian;
  std::vector<std::string> labels;          // monitored channel labels
  std::vector<ComplexMatrix> jump_ops;      // monitored channel operators
  std::vector<double> efficiencies;         // aligned with labels
  Superoperator liouvillian;
  Superoperator nojump;
  std::vector<Superoperator> jumps;         // aligned with labels

  /// Sum of the monitored click superoperators.
  Superoperator total_jump() const;
};

ModelOperators assemble(const LindbladModel& model, const RealVector& theta);

/// Central-difference step for component `i`: 1e-4 * max(1, |theta_i|),
/// the scale used by every derivative in the library.
double default_displacement(const RealVector& theta, int param_index);

/// Operator sets at theta and theta +- dtheta for one parameter
/// component, with identical channel ordering in all three.
struct DisplacedOperators {
  ModelOperators center;
  ModelOperators plus;
  ModelOperators minus;
  double dtheta = 0.0;
  int param_index = 0;

  /// Central difference (plus - minus) / (2 dtheta) of the click
  /// superoperator for monitored channel `k`.
  Superoperator jump_derivative(std::size_t k) const;
  Superoperator nojump_derivative() const;
};

/// Throws ConfigError when theta +- dtheta leaves the model's valid region.
DisplacedOperators displace(const LindbladModel& model, const RealVector& theta,
                            int param_index, double dtheta = 0.0);

}  // namespace jumpfisher
