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

#include <vector>

#include "jumpfisher/linalg.hpp"
#include "jumpfisher/types.hpp"

namespace jumpfisher {

/// A linear map on density matrices, stored as a d^2 x d^2 matrix acting
/// on column-stacked states.
struct Superoperator {
  int dim = 0;            // Hilbert space dimension d
  ComplexMatrix matrix;   // d^2 x d^2

  Superoperator() = default;
  Superoperator(int d, ComplexMatrix m) : dim(d), matrix(std::move(m)) {}

  static Superoperator zero(int d) {
    return {d, ComplexMatrix::Zero(d * d, d * d)};
  }
  static Superoperator identity(int d) {
    return {d, ComplexMatrix::Identity(d * d, d * d)};
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    return devectorize(matrix * vectorize(rho));
  }

  Superoperator operator*(const Superoperator& rhs) const {
    return {dim, matrix * rhs.matrix};
  }
  Superoperator operator+(const Superoperator& rhs) const {
    return {dim, matrix + rhs.matrix};
  }
  Superoperator operator-(const Superoperator& rhs) const {
    return {dim, matrix - rhs.matrix};
  }
};

/// Row vector r with r . vec(rho) = tr(rho), i.e. vec(identity)^T.
Eigen::RowVectorXcd trace_row(int dim);

/// Superoperator for rho -> A rho B.
Superoperator sandwich_superoperator(const ComplexMatrix& a,
                                     const ComplexMatrix& b);

/// Full Lindblad generator: -i[H, rho] + sum_k (L_k rho L_k^dag
/// - 1/2 {L_k^dag L_k, rho}). Rates are absorbed in the L_k.
Superoperator build_liouvillian(const ComplexMatrix& hamiltonian,
                                const std::vector<ComplexMatrix>& jump_ops,
                                double hermiticity_tol = 1e-10);

/// Click update for one channel: rho -> eta L rho L^dag.
Superoperator jump_superoperator(const ComplexMatrix& jump_op,
                                 double efficiency = 1.0);

/// No-click generator: the full Liouvillian minus every monitored click
/// superoperator. Unmonitored channels and the (1 - eta) remainders of
/// inefficient detectors stay inside.
Superoperator build_nojump_generator(
    const ComplexMatrix& hamiltonian,
    const std::vector<ComplexMatrix>& jump_ops,
    const std::vector<bool>& monitored,
    const std::vector<double>& efficiencies);

/// exp(G t). Throws std::invalid_argument for t < 0.
Superoperator propagator(const Superoperator& generator, double t);

/// Stationary state of a trace-preserving generator, found as the
/// eigenvector of the eigenvalue of minimum modulus; the result is
/// hermitized and renormalized. Throws DegenerateSteadyStateError when a
/// second eigenvalue sits within `null_tol` of zero.
ComplexMatrix steady_state(const Superoperator& liouvillian,
                           double null_tol = 1e-9);

}  // namespace jumpfisher
