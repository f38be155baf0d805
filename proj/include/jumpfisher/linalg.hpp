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

#include "jumpfisher/types.hpp"

namespace jumpfisher {

// Vectorization uses column stacking throughout: vec(m) lists the columns
// of m top to bottom, so vec(A X B) = (B^T (x) A) vec(X).

/// Column-stack a square matrix into a length-d^2 vector.
ComplexVector vectorize(const ComplexMatrix& m);

/// Inverse of vectorize. `v` must have square length.
ComplexMatrix devectorize(const ComplexVector& v);

/// Kronecker product a (x) b (dense).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);

/// Hermitian within tol, trace 1 within tol, eigenvalues >= -tol.
bool is_density_matrix(const ComplexMatrix& m, double tol = 1e-10);

/// (m + m^dagger)/2.
ComplexMatrix hermitize(const ComplexMatrix& m);

/// Apply a scalar function to a Hermitian matrix through its eigenbasis.
/// Throws std::invalid_argument if `a` is not Hermitian.
ComplexMatrix operator_function(const ComplexMatrix& a,
                                const std::function<Complex(double)>& f,
                                double tol = 1e-10);

/// Dense matrix exponential (scaling-and-squaring Pade).
ComplexMatrix matrix_exp(const ComplexMatrix& m);

/// Eigendecomposition of a (generally non-normal) generator G, giving
/// exp(G t) as P diag(exp(lambda t)) P^{-1} at any t. Falls back to the
/// dense Pade exponential when the eigenvector matrix is too ill
/// conditioned to trust (non-diagonalizable G).
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const ComplexMatrix& generator,
                              double max_condition = 1e6);

  ComplexMatrix at(double t) const;

  /// exp(G t) applied to a vector.
  ComplexVector apply(double t, const ComplexVector& v) const;

  bool diagonalizable() const { return diagonalizable_; }
  const ComplexVector& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const { return p_; }
  const ComplexMatrix& eigenvectors_inv() const { return p_inv_; }

  /// Largest real part among the eigenvalues; for a no-click generator
  /// this is the slowest survival decay rate (negated).
  double slowest_decay_rate() const;

 private:
  ComplexMatrix generator_;
  ComplexVector eigenvalues_;
  ComplexMatrix p_;
  ComplexMatrix p_inv_;
  bool diagonalizable_ = false;
};

/// Random density matrix (Ginibre construction), for property tests.
ComplexMatrix random_density_matrix(int dim, unsigned seed);

}  // namespace jumpfisher
