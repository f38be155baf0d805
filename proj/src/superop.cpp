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

#include "jumpfisher/superop.hpp"

#include <Eigen/Eigenvalues>

namespace jumpfisher {

Eigen::RowVectorXcd trace_row(int dim) {
  return vectorize(ComplexMatrix::Identity(dim, dim)).transpose();
}

Superoperator sandwich_superoperator(const ComplexMatrix& a,
                                     const ComplexMatrix& b) {
  // vec(A X B) = (B^T (x) A) vec(X)
  return {static_cast<int>(a.rows()), kron(b.transpose(), a)};
}

Superoperator build_liouvillian(const ComplexMatrix& hamiltonian,
                                const std::vector<ComplexMatrix>& jump_ops,
                                double hermiticity_tol) {
  const int d = static_cast<int>(hamiltonian.rows());
  if (hamiltonian.cols() != d) {
    throw std::invalid_argument("build_liouvillian: H must be square");
  }
  if (!is_hermitian(hamiltonian, hermiticity_tol)) {
    throw std::invalid_argument("build_liouvillian: H is not Hermitian");
  }
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i_unit(0.0, 1.0);
  ComplexMatrix m = -i_unit * (kron(id, hamiltonian) -
                               kron(hamiltonian.transpose(), id));
  for (const auto& L : jump_ops) {
    if (L.rows() != d || L.cols() != d) {
      throw std::invalid_argument("build_liouvillian: jump operator dimension mismatch");
    }
    const ComplexMatrix LdL = L.adjoint() * L;
    m += kron(L.conjugate(), L);
    m -= 0.5 * (kron(id, LdL) + kron(LdL.transpose(), id));
  }
  return {d, std::move(m)};
}

Superoperator jump_superoperator(const ComplexMatrix& jump_op,
                                 double efficiency) {
  if (efficiency < 0.0 || efficiency > 1.0) {
    throw std::invalid_argument("jump_superoperator: efficiency outside [0, 1]");
  }
  return {static_cast<int>(jump_op.rows()),
          efficiency * kron(jump_op.conjugate(), jump_op)};
}

Superoperator build_nojump_generator(
    const ComplexMatrix& hamiltonian,
    const std::vector<ComplexMatrix>& jump_ops,
    const std::vector<bool>& monitored,
    const std::vector<double>& efficiencies) {
  if (jump_ops.size() != monitored.size() ||
      jump_ops.size() != efficiencies.size()) {
    throw std::invalid_argument("build_nojump_generator: channel list sizes differ");
  }
  Superoperator g = build_liouvillian(hamiltonian, jump_ops);
  for (std::size_t k = 0; k < jump_ops.size(); ++k) {
    if (!monitored[k]) continue;
    g = g - jump_superoperator(jump_ops[k], efficiencies[k]);
  }
  return g;
}

Superoperator propagator(const Superoperator& generator, double t) {
  if (t < 0) {
    throw std::invalid_argument("propagator: negative time");
  }
  return {generator.dim, matrix_exp(generator.matrix * t)};
}

ComplexMatrix steady_state(const Superoperator& liouvillian, double null_tol) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(liouvillian.matrix);
  if (es.info() != Eigen::Success) {
    throw NumericalError("steady_state: eigensolver failed");
  }
  const auto& evs = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < evs.size(); ++i) {
    if (std::abs(evs(i)) < std::abs(evs(best))) best = i;
  }
  if (std::abs(evs(best)) > 1e-6) {
    throw NumericalError("steady_state: no null eigenvalue found (|lambda_min| = " +
                         std::to_string(std::abs(evs(best))) + ")");
  }
  int near_null = 0;
  for (Eigen::Index i = 0; i < evs.size(); ++i) {
    if (std::abs(evs(i)) < null_tol) ++near_null;
  }
  if (near_null > 1) {
    throw DegenerateSteadyStateError(
        "steady_state: " + std::to_string(near_null) +
        " eigenvalues below the null tolerance; stationary state is ambiguous");
  }
  ComplexMatrix rho = hermitize(devectorize(es.eigenvectors().col(best)));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw NumericalError("steady_state: null vector has vanishing trace");
  }
  rho /= tr;
  return rho;
}

}  // namespace jumpfisher
