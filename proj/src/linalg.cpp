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

#include "jumpfisher/linalg.hpp"

#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace jumpfisher {

ComplexVector vectorize(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("vectorize: matrix must be square");
  }
  // Eigen stores column-major, so the raw data is already column-stacked.
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix devectorize(const ComplexVector& v) {
  const auto n = v.size();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  if (d * d != n) {
    throw std::invalid_argument("devectorize: length is not a perfect square");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_density_matrix(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  return es.eigenvalues().minCoeff() >= -tol;
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix operator_function(const ComplexMatrix& a,
                                const std::function<Complex(double)>& f,
                                double tol) {
  if (!is_hermitian(a, tol)) {
    throw std::invalid_argument("operator_function: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(a));
  ComplexVector fe(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < fe.size(); ++i) fe(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix matrix_exp(const ComplexMatrix& m) { return m.exp(); }

SpectralPropagator::SpectralPropagator(const ComplexMatrix& generator,
                                       double max_condition)
    : generator_(generator) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(generator);
  if (es.info() != Eigen::Success) {
    diagonalizable_ = false;
    return;
  }
  eigenvalues_ = es.eigenvalues();
  p_ = es.eigenvectors();
  Eigen::FullPivLU<ComplexMatrix> lu(p_);
  if (!lu.isInvertible()) {
    diagonalizable_ = false;
    return;
  }
  p_inv_ = lu.inverse();
  const double cond = p_.norm() * p_inv_.norm();
  diagonalizable_ = cond < max_condition;
  if (diagonalizable_) {
    // Guard against a residually inaccurate eigenbasis (defective or
    // near-defective generators can still pass the condition test).
    const ComplexMatrix recon = p_ * eigenvalues_.asDiagonal() * p_inv_;
    const double scale = std::max(1.0, generator.cwiseAbs().maxCoeff());
    if ((recon - generator).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      diagonalizable_ = false;
    }
  }
}

ComplexMatrix SpectralPropagator::at(double t) const {
  if (t < 0) {
    throw std::invalid_argument("propagator: negative time");
  }
  if (!diagonalizable_) {
    return matrix_exp(generator_ * t);
  }
  ComplexVector phases(eigenvalues_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(eigenvalues_(i) * t);
  }
  return p_ * phases.asDiagonal() * p_inv_;
}

ComplexVector SpectralPropagator::apply(double t, const ComplexVector& v) const {
  if (!diagonalizable_) {
    return matrix_exp(generator_ * t) * v;
  }
  ComplexVector coeff = p_inv_ * v;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) {
    coeff(i) *= std::exp(eigenvalues_(i) * t);
  }
  return p_ * coeff;
}

double SpectralPropagator::slowest_decay_rate() const {
  ComplexVector evs = eigenvalues_;
  if (!diagonalizable_) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(generator_);
    evs = es.eigenvalues();
  }
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < evs.size(); ++i) {
    max_re = std::max(max_re, evs(i).real());
  }
  return -max_re;
}

ComplexMatrix random_density_matrix(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(n01(gen), n01(gen));
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace jumpfisher
