#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "jumpfisher/models.hpp"
#include "jumpfisher/superop.hpp"
#include "test_support.hpp"

using namespace jumpfisher;

namespace {

// Independent route to the generator matrix: apply the master-equation
// right-hand side to every basis matrix and stack the results. No
// Kronecker identities involved.
ComplexMatrix liouvillian_by_columns(const ComplexMatrix& h,
                                     const std::vector<ComplexMatrix>& ls) {
  const int d = static_cast<int>(h.rows());
  ComplexMatrix out(d * d, d * d);
  const Complex i_unit(0, 1);
  for (int col = 0; col < d * d; ++col) {
    ComplexMatrix basis = ComplexMatrix::Zero(d, d);
    basis(col % d, col / d) = 1.0;
    ComplexMatrix rhs = -i_unit * (h * basis - basis * h);
    for (const auto& L : ls) {
      rhs += L * basis * L.adjoint() -
             0.5 * (L.adjoint() * L * basis + basis * L.adjoint() * L);
    }
    out.col(col) = vectorize(rhs);
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("superop");

TEST_CASE("pure decay master equation by direct substitution") {
  const double gamma = 0.7;
  const ComplexMatrix L = std::sqrt(gamma) * sigma_minus();
  const Superoperator liou =
      build_liouvillian(ComplexMatrix::Zero(2, 2), {L});
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(0, 0) = 1.0;
  const ComplexMatrix drho = liou.apply(excited);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = -gamma;
  expect(1, 1) = gamma;
  CHECK((drho - expect).norm() < 1e-12);
}

TEST_CASE("Hamiltonian eigenprojectors are stationary without jumps") {
  ComplexMatrix h = 0.8 * pauli_z() + 0.3 * pauli_x();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Superoperator liou = build_liouvillian(h, {});
  for (int i = 0; i < 2; ++i) {
    const ComplexVector v = es.eigenvectors().col(i);
    const ComplexMatrix proj = v * v.adjoint();
    CHECK(liou.apply(proj).norm() < 1e-12);
  }
}

TEST_CASE("assembled generator agrees with the entrywise route") {
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);
  const ComplexMatrix by_columns =
      liouvillian_by_columns(ops.hamiltonian, ops.jump_ops);
  CHECK((ops.liouvillian.matrix - by_columns).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("thermometry steady state matches an independent eigen-solve") {
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);
  const ComplexMatrix rho = steady_state(ops.liouvillian);
  CHECK(is_density_matrix(rho, 1e-9));
  CHECK(ops.liouvillian.apply(rho).norm() < 1e-9);

  // Independent route: null vector of the entrywise-assembled matrix.
  const ComplexMatrix alt = liouvillian_by_columns(ops.hamiltonian, ops.jump_ops);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(alt);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(best))) best = i;
  }
  ComplexMatrix ref = hermitize(devectorize(es.eigenvectors().col(best)));
  ref /= ref.trace();
  CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("liouvillian rejects bad input") {
  ComplexMatrix not_hermitian(2, 2);
  not_hermitian << 0, 1, 0, 0;
  CHECK_THROWS_AS(build_liouvillian(not_hermitian, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      build_liouvillian(ComplexMatrix::Zero(2, 2), {ComplexMatrix::Zero(3, 3)}),
      std::invalid_argument);
}

TEST_CASE("propagator basics") {
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);

  const Superoperator p0 = propagator(ops.liouvillian, 0.0);
  CHECK((p0.matrix - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  SUBCASE("diagonal generator") {
    ComplexMatrix g = ComplexMatrix::Zero(4, 4);
    g.diagonal() << -1.0, -2.0, -0.5, -3.0;
    const Superoperator e = propagator({2, g}, 1.0);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(e.matrix(i, i) - std::exp(g(i, i))) < 1e-12);
    }
  }

  SUBCASE("semigroup property") {
    const Superoperator pa = propagator(ops.liouvillian, 0.7);
    const Superoperator pb = propagator(ops.liouvillian, 1.3);
    const Superoperator pab = propagator(ops.liouvillian, 2.0);
    CHECK(((pa * pb).matrix - pab.matrix).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("negative time rejected") {
    CHECK_THROWS_AS(propagator(ops.liouvillian, -0.1), std::invalid_argument);
  }
}

TEST_CASE("pure decay survival is exponential") {
  const double gamma = 0.9;
  const ComplexMatrix L = std::sqrt(gamma) * sigma_minus();
  const Superoperator nojump = build_nojump_generator(
      ComplexMatrix::Zero(2, 2), {L}, {true}, {1.0});
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(0, 0) = 1.0;
  for (double t : {0.3, 1.0, 2.5}) {
    const double survival =
        propagator(nojump, t).apply(excited).trace().real();
    CHECK(survival == doctest::Approx(std::exp(-gamma * t)).epsilon(1e-10));
  }
}

TEST_CASE("steady state of pure decay is the ground state") {
  const ComplexMatrix L = sigma_minus();
  const Superoperator liou = build_liouvillian(ComplexMatrix::Zero(2, 2), {L});
  const ComplexMatrix rho = steady_state(liou);
  CHECK(std::abs(rho(1, 1).real() - 1.0) < 1e-10);
  CHECK(std::abs(rho(0, 0)) < 1e-10);
}

TEST_CASE("thermometry steady state at Omega = 0 obeys detailed balance") {
  const double nbar = 1.5;
  const LindbladModel model = qubit_thermometer(1.0, 0.0, 1.0, nbar);
  const ComplexMatrix rho = steady_state(assemble(model, model.theta).liouvillian);
  CHECK(rho(0, 0).real() == doctest::Approx(nbar / (2 * nbar + 1)).epsilon(1e-9));
}

TEST_CASE("unitary-only dynamics has a degenerate stationary space") {
  const Superoperator liou = build_liouvillian(pauli_z(), {});
  CHECK_THROWS_AS(steady_state(liou), DegenerateSteadyStateError);
}

TEST_CASE("no-click generator equals the effective-Hamiltonian form") {
  // All channels monitored at unit efficiency: L0 rho = -i(He rho - rho
  // He^dag) with He = H - (i/2) sum L^dag L.
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);
  ComplexMatrix gram = ComplexMatrix::Zero(2, 2);
  for (const auto& L : ops.jump_ops) gram += L.adjoint() * L;
  const ComplexMatrix h_eff = ops.hamiltonian - Complex(0, 0.5) * gram;
  for (unsigned seed = 0; seed < 4; ++seed) {
    const ComplexMatrix rho = random_density_matrix(2, seed);
    const ComplexMatrix lhs = ops.nojump.apply(rho);
    const ComplexMatrix rhs =
        Complex(0, -1) * (h_eff * rho - rho * h_eff.adjoint());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("empty monitored set leaves the full generator") {
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);
  const Superoperator l0 = build_nojump_generator(
      ops.hamiltonian, {ops.jump_ops[0], ops.jump_ops[1]}, {false, false},
      {1.0, 1.0});
  CHECK((l0.matrix - ops.liouvillian.matrix).cwiseAbs().maxCoeff() == 0.0);

  // Zero efficiency on every channel is the same thing.
  const Superoperator l0_eta = build_nojump_generator(
      ops.hamiltonian, {ops.jump_ops[0], ops.jump_ops[1]}, {true, true},
      {0.0, 0.0});
  CHECK((l0_eta.matrix - ops.liouvillian.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("click blocks and no-click generator resum to the full generator") {
  const LindbladModel model = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const ModelOperators ops = assemble(model, model.theta);
  ComplexMatrix sum = ops.nojump.matrix;
  for (const auto& j : ops.jumps) sum += j.matrix;
  CHECK((sum - ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace preservation and positivity under propagation") {
  const std::vector<LindbladModel> models = {
      qubit_thermometer(1.0, 1.0, 1.0, 1.5),
      resonant_fluorescence(1.0, 1.0),
      coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.01, 0.4),
      micromaser(1.0, 1.0, 0.4, 0.1, 0.1, 5),
  };
  for (const auto& model : models) {
    const ModelOperators ops = assemble(model, model.theta);
    const Eigen::RowVectorXcd tr = trace_row(ops.dim);
    // tr(L rho) = 0 for random rho.
    for (unsigned seed = 0; seed < 3; ++seed) {
      const ComplexMatrix rho = random_density_matrix(ops.dim, seed);
      CHECK(std::abs(ops.liouvillian.apply(rho).trace()) < 1e-10);
    }
    // Null row: vec(1)^T L = 0.
    CHECK((tr * ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-10);

    const ComplexMatrix rho0 = random_density_matrix(ops.dim, 42);
    for (double t : {0.5, 2.0, 10.0}) {
      const ComplexMatrix rho_t = propagator(ops.liouvillian, t).apply(rho0);
      CHECK((rho_t - rho_t.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho_t));
      CHECK(es.eigenvalues().minCoeff() > -1e-8);
      CHECK(std::abs(rho_t.trace().real() - 1.0) < 1e-10);
    }

    // The no-click flow shrinks the trace of positive states.
    const double slope = ops.nojump.apply(rho0).trace().real();
    CHECK(slope <= 1e-12);
  }
}

TEST_SUITE_END();
