#include <doctest.h>

#include <fstream>

#include "jumpfisher/model_config.hpp"
#include "jumpfisher/models.hpp"
#include "test_support.hpp"

using namespace jumpfisher;

TEST_SUITE_BEGIN("model");

TEST_CASE("thermometer channels carry the thermal rates") {
  const LindbladModel m = qubit_thermometer(1.0, 1.0, 2.0, 1.5);
  const ModelOperators ops = assemble(m, m.theta);
  CHECK(ops.labels == std::vector<std::string>{"+", "-"});
  CHECK((ops.jump_ops[0] - std::sqrt(2.0 * 1.5) * sigma_plus()).norm() < 1e-14);
  CHECK((ops.jump_ops[1] - std::sqrt(2.0 * 2.5) * sigma_minus()).norm() < 1e-14);

  SUBCASE("nbar = 0 silences the excitation channel") {
    const LindbladModel cold = qubit_thermometer(1.0, 1.0, 2.0, 0.0);
    RealVector th = RealVector::Constant(1, 0.0);
    CHECK(assemble(cold, th).jump_ops[0].norm() == 0.0);
  }

  SUBCASE("invalid rates are rejected") {
    CHECK_THROWS_AS(qubit_thermometer(1, 1, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(qubit_thermometer(1, 1, 1.0, -0.5), ConfigError);
  }
}

TEST_CASE("fluorescence is the omega = nbar = 0 specialization") {
  const LindbladModel f = resonant_fluorescence(0.8, 1.3);
  const ModelOperators ops = assemble(f, f.theta);
  CHECK(ops.labels.size() == 1);
  CHECK((ops.hamiltonian - 0.4 * pauli_x()).norm() < 1e-14);
  CHECK((ops.jump_ops[0] - std::sqrt(1.3) * sigma_minus()).norm() < 1e-14);
  CHECK_THROWS_AS(resonant_fluorescence(0.0, 1.0), ConfigError);
}

TEST_CASE("coupled qubits decouple at g = 0") {
  const LindbladModel m = coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.0, 0.4);
  const ModelOperators ops = assemble(m, m.theta);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix expect = kron(pauli_x(), id2) + kron(id2, pauli_x());
  CHECK((ops.hamiltonian - expect).norm() < 1e-14);
  CHECK(ops.jump_ops.size() == 1);
  CHECK((ops.jump_ops[0] - std::sqrt(0.4) * kron(id2, sigma_minus())).norm() < 1e-14);

  SUBCASE("thermal toggle adds the absorption channel") {
    const LindbladModel th = coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.01, 0.4, 1.0);
    const ModelOperators tops = assemble(th, th.theta);
    CHECK(tops.labels == std::vector<std::string>{"-B", "+B"});
    CHECK((tops.jump_ops[0] -
           std::sqrt(0.4 * 2.0) * kron(id2, sigma_minus())).norm() < 1e-14);
    CHECK((tops.jump_ops[1] -
           std::sqrt(0.4 * 1.0) * kron(id2, sigma_plus())).norm() < 1e-14);
  }
}

TEST_CASE("micromaser collision pair resolves the identity exactly") {
  // Any truncation, any preparation angle: the Kraus pair comes from a
  // unitary on the truncated joint space.
  for (const auto& [g, tau, theta, n] :
       {std::tuple{1.0, 1.0, 0.4, 5}, std::tuple{0.7, 1.3, 1.2, 3},
        std::tuple{2.0, 0.5, 2.6, 8}}) {
    const LindbladModel m = micromaser(g, tau, theta, 0.1, 0.1, n);
    const ModelOperators ops = assemble(m, m.theta);
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    acc += ops.jump_ops[0].adjoint() * ops.jump_ops[0];
    acc += ops.jump_ops[1].adjoint() * ops.jump_ops[1];
    CHECK((acc - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("micromaser matches the closed collision forms away from the cap") {
  const double g = 1.0, tau = 1.0, theta = 0.4;
  const int n = 7;
  const LindbladModel m = micromaser(g, tau, theta, 0.1, 0.1, n);
  const ModelOperators ops = assemble(m, m.theta);
  const auto [ae_closed, ag_closed] = micromaser_kraus_closed_form(g, tau, theta, n);
  // Truncating inside the matrix functions corrupts the top level; the
  // interior block is the physics.
  const int inner = n - 1;
  CHECK((ops.jump_ops[0].topLeftCorner(inner, inner) -
         ae_closed.topLeftCorner(inner, inner))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((ops.jump_ops[1].topLeftCorner(inner, inner) -
         ag_closed.topLeftCorner(inner, inner))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  SUBCASE("theta_atom = 0 gives the alpha = 1 forms") {
    const auto [ae, ag] = micromaser_kraus_closed_form(g, tau, 0.0, n);
    const ComplexMatrix a = annihilation(n);
    const ComplexMatrix s_sq = a.adjoint() * a + ComplexMatrix::Identity(n, n);
    const ComplexMatrix cos_s = operator_function(s_sq, [&](double x) {
      return Complex(std::cos(g * tau * std::sqrt(x)), 0);
    });
    CHECK((ae - cos_s).cwiseAbs().maxCoeff() < 1e-12);
    const ComplexMatrix sin_s_inv =
        operator_function(s_sq, sin_sqrt_over_sqrt(g * tau));
    CHECK((ag - a.adjoint() * sin_s_inv).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("g = 0 collision is a phase on the atom only") {
    const LindbladModel idle = micromaser(0.0, tau, theta, 0.1, 0.1, 5);
    const ModelOperators iops = assemble(idle, idle.theta);
    const ComplexMatrix id5 = ComplexMatrix::Identity(5, 5);
    CHECK((iops.jump_ops[0] - std::cos(theta) * id5).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((iops.jump_ops[1] - Complex(0, 1) * std::sin(theta) * id5)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("sin_sqrt_over_sqrt takes its limit at zero") {
  const auto f = sin_sqrt_over_sqrt(2.5);
  CHECK(f(0.0).real() == doctest::Approx(2.5));
  CHECK(f(4.0).real() == doctest::Approx(std::sin(5.0) / 2.0));
}

TEST_CASE("micromaser flags an undersized Fock space") {
  const LindbladModel tight = micromaser(1.0, 1.0, 0.0, 0.1, 2.0, 2);
  bool flagged = false;
  for (const auto& note : tight.notes) {
    flagged = flagged || note.find("top Fock level") != std::string::npos;
  }
  CHECK(flagged);
  // Atoms entering in |g> do not pump the field; the cap is comfortable.
  CHECK(micromaser(1.0, 1.0, M_PI / 2, 0.1, 0.1, 5).notes.empty());
}

TEST_CASE("displacement machinery") {
  const LindbladModel m = qubit_thermometer(1.0, 1.0, 1.0, 1.5);

  SUBCASE("theta-independent parameter gives zero derivative blocks") {
    // omega does not enter the jump operators.
    const LindbladModel by_omega =
        qubit_thermometer(1.0, 1.0, 1.0, 1.5, {"omega"});
    const DisplacedOperators d = displace(by_omega, by_omega.theta, 0);
    CHECK(d.jump_derivative(0).matrix.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.jump_derivative(1).matrix.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("derivative of the excitation click rate on the ground state") {
    // tr d_nbar(J_+) |g><g| = gamma + O(dtheta^2).
    const DisplacedOperators d = displace(m, m.theta, 0);
    ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
    ground(1, 1) = 1.0;
    const double val = d.jump_derivative(0).apply(ground).trace().real();
    CHECK(val == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("central differences converge at second order") {
    // Exact channel derivative: d_nbar sqrt(gamma nbar) = gamma / (2
    // sqrt(gamma nbar)).
    const double gamma = 1.0, nbar = 1.5;
    const ComplexMatrix exact =
        gamma / (2.0 * std::sqrt(gamma * nbar)) * sigma_plus();
    const auto fd_error = [&](double h) {
      RealVector up = RealVector::Constant(1, nbar + h);
      RealVector down = RealVector::Constant(1, nbar - h);
      const ComplexMatrix diff =
          (m.channels[0].operator_at(up) - m.channels[0].operator_at(down)) /
          (2.0 * h);
      return (diff - exact).norm();
    };
    const double ratio = fd_error(1e-3) / fd_error(5e-4);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }

  SUBCASE("displacement must stay inside the valid region") {
    const LindbladModel cold = qubit_thermometer(1.0, 1.0, 1.0, 1e-6);
    RealVector th = RealVector::Constant(1, 1e-6);
    CHECK_THROWS_AS(displace(cold, th, 0), ConfigError);
  }
}

TEST_CASE("assembled generators stay trace preserving over a theta grid") {
  for (double nbar : {0.2, 0.9, 2.1}) {
    const LindbladModel m = qubit_thermometer(0.7, 1.2, 0.9, nbar);
    const ModelOperators ops = assemble(m, RealVector::Constant(1, nbar));
    CHECK((trace_row(2) * ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (double Omega : {0.4, 1.0, 1.8}) {
    const LindbladModel m = resonant_fluorescence(Omega, 1.3);
    const ModelOperators ops = assemble(m, RealVector::Constant(1, Omega));
    CHECK((trace_row(2) * ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ops.jump_ops[0].rows() == 2);
  }
  for (double gamma : {0.2, 0.4, 0.9}) {
    const LindbladModel m = coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.01, gamma);
    const ModelOperators ops = assemble(m, RealVector::Constant(1, gamma));
    CHECK((trace_row(4) * ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ops.jump_ops[0].rows() == 4);
  }
  for (double g : {0.1, 1.0, 2.0}) {
    const LindbladModel m = micromaser(g, 1.0, 0.7, 0.1, 0.1, 4);
    const ModelOperators ops = assemble(m, RealVector::Constant(1, g));
    CHECK((trace_row(4) * ops.liouvillian.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("named model lookup validates settings") {
  CHECK_THROWS_AS(build_named_model("unknown", {}), ConfigError);
  CHECK_THROWS_AS(build_named_model("qubit-thermometer", {{"bogus", 1.0}}),
                  ConfigError);
  const LindbladModel m =
      build_named_model("qubit-thermometer", {{"nbar", 1.5}, {"Omega", 0.5}});
  CHECK(m.theta(0) == 1.5);
  CHECK(m.param_names == std::vector<std::string>{"nbar"});
}

TEST_CASE("model config json round trip") {
  SUBCASE("builtin") {
    const auto j = nlohmann::json::parse(
        R"({"model": "resonant-fluorescence",
            "params": {"Omega": 1.0, "Gamma": 2.0}})");
    const LindbladModel m = model_from_json(j);
    CHECK(m.name == "resonant-fluorescence");
    CHECK(m.dim == 2);
  }

  SUBCASE("custom with a displacement triple") {
    nlohmann::json j;
    j["model"] = "custom";
    j["dim"] = 2;
    j["hamiltonian"] = matrix_to_json(ComplexMatrix::Zero(2, 2));
    nlohmann::json ch;
    ch["label"] = "-";
    const double theta0 = 1.0, dth = 1e-4;
    ch["matrix"]["base"] = matrix_to_json(std::sqrt(theta0) * sigma_minus());
    ch["matrix"]["dtheta_plus"] =
        matrix_to_json(std::sqrt(theta0 + dth) * sigma_minus());
    ch["matrix"]["dtheta_minus"] =
        matrix_to_json(std::sqrt(theta0 - dth) * sigma_minus());
    j["channels"] = {ch};
    j["theta"] = {{"name", "gamma"}, {"value", theta0}, {"dtheta", dth}};
    const LindbladModel m = model_from_json(j);
    const DisplacedOperators d = displace(m, m.theta, 0, dth);
    // The click rate is gamma |<e|rho|e>|: its nbar... gamma derivative on
    // the excited state is 1.
    ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
    excited(0, 0) = 1.0;
    CHECK(d.jump_derivative(0).apply(excited).trace().real() ==
          doctest::Approx(1.0).epsilon(1e-6));
    // The family is pinned to the three declared points.
    RealVector elsewhere = RealVector::Constant(1, 1.5);
    CHECK_THROWS_AS(assemble(m, elsewhere), ConfigError);
  }

  SUBCASE("parse errors carry context") {
    CHECK_THROWS_AS(model_from_json(nlohmann::json::object()), ConfigError);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1.0]]")), ConfigError);
  }
}

TEST_SUITE_END();
