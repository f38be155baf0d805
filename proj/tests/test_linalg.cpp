#include <doctest.h>

#include "jumpfisher/linalg.hpp"
#include "test_support.hpp"

using namespace jumpfisher;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("vectorize uses column stacking") {
  // Convention: vec(m)[row + col * d] = m(row, col).
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const ComplexVector v = vectorize(id);
  CHECK(v(0) == Complex(1, 0));
  CHECK(v(1) == Complex(0, 0));
  CHECK(v(2) == Complex(0, 0));
  CHECK(v(3) == Complex(1, 0));
  CHECK(devectorize(v) == id);

  const ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
  CHECK(vectorize(zero).isZero(0.0));

  ComplexMatrix basis = ComplexMatrix::Zero(2, 2);
  basis(0, 1) = 1.0;  // |0><1|
  const ComplexVector bv = vectorize(basis);
  for (int i = 0; i < 4; ++i) {
    CHECK(bv(i) == (i == 2 ? Complex(1, 0) : Complex(0, 0)));
  }
  CHECK(devectorize(bv) == basis);
}

TEST_CASE("vectorize rejects non-square input") {
  CHECK_THROWS_AS(vectorize(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(devectorize(ComplexVector::Zero(3)), std::invalid_argument);
}

TEST_CASE("vectorization round-trips random matrices") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const ComplexMatrix m = random_density_matrix(4, seed);
    CHECK((devectorize(vectorize(m)) - m).norm() == 0.0);
  }
}

TEST_CASE("kron against hand-computed blocks") {
  ComplexMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const ComplexMatrix k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(k(0, 1) == Complex(1, 0));
  CHECK(k(0, 3) == Complex(2, 0));
  CHECK(k(3, 0) == Complex(3, 0));
  CHECK(k(2, 3) == Complex(4, 0));
}

TEST_CASE("operator_function on diagonal matrices") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const auto ident = [](double x) { return Complex(x, 0); };
  CHECK((operator_function(d, ident) - d).norm() < 1e-12);

  const ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
  const auto cosf = [](double x) { return Complex(std::cos(x), 0); };
  CHECK((operator_function(zero, cosf) - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);

  ComplexMatrix sq = ComplexMatrix::Zero(3, 3);
  sq(1, 1) = 1.0;
  sq(2, 2) = 4.0;
  const auto sqrtf = [](double x) { return Complex(std::sqrt(x), 0); };
  ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
  expect(1, 1) = 1.0;
  expect(2, 2) = 2.0;
  CHECK((operator_function(sq, sqrtf) - expect).norm() < 1e-12);
}

TEST_CASE("operator_function respects the eigenbasis") {
  // f(U D U^dag) = U f(D) U^dag, checked via f = square.
  const ComplexMatrix rho = random_density_matrix(3, 7);
  const auto square = [](double x) { return Complex(x * x, 0); };
  CHECK((operator_function(rho, square) - rho * rho).norm() < 1e-10);
}

TEST_CASE("operator_function rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(operator_function(m, [](double x) { return Complex(x, 0); }),
                  std::invalid_argument);
}

TEST_CASE("spectral propagator matches scalar exponentials") {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = -1.0;
  g(1, 1) = -2.0;
  SpectralPropagator prop(g);
  CHECK(prop.diagonalizable());
  const ComplexMatrix e1 = prop.at(1.0);
  CHECK(std::abs(e1(0, 0) - std::exp(-1.0)) < 1e-12);
  CHECK(std::abs(e1(1, 1) - std::exp(-2.0)) < 1e-12);
  CHECK(prop.slowest_decay_rate() == doctest::Approx(1.0));
}

TEST_CASE("spectral propagator falls back on defective generators") {
  ComplexMatrix g(2, 2);  // Jordan block: not diagonalizable
  g << -1, 1, 0, -1;
  SpectralPropagator prop(g);
  CHECK_FALSE(prop.diagonalizable());
  // exp(t J) = e^{-t} [[1, t], [0, 1]]
  const ComplexMatrix e = prop.at(2.0);
  CHECK(std::abs(e(0, 0) - std::exp(-2.0)) < 1e-10);
  CHECK(std::abs(e(0, 1) - 2.0 * std::exp(-2.0)) < 1e-10);
  CHECK(std::abs(e(1, 0)) < 1e-12);
}

TEST_CASE("random density matrices are valid") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    CHECK(is_density_matrix(random_density_matrix(4, seed), 1e-10));
  }
}

TEST_SUITE_END();
