#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qmet/matcore.hpp"
#include "qmet/states.hpp"
#include "support/oracles.hpp"

using qmet::Complex;
using qmet::ComplexMatrix;

namespace {

ComplexMatrix singlet_matrix() {
  return ComplexMatrix(4, {0, 0, 0, 0, 0, 0.5, -0.5, 0, 0, -0.5, 0.5, 0, 0, 0, 0, 0});
}

double reconstruction_error(const ComplexMatrix& a) {
  const auto eig = qmet::hermitian_eig(a);
  return qmet::frobenius_distance(eig.reconstruct([](double l) { return l; }), a);
}

double unitarity_error(const ComplexMatrix& v) {
  return qmet::frobenius_distance(v.adjoint() * v, ComplexMatrix::identity(v.dim()));
}

}  // namespace

TEST_CASE("matrix construction and basic algebra") {
  CHECK_THROWS_AS(ComplexMatrix(0), std::invalid_argument);
  CHECK_THROWS_AS(ComplexMatrix(5), std::invalid_argument);
  CHECK_THROWS_AS(ComplexMatrix(2, {1, 2, 3}), std::invalid_argument);
  const ComplexMatrix a(2, {1, Complex(0, 2), 3, 4});
  CHECK(a(0, 1) == Complex(0, 2));
  CHECK(a.adjoint()(1, 0) == Complex(0, -2));
  CHECK(a.trace() == Complex(5, 0));
  CHECK(a.is_finite());
  CHECK_FALSE(a.is_hermitian());
  CHECK(a.hermitian_part().is_hermitian());
  CHECK_THROWS_AS(a + ComplexMatrix(3), std::domain_error);
}

TEST_CASE("eigenvalues of trivial and singlet-derived cases") {
  SUBCASE("decoherent mixture") {
    const auto eig = qmet::hermitian_eig(ComplexMatrix::diagonal({0, 0.5, 0.5, 0}));
    CHECK(eig.eigenvalues[0] == doctest::Approx(0.0));
    CHECK(eig.eigenvalues[1] == doctest::Approx(0.0));
    CHECK(eig.eigenvalues[2] == doctest::Approx(0.5));
    CHECK(eig.eigenvalues[3] == doctest::Approx(0.5));
  }
  SUBCASE("identity") {
    const auto eig = qmet::hermitian_eig(ComplexMatrix::identity(4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(eig.eigenvalues[i] == doctest::Approx(1.0));
  }
  SUBCASE("partial transpose of the singlet") {
    const ComplexMatrix pt = oracle::partial_transpose_by_index(singlet_matrix());
    const auto eig = qmet::hermitian_eig(pt);
    const std::array<double, 4> expected{-0.5, 0.5, 0.5, 0.5};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(eig.eigenvalues[i] - expected[i]) < 1e-12);
    // the power sums of the reported spectrum reproduce Tr A^k
    const auto traces = oracle::trace_powers(pt);
    const auto sums = oracle::power_sums(expected, 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(traces[k] - sums[k]) < 1e-12);
  }
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const ComplexMatrix a = oracle::random_hermitian(dim, rng);
    const auto eig = qmet::hermitian_eig(a);
    CHECK(reconstruction_error(a) <= 1e-10);
    CHECK(unitarity_error(eig.eigenvectors) <= 1e-10);
    CHECK(std::is_sorted(eig.eigenvalues.begin(), eig.eigenvalues.begin() + dim));
    std::array<double, 4> lam{};
    std::copy_n(eig.eigenvalues.begin(), dim, lam.begin());
    const auto traces = oracle::trace_powers(a);
    const auto sums = oracle::power_sums(lam, dim);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(traces[k] - sums[k]) <= 1e-9 * (1 + std::abs(sums[k])));
  }
}

TEST_CASE("eigensolver handles degenerate and complex-phase inputs") {
  std::mt19937_64 rng(5);
  const ComplexMatrix u = oracle::random_unitary(4, rng);
  const ComplexMatrix a = u * ComplexMatrix::diagonal({1, 1, -2, -2}) * u.adjoint();
  const auto eig = qmet::hermitian_eig(a.hermitian_part());
  CHECK(eig.eigenvalues[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reconstruction_error(a.hermitian_part()) <= 1e-10);
}

TEST_CASE("eigensolver rejects non-Hermitian and non-finite input") {
  CHECK_THROWS_AS(qmet::hermitian_eig(ComplexMatrix(2, {0, 1, 0, 0})), std::domain_error);
  CHECK_THROWS_AS(qmet::hermitian_eig(ComplexMatrix(2, {NAN, 0, 0, 0})), std::domain_error);
  // tiny asymmetry inside tolerance is accepted
  CHECK_NOTHROW(qmet::hermitian_eig(ComplexMatrix(2, {1, 1e-12, 0, 1})));
}

TEST_CASE("trace norm") {
  CHECK(qmet::trace_norm(ComplexMatrix::diagonal({0, 0.5, 0.5, 0})) == doctest::Approx(1.0));
  CHECK(qmet::trace_norm(oracle::partial_transpose_by_index(singlet_matrix())) == doctest::Approx(2.0));
  CHECK(qmet::trace_norm(ComplexMatrix::zero(4)) == 0.0);
  // non-Hermitian input: singular values of a nilpotent Jordan block
  CHECK(qmet::trace_norm(ComplexMatrix(2, {0, 3, 0, 0})) == doctest::Approx(3.0));
}

TEST_CASE("trace norm is unitarily invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = oracle::random_hermitian(4, rng);
    const ComplexMatrix u = oracle::random_unitary(4, rng);
    CHECK(unitarity_error(u) < 1e-12);
    const double before = qmet::trace_norm(a);
    const double after = qmet::trace_norm((u * a * u.adjoint()).hermitian_part());
    CHECK(std::abs(before - after) <= 1e-9);
  }
}

TEST_CASE("partial transpose") {
  SUBCASE("diagonal input is unchanged") {
    const ComplexMatrix d = ComplexMatrix::diagonal({0.1, 0.2, 0.3, 0.4});
    CHECK(qmet::partial_transpose_a(d) == d);
  }
  SUBCASE("singlet") {
    ComplexMatrix expected = ComplexMatrix::diagonal({0, 0.5, 0.5, 0});
    expected(0, 3) = -0.5;
    expected(3, 0) = -0.5;
    CHECK(qmet::frobenius_distance(qmet::partial_transpose_a(singlet_matrix()), expected) == 0.0);
  }
  SUBCASE("matches the index permutation, is linear, an involution, trace preserving") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const ComplexMatrix a = oracle::random_hermitian(4, rng);
      const ComplexMatrix b = oracle::gaussian_matrix(4, rng);
      const Complex s(0.3, -1.1);
      CHECK(qmet::frobenius_distance(qmet::partial_transpose_a(a), oracle::partial_transpose_by_index(a)) == 0.0);
      CHECK(qmet::partial_transpose_a(qmet::partial_transpose_a(a)) == a);
      CHECK(std::abs(qmet::partial_transpose_a(a).trace() - a.trace()) < 1e-14);
      const ComplexMatrix lhs = qmet::partial_transpose_a(a + s * b);
      const ComplexMatrix rhs = qmet::partial_transpose_a(a) + s * qmet::partial_transpose_a(b);
      CHECK(qmet::frobenius_distance(lhs, rhs) < 1e-13);
    }
  }
  SUBCASE("wrong dimension") { CHECK_THROWS_AS(qmet::partial_transpose_a(ComplexMatrix(2)), std::domain_error); }
}

TEST_CASE("PSD square root") {
  CHECK(qmet::frobenius_distance(qmet::psd_sqrt(ComplexMatrix::identity(4)), ComplexMatrix::identity(4)) < 1e-14);
  CHECK(qmet::frobenius_distance(qmet::psd_sqrt(ComplexMatrix::diagonal({0, 0.25, 0.25, 0})),
                                 ComplexMatrix::diagonal({0, 0.5, 0.5, 0})) < 1e-14);
  // round-off negatives are clamped, genuine ones rejected
  CHECK_NOTHROW(qmet::psd_sqrt(ComplexMatrix::diagonal({-5e-11, 1, 1, 1})));
  CHECK_THROWS_AS(qmet::psd_sqrt(ComplexMatrix::diagonal({-1e-6, 1, 1, 1})), std::domain_error);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = oracle::random_psd(4, rng);
    const ComplexMatrix s = qmet::psd_sqrt(a);
    CHECK(s.is_hermitian(1e-12));
    CHECK(qmet::frobenius_distance(s * s, a) <= 1e-9);
  }
}

TEST_CASE("Kronecker product") {
  CHECK(qmet::kron(qmet::pauli::identity(), qmet::pauli::identity()) == ComplexMatrix::identity(4));
  const ComplexMatrix yy = qmet::kron(qmet::pauli::y(), qmet::pauli::y());
  // antidiagonal (-1, 1, 1, -1), independent of the overall sign of sigma_y
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double expected = (i + j == 3) ? ((i == 0 || i == 3) ? -1.0 : 1.0) : 0.0;
      CHECK(std::abs(yy(i, j) - Complex(expected, 0)) < 1e-15);
    }
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = oracle::gaussian_matrix(2, rng);
    const ComplexMatrix b = oracle::gaussian_matrix(2, rng);
    CHECK(std::abs(qmet::kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
  CHECK_THROWS_AS(qmet::kron(ComplexMatrix(4), ComplexMatrix(2)), std::domain_error);
}
