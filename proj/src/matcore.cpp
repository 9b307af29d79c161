#include "qmet/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qmet {

namespace {

void require_dim(std::size_t dim) {
  if (dim == 0 || dim > ComplexMatrix::kMaxDim)
    throw std::invalid_argument("ComplexMatrix: dimension must be in [1, 4]");
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw std::domain_error("ComplexMatrix: dimension mismatch");
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

constexpr double kHermitianTolerance = 1e-10;
constexpr double kJacobiTolerance = 1e-14;
constexpr int kJacobiMaxSweeps = 100;

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<Complex> entries)
    : dim_(dim) {
  require_dim(dim);
  if (entries.size() != dim * dim)
    throw std::invalid_argument("ComplexMatrix: entry count does not match dimension");
  std::copy(entries.begin(), entries.end(), data_.begin());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix out(dim);
  for (std::size_t i = 0; i < dim; ++i) out(i, i) = 1.0;
  return out;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> values) {
  ComplexMatrix out(values.size());
  std::size_t i = 0;
  for (double v : values) {
    out(i, i) = v;
    ++i;
  }
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(j, i));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(j, i);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out(dim_);
  for (std::size_t k = 0; k < dim_ * dim_; ++k) out.data_[k] = std::conj(data_[k]);
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) sum += (*this)(i, i);
  return sum;
}

double ComplexMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < dim_ * dim_; ++k) sum += std::norm(data_[k]);
  return std::sqrt(sum);
}

double ComplexMatrix::hermiticity_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.begin() + dim_ * dim_, [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t k = 0; k < dim_ * dim_; ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t k = 0; k < dim_ * dim_; ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (std::size_t k = 0; k < dim_ * dim_; ++k) data_[k] *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_same_dim(lhs, rhs);
  const std::size_t n = lhs.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::string ComplexMatrix::to_string(int precision) const {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed;
  for (std::size_t i = 0; i < dim_; ++i) {
    os << "[";
    for (std::size_t j = 0; j < dim_; ++j) {
      const Complex z = (*this)(i, j);
      os << (j ? ", " : " ") << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
         << "i";
    }
    os << " ]\n";
  }
  return os.str();
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

HermitianEigen hermitian_eig(const ComplexMatrix& input) {
  if (!input.is_finite()) throw std::domain_error("hermitian_eig: non-finite entries");
  if (!input.is_hermitian(kHermitianTolerance))
    throw std::domain_error("hermitian_eig: matrix is not Hermitian");

  const std::size_t n = input.dim();
  ComplexMatrix a = input.hermitian_part();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double threshold = kJacobiTolerance * std::max(1.0, a.frobenius_norm());

  for (int sweep = 0; sweep < kJacobiMaxSweeps && off_diagonal_norm(a) >= threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double g = std::abs(b);
        if (g < 1e-300) continue;
        // Phase D = diag(1, e^{-i phi}) makes the (p,q) block real, then a
        // real Jacobi rotation zeroes it.
        const Complex phase = std::conj(b) / g;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        ComplexMatrix j = ComplexMatrix::identity(n);
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -s * phase;
        j(q, q) = c * phase;

        a = j.adjoint() * a * j;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;
        v = v * j;
      }
    }
  }

  std::array<std::size_t, ComplexMatrix::kMaxDim> order{};
  std::iota(order.begin(), order.begin() + n, std::size_t{0});
  std::sort(order.begin(), order.begin() + n,
            [&](std::size_t l, std::size_t r) { return a(l, l).real() < a(r, r).real(); });

  HermitianEigen out;
  out.eigenvectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

double trace_norm(const ComplexMatrix& x) {
  if (!x.is_finite()) throw std::domain_error("trace_norm: non-finite entries");
  if (x.is_hermitian(kHermitianTolerance)) {
    const HermitianEigen eig = hermitian_eig(x);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) sum += std::abs(eig.eigenvalues[k]);
    return sum;
  }
  return psd_sqrt((x.adjoint() * x).hermitian_part()).trace().real();
}

ComplexMatrix partial_transpose_a(const ComplexMatrix& rho) {
  if (rho.dim() != 4) throw std::domain_error("partial_transpose_a: expected a 4x4 matrix");
  ComplexMatrix out(4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t b2 = 0; b2 < 2; ++b2)
          out(2 * a + b, 2 * a2 + b2) = rho(2 * a2 + b, 2 * a + b2);
  return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  const HermitianEigen eig = hermitian_eig(a);
  if (eig.eigenvalues[0] < -kPsdClampTolerance)
    throw std::domain_error("psd_sqrt: matrix has a negative eigenvalue");
  // Eigenvalues at round-off level relative to the spectrum are zero; their
  // square roots would otherwise leak sqrt(eps) into rank-deficient inputs.
  const double floor = kPsdRoundoffFloor * std::max(eig.eigenvalues[a.dim() - 1], 0.0);
  return eig.reconstruct(
      [floor](double lambda) { return lambda > floor ? std::sqrt(lambda) : 0.0; });
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) throw std::domain_error("kron: expected two 2x2 matrices");
  ComplexMatrix out(4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, Complex(0, 1), Complex(0, -1), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

}  // namespace qmet
