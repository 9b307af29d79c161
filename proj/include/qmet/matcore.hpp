#pragma once

// Small dense complex matrices (2x2 and 4x4) and the handful of Hermitian
// operations needed for two-qubit states.
//
// Two-qubit matrices use the product basis ordering (HH, HV, VH, VV), i.e.
// index = 2*a + b with a the first qubit and b the second.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>

namespace qmet {

using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  static constexpr std::size_t kMaxDim = 4;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  // Row-major entries; the list length must be dim*dim.
  ComplexMatrix(std::size_t dim, std::initializer_list<Complex> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(std::initializer_list<double> values);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  Complex trace() const;
  double frobenius_norm() const;
  // Largest |A_ij - conj(A_ji)|.
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-10) const { return hermiticity_error() <= tol; }
  bool is_finite() const;
  // (A + A^dagger) / 2
  ComplexMatrix hermitian_part() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix lhs, Complex scale) { return lhs *= scale; }
  friend ComplexMatrix operator*(Complex scale, ComplexMatrix rhs) { return rhs *= scale; }
  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

  bool operator==(const ComplexMatrix& other) const = default;

  std::string to_string(int precision = 6) const;

 private:
  std::size_t dim_ = 0;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

// Frobenius norm of (a - b).
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
  std::array<double, ComplexMatrix::kMaxDim> eigenvalues{};  // ascending, first dim() used
  ComplexMatrix eigenvectors;                                // columns

  std::size_t dim() const { return eigenvectors.dim(); }
  // V diag(f(lambda)) V^dagger
  template <typename Fn>
  ComplexMatrix reconstruct(Fn&& fn) const {
    const std::size_t n = dim();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = fn(eigenvalues[k]);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out(i, j) += w * eigenvectors(i, k) * std::conj(eigenvectors(j, k));
    }
    return out;
  }
};

// Cyclic complex Jacobi. Throws std::domain_error if the input is not
// Hermitian within 1e-10 or contains non-finite entries.
HermitianEigen hermitian_eig(const ComplexMatrix& a);

// Tr sqrt(X^dagger X). Hermitian input takes the sum of |eigenvalues|.
double trace_norm(const ComplexMatrix& x);

// Transposes the first-qubit index of a 4x4 two-qubit operator.
ComplexMatrix partial_transpose_a(const ComplexMatrix& rho);

// Eigenvalues in [-1e-10, 0) are clamped to zero, as are positive ones at
// round-off level (kPsdRoundoffFloor relative); anything below -1e-10 throws
// std::domain_error.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

inline constexpr double kPsdClampTolerance = 1e-10;
// psd_sqrt treats eigenvalues below this fraction of the largest as zero.
inline constexpr double kPsdRoundoffFloor = 1e-14;

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
// Written as [[0, i], [-i, 0]]; the overall sign drops out of sigma_y (x) sigma_y.
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace qmet
