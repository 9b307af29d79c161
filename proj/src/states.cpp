#include "qmet/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmet {

namespace {

constexpr std::size_t kHV = 1;
constexpr std::size_t kVH = 2;

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

ComplexMatrix sigma_yy() { return kron(pauli::y(), pauli::y()); }

}  // namespace

void FamilyParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("FamilyParams: p must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("FamilyParams: q must lie in [0, 1]");
}

DensityMatrix::DensityMatrix(const ComplexMatrix& mat) : mat_(mat) {
  if (mat.dim() != 4) throw std::domain_error("DensityMatrix: expected a 4x4 matrix");
  if (!mat.is_finite()) throw std::domain_error("DensityMatrix: non-finite entries");
  if (!mat.is_hermitian(kTolerance)) throw std::domain_error("DensityMatrix: not Hermitian");
  if (std::abs(mat.trace() - Complex(1.0)) > kTolerance)
    throw std::domain_error("DensityMatrix: trace is not 1");
  if (hermitian_eig(mat).eigenvalues[0] < -kTolerance)
    throw std::domain_error("DensityMatrix: not positive semidefinite");
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eig(mat_).eigenvalues[0]; }

DensityMatrix project_to_physical(const ComplexMatrix& hermitian) {
  const HermitianEigen eig = hermitian_eig(hermitian.hermitian_part());
  double total = 0.0;
  for (std::size_t k = 0; k < eig.dim(); ++k) total += std::max(eig.eigenvalues[k], 0.0);
  if (!(total > 0.0)) throw std::domain_error("project_to_physical: no positive spectrum");
  ComplexMatrix out = eig.reconstruct([total](double l) { return std::max(l, 0.0) / total; });
  return DensityMatrix(out.hermitian_part());
}

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Negativity: return "negativity";
    case MeasureKind::LogNegativity: return "log_negativity";
    case MeasureKind::Concurrence: return "concurrence";
    case MeasureKind::QGD: return "qgd";
  }
  return "unknown";
}

MeasureKind parse_measure_kind(std::string_view text) {
  if (text == "negativity") return MeasureKind::Negativity;
  if (text == "log_negativity" || text == "lognegativity" || text == "log-negativity")
    return MeasureKind::LogNegativity;
  if (text == "concurrence") return MeasureKind::Concurrence;
  if (text == "qgd" || text == "discord") return MeasureKind::QGD;
  throw std::invalid_argument("unknown measure kind: " + std::string(text));
}

MeasureRange measure_range(MeasureKind kind) {
  return kind == MeasureKind::QGD ? MeasureRange{0.0, 0.5} : MeasureRange{0.0, 1.0};
}

DensityMatrix family_state(const FamilyParams& params) {
  params.validate();
  const double p = params.p;
  const double q = params.q;
  ComplexMatrix rho(4);
  rho(kHV, kHV) = 0.5 * (1.0 - p) + p * q;
  rho(kVH, kVH) = 0.5 * (1.0 - p) + p * (1.0 - q);
  rho(kHV, kVH) = -p * std::sqrt(q * (1.0 - q));
  rho(kVH, kHV) = rho(kHV, kVH);
  return DensityMatrix(rho);
}

DensityMatrix singlet_state() { return family_state({1.0, 0.5}); }
DensityMatrix mixture_state() { return family_state({0.0, 0.5}); }

MeasureValue negativity(const DensityMatrix& rho) {
  const double n = trace_norm(partial_transpose_a(rho.matrix())) - 1.0;
  return {MeasureKind::Negativity, clamp_unit(n)};
}

MeasureValue negativity_closed(const FamilyParams& params) {
  params.validate();
  return {MeasureKind::Negativity, 2.0 * params.p * std::sqrt(params.q * (1.0 - params.q))};
}

MeasureValue log_negativity(const DensityMatrix& rho) {
  const double norm = trace_norm(partial_transpose_a(rho.matrix()));
  return {MeasureKind::LogNegativity, clamp_unit(std::log2(std::max(norm, 1.0)))};
}

MeasureValue log_negativity_closed(const FamilyParams& params) {
  return {MeasureKind::LogNegativity, std::log2(1.0 + negativity_closed(params).value)};
}

MeasureValue concurrence(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  const ComplexMatrix yy = sigma_yy();
  const ComplexMatrix root = psd_sqrt(m);
  const ComplexMatrix flipped = yy * m.conj() * yy;
  const ComplexMatrix r = psd_sqrt((root * flipped * root).hermitian_part());
  const HermitianEigen eig = hermitian_eig(r.hermitian_part());
  // Ascending order: the largest eigenvalue is the last.
  const double c = eig.eigenvalues[3] - eig.eigenvalues[2] - eig.eigenvalues[1] -
                   eig.eigenvalues[0];
  return {MeasureKind::Concurrence, clamp_unit(c)};
}

MeasureValue qgd_closed(const FamilyParams& params) {
  const double n = negativity_closed(params).value;
  return {MeasureKind::QGD, 0.5 * n * n};
}

MeasureValue qgd_from_negativity(const DensityMatrix& rho) {
  const double n = negativity(rho).value;
  return {MeasureKind::QGD, 0.5 * n * n};
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  const ComplexMatrix root = psd_sqrt(a.matrix());
  const ComplexMatrix inner = (root * b.matrix() * root).hermitian_part();
  return std::clamp(psd_sqrt(inner).trace().real(), 0.0, 1.0);
}

FamilyFit fit_family_params(const DensityMatrix& rho) {
  // With u = p (q - 1/2) and v = p sqrt(q (1 - q)) the family is affine in
  // (u, v) over the half disk {v >= 0, u^2 + v^2 <= 1/4}, and both
  // coordinates enter the Frobenius residual with the same weight, so the
  // least-squares fit is a Euclidean projection onto that half disk.
  const ComplexMatrix& m = rho.matrix();
  double u = 0.5 * (m(kHV, kHV).real() - m(kVH, kVH).real());
  double v = -0.5 * (m(kHV, kVH).real() + m(kVH, kHV).real());

  if (v < 0.0) {
    v = 0.0;
    u = std::clamp(u, -0.5, 0.5);
  } else {
    const double radius = std::hypot(u, v);
    if (radius > 0.5) {
      u *= 0.5 / radius;
      v *= 0.5 / radius;
    }
  }

  FamilyFit fit;
  const double p = std::min(1.0, 2.0 * std::hypot(u, v));
  if (p <= kDegenerateP) {
    fit.params = {0.0, 0.5};
    fit.degenerate = true;
  } else {
    fit.params = {p, clamp_unit(0.5 + u / p)};
  }
  fit.residual = frobenius_distance(m, family_state(fit.params).matrix());
  fit.out_of_family = fit.residual > kOutOfFamilyResidual;
  return fit;
}

}  // namespace qmet
