#include "qmet/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmet {

namespace {

constexpr double kRangeSlack = 1e-12;
constexpr double kPovmTolerance = 1e-10;
constexpr double kProbabilityFloor = 1e-12;

double in_range(MeasureKind kind, double value) {
  const MeasureRange r = measure_range(kind);
  if (!(value >= r.lo - kRangeSlack && value <= r.hi + kRangeSlack))
    throw std::domain_error("value " + std::to_string(value) + " outside the range of " +
                            std::string(to_string(kind)));
  return std::clamp(value, r.lo, r.hi);
}

double ln2_squared() { return std::numbers::ln2 * std::numbers::ln2; }

}  // namespace

std::string_view to_string(Variant variant) {
  return variant == Variant::Optimal ? "optimal" : "nonoptimal";
}

Variant parse_variant(std::string_view text) {
  if (text == "optimal" || text == "opt") return Variant::Optimal;
  if (text == "nonoptimal" || text == "non-optimal" || text == "nonopt" || text == "non_optimal")
    return Variant::NonOptimal;
  throw std::invalid_argument("unknown estimator variant: " + std::string(text));
}

double EstimateResult::theory_standard_error() const {
  return n_shots ? theory_unc_single_shot / std::sqrt(static_cast<double>(n_shots)) : 0.0;
}

double qcrb_curve(MeasureKind kind, double value) {
  const double x = in_range(kind, value);
  switch (kind) {
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
      return 1.0 - x * x;
    case MeasureKind::LogNegativity:
      return std::max(0.0, -std::exp2(-x) * (std::exp2(x) - 2.0) / ln2_squared());
    case MeasureKind::QGD:
      return std::max(0.0, 2.0 * (1.0 - 2.0 * x) * x);
  }
  return 0.0;
}

double qcrb_uncertainty_curve(MeasureKind kind, double value) {
  return std::sqrt(qcrb_curve(kind, value));
}

double nonoptimal_uncertainty_curve(MeasureKind kind, double value) {
  const double x = in_range(kind, value);
  switch (kind) {
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
      return std::sqrt(std::max(0.0, -(x * x + 2.0 * x - 3.0)));
    case MeasureKind::LogNegativity:
      return std::sqrt(std::max(0.0, -std::exp2(-2.0 * x) * (std::exp2(2.0 * x) - 4.0))) /
             std::numbers::ln2;
    case MeasureKind::QGD:
      return std::sqrt(std::max(
          0.0, -2.0 * x * (2.0 * x + 2.0 * std::numbers::sqrt2 * std::sqrt(x) - 3.0)));
  }
  return 0.0;
}

double theory_uncertainty_curve(MeasureKind kind, Variant variant, double value) {
  return variant == Variant::Optimal ? qcrb_uncertainty_curve(kind, value)
                                     : nonoptimal_uncertainty_curve(kind, value);
}

EstimateResult estimate(MeasureKind kind, Variant variant, const OutcomeCounts& counts,
                        std::optional<double> true_value) {
  const std::uint64_t n = counts.total();
  if (n == 0) throw std::invalid_argument("estimate: empty count record");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double f_pp = static_cast<double>(counts.pp()) * inv_n;
  const double f_pm = static_cast<double>(counts.pm()) * inv_n;
  const double f_mp = static_cast<double>(counts.mp()) * inv_n;
  const double f_mm = static_cast<double>(counts.mm()) * inv_n;

  const double neg = variant == Variant::NonOptimal ? 1.0 - 4.0 * f_pp
                                                    : f_pm + f_mp - f_pp - f_mm;

  EstimateResult out;
  out.kind = kind;
  out.variant = variant;
  out.n_shots = n;

  switch (kind) {
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
      out.value = neg;
      break;
    case MeasureKind::LogNegativity: {
      double arg = 1.0 + neg;
      if (arg <= 0.0) {
        arg = kLogArgumentFloor;
        out.clamped = true;
      }
      out.value = std::log2(arg);
      break;
    }
    case MeasureKind::QGD:
      out.value = 0.5 * neg * neg;
      break;
  }

  const MeasureRange range = measure_range(kind);
  out.clamped_value = std::clamp(out.value, range.lo, range.hi);
  if (out.clamped_value != out.value) out.clamped = true;

  const double at = true_value ? *true_value : out.clamped_value;
  out.theory_unc_single_shot = theory_uncertainty_curve(kind, variant, at);
  out.qcrb_unc_single_shot = qcrb_uncertainty_curve(kind, at);
  return out;
}

StatePath negativity_path() {
  const ComplexMatrix singlet = singlet_state().matrix();
  const ComplexMatrix mixture = mixture_state().matrix();
  return [singlet, mixture](double theta) {
    return DensityMatrix((1.0 - theta) * mixture + theta * singlet);
  };
}

StatePath log_negativity_path() {
  return [path = negativity_path()](double theta) { return path(std::exp2(theta) - 1.0); };
}

StatePath qgd_path() {
  return [path = negativity_path()](double theta) {
    if (!(theta > 0.0)) throw std::domain_error("qgd_path: theta must be positive");
    return path(std::sqrt(2.0 * theta));
  };
}

StatePath path_for(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
      return negativity_path();
    case MeasureKind::LogNegativity:
      return log_negativity_path();
    case MeasureKind::QGD:
      return qgd_path();
  }
  return negativity_path();
}

double qfi_numeric(const StatePath& path, double theta, double dtheta) {
  if (!(dtheta > 0.0)) throw std::invalid_argument("qfi_numeric: dtheta must be positive");
  const DensityMatrix rho = path(theta);
  const ComplexMatrix derivative =
      (path(theta + 0.5 * dtheta).matrix() - path(theta - 0.5 * dtheta).matrix()) *
      Complex(1.0 / dtheta);
  const HermitianEigen eig = hermitian_eig(rho.matrix());
  const ComplexMatrix& v = eig.eigenvectors;
  const ComplexMatrix in_eigenbasis = v.adjoint() * derivative * v;

  double qfi = 0.0;
  bool any_pair = false;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
      if (denom <= kFisherDenominatorFloor) continue;
      any_pair = true;
      qfi += 2.0 * std::norm(in_eigenbasis(i, j)) / denom;
    }
  }
  if (!any_pair) throw std::domain_error("qfi_numeric: no eigenvalue pair above threshold");
  return qfi;
}

std::vector<ComplexMatrix> setting_povm(const Setting& setting) {
  const auto projectors = joint_projectors(setting);
  return {projectors.begin(), projectors.end()};
}

double cfi_numeric(const StatePath& path, double theta, std::span<const ComplexMatrix> povm,
                   double dtheta) {
  if (povm.empty()) throw std::invalid_argument("cfi_numeric: empty POVM");
  ComplexMatrix sum(4);
  for (const ComplexMatrix& e : povm) {
    if (e.dim() != 4 || !e.is_hermitian(kPovmTolerance) ||
        hermitian_eig(e).eigenvalues[0] < -kPovmTolerance)
      throw std::invalid_argument("cfi_numeric: POVM element is not a PSD 4x4 operator");
    sum += e;
  }
  if (frobenius_distance(sum, ComplexMatrix::identity(4)) > kPovmTolerance)
    throw std::invalid_argument("cfi_numeric: POVM elements do not sum to identity");

  const DensityMatrix rho = path(theta);
  const DensityMatrix plus = path(theta + 0.5 * dtheta);
  const DensityMatrix minus = path(theta - 0.5 * dtheta);
  double cfi = 0.0;
  for (const ComplexMatrix& e : povm) {
    const double p = (rho.matrix() * e).trace().real();
    if (p <= kProbabilityFloor) continue;
    const double dp =
        ((plus.matrix() * e).trace().real() - (minus.matrix() * e).trace().real()) / dtheta;
    cfi += dp * dp / p;
  }
  return cfi;
}

FisherReport fisher_report(const StatePath& path, double theta,
                           std::span<const ComplexMatrix> povm, double dtheta) {
  FisherReport report;
  report.theta = theta;
  report.qfi = qfi_numeric(path, theta, dtheta);
  report.cfi = cfi_numeric(path, theta, povm, dtheta);
  report.qcrb = 1.0 / report.qfi;
  return report;
}

}  // namespace qmet
