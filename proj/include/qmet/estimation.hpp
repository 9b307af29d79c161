#pragma once

// Plug-in estimators of negativity, log-negativity, concurrence and
// geometric discord from diagonal-basis (DAxDA) coincidence counts, their
// single-shot uncertainty curves, and a numeric Fisher-information oracle.
//
// Every uncertainty here is per single shot; the n-shot standard error of an
// estimate is unc / sqrt(n).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qmet/matcore.hpp"
#include "qmet/measure.hpp"
#include "qmet/states.hpp"

namespace qmet {

enum class Variant { NonOptimal, Optimal };

std::string_view to_string(Variant variant);
// Accepts "optimal"/"opt" and "nonoptimal"/"non-optimal"/"nonopt".
Variant parse_variant(std::string_view text);

struct EstimateResult {
  MeasureKind kind = MeasureKind::Negativity;
  Variant variant = Variant::Optimal;
  double value = 0.0;          // raw plug-in value (log argument floored if needed)
  double clamped_value = 0.0;  // value restricted to the measure's range
  std::uint64_t n_shots = 0;
  double theory_unc_single_shot = 0.0;
  double qcrb_unc_single_shot = 0.0;
  bool clamped = false;  // value was floored or lies outside the range

  double theory_standard_error() const;
};

// Log arguments at or below zero are replaced by this floor.
inline constexpr double kLogArgumentFloor = 0x1p-20;

// The six estimators of the family (concurrence reuses the negativity
// numerics). Curves are evaluated at the clamped estimate unless
// `true_value` is supplied. Throws std::invalid_argument for empty counts.
EstimateResult estimate(MeasureKind kind, Variant variant, const OutcomeCounts& counts,
                        std::optional<double> true_value = std::nullopt);

// Single-shot variance bound 1/QFI as a function of the measure value.
// Throws std::domain_error outside the measure's range.
double qcrb_curve(MeasureKind kind, double value);
double qcrb_uncertainty_curve(MeasureKind kind, double value);
// Single-shot standard deviation of the non-optimal estimator.
double nonoptimal_uncertainty_curve(MeasureKind kind, double value);
double theory_uncertainty_curve(MeasureKind kind, Variant variant, double value);

// One-parameter state curves theta -> rho(theta) on the q = 1/2 slice.
using StatePath = std::function<DensityMatrix(double)>;

// theta = negativity; valid on [-1, 1] (the affine extension below 0 stays physical).
StatePath negativity_path();
// theta = log-negativity, negativity = 2^theta - 1.
StatePath log_negativity_path();
// theta = geometric discord, negativity = sqrt(2 theta); needs theta > 0.
StatePath qgd_path();
StatePath path_for(MeasureKind kind);

inline constexpr double kDefaultFisherStep = 1e-5;
inline constexpr double kFisherDenominatorFloor = 1e-12;

// SLD quantum Fisher information with a central-difference derivative.
double qfi_numeric(const StatePath& path, double theta, double dtheta = kDefaultFisherStep);
// Classical Fisher information of a POVM. Throws std::invalid_argument if
// the elements are not PSD or do not sum to identity within 1e-10.
double cfi_numeric(const StatePath& path, double theta, std::span<const ComplexMatrix> povm,
                   double dtheta = kDefaultFisherStep);

std::vector<ComplexMatrix> setting_povm(const Setting& setting);

struct FisherReport {
  double theta = 0.0;
  double qfi = 0.0;
  double cfi = 0.0;
  double qcrb = 0.0;  // 1 / qfi
};

FisherReport fisher_report(const StatePath& path, double theta,
                           std::span<const ComplexMatrix> povm,
                           double dtheta = kDefaultFisherStep);

}  // namespace qmet
