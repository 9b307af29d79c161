#pragma once

// The one-parameter-mixed family of two-qubit polarization states
//
//   rho(p, q) = (1 - p) * (|HV><HV| + |VH><VH|) / 2 + p * |psi_q><psi_q|,
//   |psi_q>   = sqrt(q) |HV> - sqrt(1 - q) |VH>,
//
// together with the entanglement and discord measures evaluated on it.
//
// The printed form of this family in the source literature writes the
// decoherent term as diag(0, 1/2, -1/2, 0), which is not a state; it is
// taken here to be the decoherent mixture diag(0, 1/2, 1/2, 0).

#include <string>
#include <string_view>

#include "qmet/matcore.hpp"

namespace qmet {

struct FamilyParams {
  double p = 1.0;  // weight of the pure component
  double q = 0.5;  // |HV> population of the pure component

  // Throws std::invalid_argument unless both lie in [0, 1].
  void validate() const;
};

// Hermitian, unit trace and PSD, each to 1e-10. Construction validates.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(const ComplexMatrix& mat);

  const ComplexMatrix& matrix() const { return mat_; }
  double min_eigenvalue() const;

 private:
  ComplexMatrix mat_;
};

// Clamps negative eigenvalues to zero and renormalizes the trace.
DensityMatrix project_to_physical(const ComplexMatrix& hermitian);

enum class MeasureKind { Negativity, LogNegativity, Concurrence, QGD };

std::string_view to_string(MeasureKind kind);
// Accepts "negativity", "log_negativity" / "lognegativity", "concurrence", "qgd".
MeasureKind parse_measure_kind(std::string_view text);

// Closed interval of values a measure can take.
struct MeasureRange {
  double lo;
  double hi;
};
MeasureRange measure_range(MeasureKind kind);

struct MeasureValue {
  MeasureKind kind;
  double value;
};

DensityMatrix family_state(const FamilyParams& params);
DensityMatrix singlet_state();
DensityMatrix mixture_state();

MeasureValue negativity(const DensityMatrix& rho);
MeasureValue negativity_closed(const FamilyParams& params);
MeasureValue log_negativity(const DensityMatrix& rho);
MeasureValue log_negativity_closed(const FamilyParams& params);
// Wootters concurrence from the eigenvalues of
// R = sqrt( sqrt(rho) (sy x sy) rho^* (sy x sy) sqrt(rho) ).
MeasureValue concurrence(const DensityMatrix& rho);
MeasureValue qgd_closed(const FamilyParams& params);
// Geometric discord through Q = N^2 / 2, which holds on the family only.
MeasureValue qgd_from_negativity(const DensityMatrix& rho);

// Uhlmann (root) fidelity Tr sqrt( sqrt(a) b sqrt(a) ).
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

struct FamilyFit {
  FamilyParams params;
  double residual = 0.0;      // ||rho - family_state(params)||_F
  bool degenerate = false;    // p ~ 0: q is not identifiable and reported as 1/2
  bool out_of_family = false; // residual above kOutOfFamilyResidual
};

inline constexpr double kOutOfFamilyResidual = 0.05;
inline constexpr double kDegenerateP = 1e-9;

// Least-squares projection of rho onto the family in Frobenius norm.
FamilyFit fit_family_params(const DensityMatrix& rho);

}  // namespace qmet
