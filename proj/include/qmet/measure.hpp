#pragma once

// Projective polarization measurements on two-qubit states, finite-shot
// sampling, and shot-level post-processing mixing of count records.
//
// Each local basis has a "+" and a "-" outcome:
//   HV: + = H,                  - = V
//   DA: + = (H + V)/sqrt(2),    - = (H - V)/sqrt(2)
//   RL: + = (H + iV)/sqrt(2),   - = (H - iV)/sqrt(2)

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmet/matcore.hpp"
#include "qmet/random.hpp"
#include "qmet/states.hpp"

namespace qmet {

enum class LocalBasis { HV, DA, RL };

std::string_view to_string(LocalBasis basis);
LocalBasis parse_local_basis(std::string_view text);

struct Setting {
  LocalBasis basis_a = LocalBasis::DA;
  LocalBasis basis_b = LocalBasis::DA;

  bool operator==(const Setting&) const = default;
};

inline constexpr Setting kDiagonalSetting{LocalBasis::DA, LocalBasis::DA};

// "DAxDA" style label.
std::string to_string(const Setting& setting);
Setting parse_setting(std::string_view text);

// Joint outcome order used by every four-component record.
enum Outcome : std::size_t { kPP = 0, kPM = 1, kMP = 2, kMM = 3 };

// 2x2 projector onto the + (sign = +1) or - (sign = -1) state of a basis.
ComplexMatrix local_projector(LocalBasis basis, int sign);
// The four joint projectors of a setting, in Outcome order.
std::array<ComplexMatrix, 4> joint_projectors(const Setting& setting);

struct OutcomeProbabilities {
  std::array<double, 4> p{};

  double pp() const { return p[kPP]; }
  double pm() const { return p[kPM]; }
  double mp() const { return p[kMP]; }
  double mm() const { return p[kMM]; }
};

struct OutcomeCounts {
  std::array<std::uint64_t, 4> n{};

  std::uint64_t total() const { return n[0] + n[1] + n[2] + n[3]; }
  std::uint64_t pp() const { return n[kPP]; }
  std::uint64_t pm() const { return n[kPM]; }
  std::uint64_t mp() const { return n[kMP]; }
  std::uint64_t mm() const { return n[kMM]; }

  bool operator==(const OutcomeCounts&) const = default;
};

OutcomeProbabilities outcome_probabilities(const DensityMatrix& rho, const Setting& setting);

// Multinomial draw, one inverse-CDF lookup per shot. Throws
// std::invalid_argument for shots == 0.
OutcomeCounts sample_counts(const OutcomeProbabilities& probs, std::uint64_t shots,
                            RandomStream& stream);
OutcomeCounts sample_counts(const DensityMatrix& rho, const Setting& setting,
                            std::uint64_t shots, RandomStream& stream);

// Shot-by-shot statistical mixture of two recorded runs: each of the
// min(pure.total(), mixed.total()) output shots comes from the `pure` record
// with probability p and from `mixed` otherwise, taking recorded events
// without replacement. Throws std::invalid_argument on an empty record or p
// outside [0, 1].
OutcomeCounts mix_counts(const OutcomeCounts& pure, const OutcomeCounts& mixed, double p,
                         RandomStream& stream);

}  // namespace qmet
