#pragma once

// Two-qubit polarization tomography over the nine local basis pairs
// {HV, DA, RL} x {HV, DA, RL} (36 projectors, overcomplete).

#include <cstdint>
#include <string_view>
#include <vector>

#include "qmet/matcore.hpp"
#include "qmet/measure.hpp"
#include "qmet/random.hpp"
#include "qmet/states.hpp"

namespace qmet {

struct TomoRecord {
  Setting setting;
  OutcomeCounts counts;

  bool operator==(const TomoRecord&) const = default;
};

struct TomoDataset {
  std::vector<TomoRecord> records;
  std::uint64_t n_per_setting = 0;

  // Every standard setting exactly once, each with n_per_setting shots.
  // Throws std::invalid_argument otherwise.
  void validate() const;
  bool operator==(const TomoDataset&) const = default;
};

std::vector<Setting> standard_settings();

TomoDataset simulate_tomography(const DensityMatrix& rho, std::uint64_t n_per_setting,
                                RandomStream& stream);

enum class ReconstructionMethod { LinearInversion, MLE };
std::string_view to_string(ReconstructionMethod method);

struct Reconstruction {
  // Linear inversion keeps the raw Hermitian unit-trace estimate, which may
  // be indefinite; MLE output is always a valid density matrix.
  ComplexMatrix rho_hat;
  double log_likelihood = 0.0;  // of physical()
  int iterations = 0;
  ReconstructionMethod method = ReconstructionMethod::MLE;
  bool psd_violation = false;  // min eigenvalue below -1e-6
  bool converged = true;

  DensityMatrix physical() const;
};

inline constexpr double kLikelihoodProbabilityFloor = 1e-12;
inline constexpr double kPsdViolationThreshold = 1e-6;

// sum_x n_x log p_x(rho), with p_x floored at 1e-12.
double log_likelihood(const TomoDataset& data, const ComplexMatrix& rho);

Reconstruction reconstruct_linear(const TomoDataset& data);

struct MleOptions {
  int max_iterations = 5000;
  // Stop once the per-shot log-likelihood gain, realized and predicted, stays
  // below this for three iterations. 1e-10 per shot still leaves ~1e-5 trace
  // distance on noiseless data.
  double tolerance = 1e-14;
};

// Maximizes the multinomial likelihood over rho = T^dagger T / Tr(T^dagger T)
// with T lower triangular (16 real parameters), starting from the
// PSD-projected linear inversion.
Reconstruction reconstruct_mle(const TomoDataset& data, const MleOptions& options = {});

struct TomoReport {
  double fidelity = 0.0;
  FamilyFit fit;
  double negativity = 0.0;
  double log_negativity = 0.0;
  double concurrence = 0.0;
  double qgd = 0.0;
};

TomoReport tomo_report(const DensityMatrix& truth, const Reconstruction& recon);

}  // namespace qmet
