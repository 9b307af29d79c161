#pragma once

// Repeated-estimation experiments over a grid of mixing weights p, and the
// CSV / SVG outputs that reproduce the estimator-vs-p figure layout.

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qmet/estimation.hpp"
#include "qmet/measure.hpp"
#include "qmet/random.hpp"
#include "qmet/states.hpp"
#include "qmet/tomography.hpp"

namespace qmet {

enum class MixingMode {
  DirectState,     // sample the family state rho(p, q) directly
  PostProcessMix,  // mix pure-state and decoherent-mixture count records shot by shot
};

std::string_view to_string(MixingMode mode);
MixingMode parse_mixing_mode(std::string_view text);

struct EstimatorId {
  MeasureKind kind;
  Variant variant;
};

// The six estimators, in output order. Concurrence shares the negativity numerics
// and is not listed separately.
inline constexpr std::array<EstimatorId, 6> kSweepEstimators{{
    {MeasureKind::Negativity, Variant::NonOptimal},
    {MeasureKind::Negativity, Variant::Optimal},
    {MeasureKind::LogNegativity, Variant::NonOptimal},
    {MeasureKind::LogNegativity, Variant::Optimal},
    {MeasureKind::QGD, Variant::NonOptimal},
    {MeasureKind::QGD, Variant::Optimal},
}};

// Closed-form value of a measure on rho(p, q).
double family_measure(MeasureKind kind, const FamilyParams& params);

struct SweepConfig {
  double q = 0.5;
  std::vector<double> p_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::uint64_t n_shots = 10000;
  std::uint64_t repetitions = 10;
  std::uint64_t variance_reps = 1000;
  std::uint64_t master_seed = 1;
  MixingMode mixing_mode = MixingMode::DirectState;
  std::uint64_t tomo_shots = 10000;  // per setting, for p_fitted
  unsigned threads = 0;              // 0 = hardware concurrency; never affects results

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys throw
// std::invalid_argument.
void apply_config_entry(SweepConfig& cfg, std::string_view key, std::string_view value);
SweepConfig parse_sweep_config(std::istream& in, SweepConfig base = {});
SweepConfig load_sweep_config(const std::filesystem::path& path, SweepConfig base = {});
std::string format_sweep_config(const SweepConfig& cfg);

// One DAxDA count record for rho(p, q) under the given mixing mode.
OutcomeCounts draw_diagonal_counts(const FamilyParams& params, MixingMode mode,
                                   std::uint64_t n_shots, RandomStream& stream);

// values[e][r] is estimator kSweepEstimators[e] on repetition r. Repetition
// r uses base.substream(r), so results do not depend on `threads`.
struct EstimatorSamples {
  std::array<std::vector<double>, kSweepEstimators.size()> values;
};

EstimatorSamples sample_estimators(const FamilyParams& params, MixingMode mode,
                                   std::uint64_t n_shots, std::uint64_t reps,
                                   const RandomStream& base, unsigned threads = 0);

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (M - 1 denominator)
  double standard_error() const;
  std::size_t count = 0;
};

SampleStats summarize(const std::vector<double>& values);

struct EstimatorStats {
  EstimatorId id;
  double mean = 0.0;
  double stddev = 0.0;        // of single estimations, not of the mean
  double theory_value = 0.0;  // at the true (p, q)
  double unc_nonopt = 0.0;    // single shot
  double unc_qcrb = 0.0;      // single shot
};

struct SweepRow {
  double p_true = 0.0;
  double p_fitted = 0.0;
  double q = 0.5;
  std::uint64_t n_shots = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::array<EstimatorStats, kSweepEstimators.size()> stats;
};

std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "p_true,p_fitted,kind,variant,mean,stddev,theory_value,unc_nonopt,unc_qcrb,n_shots,reps,seed";

// Throw std::invalid_argument on empty input.
std::string emit_csv(const std::vector<SweepRow>& rows);
std::string emit_svg(const std::vector<SweepRow>& rows, const EstimatorId& id);
std::string svg_file_name(const EstimatorId& id);

// Writes sweep.csv and one SVG per estimator into dir (created if needed).
// Nothing is written for empty input.
std::vector<std::filesystem::path> write_sweep_outputs(const std::vector<SweepRow>& rows,
                                                       const std::filesystem::path& dir);

}  // namespace qmet
