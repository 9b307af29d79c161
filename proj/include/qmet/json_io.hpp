#pragma once

// JSON records exchanged by the command-line tool.
//
//   counts record    {setting, n_pp, n_pm, n_mp, n_mm, seed}
//   estimate         {kind, variant, value, value_clamped, n_shots, unc_theory, unc_qcrb, clamped}
//   tomo dataset     [{basis_a, basis_b, n_pp, n_pm, n_mp, n_mm}, ...]
//   reconstruction   {method, dim, real[16], imag[16], log_likelihood, iterations, ...}

#include <cstdint>
#include <optional>

#include "json.hpp"
#include "qmet/estimation.hpp"
#include "qmet/measure.hpp"
#include "qmet/tomography.hpp"

namespace qmet {

using Json = nlohmann::json;

struct CountsRecord {
  Setting setting = kDiagonalSetting;
  OutcomeCounts counts;
  std::optional<std::uint64_t> seed;
};

Json to_json(const CountsRecord& record);
// Throws std::invalid_argument on missing or malformed fields.
CountsRecord counts_record_from_json(const Json& j);

Json to_json(const EstimateResult& result);

Json to_json(const TomoDataset& data);
// n_per_setting is taken from the first record's total.
TomoDataset tomo_dataset_from_json(const Json& j);

Json to_json(const Reconstruction& recon);
Json to_json(const FisherReport& report);

}  // namespace qmet
