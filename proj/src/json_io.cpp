#include "qmet/json_io.hpp"

#include <stdexcept>
#include <string>

namespace qmet {

namespace {

void put_counts(Json& j, const OutcomeCounts& c) {
  j["n_pp"] = c.pp();
  j["n_pm"] = c.pm();
  j["n_mp"] = c.mp();
  j["n_mm"] = c.mm();
}

OutcomeCounts get_counts(const Json& j) {
  OutcomeCounts c;
  const char* keys[4] = {"n_pp", "n_pm", "n_mp", "n_mm"};
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j.contains(keys[k]) || !j.at(keys[k]).is_number_unsigned())
      throw std::invalid_argument(std::string("counts record: missing non-negative integer ") +
                                  keys[k]);
    c.n[k] = j.at(keys[k]).get<std::uint64_t>();
  }
  return c;
}

std::string get_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw std::invalid_argument(std::string("missing string field ") + key);
  return j.at(key).get<std::string>();
}

}  // namespace

Json to_json(const CountsRecord& record) {
  Json j;
  j["setting"] = to_string(record.setting);
  put_counts(j, record.counts);
  if (record.seed) j["seed"] = *record.seed;
  return j;
}

CountsRecord counts_record_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("counts record: expected a JSON object");
  CountsRecord record;
  if (j.contains("setting")) record.setting = parse_setting(get_string(j, "setting"));
  record.counts = get_counts(j);
  if (j.contains("seed") && j.at("seed").is_number_unsigned())
    record.seed = j.at("seed").get<std::uint64_t>();
  return record;
}

Json to_json(const EstimateResult& r) {
  return Json{{"kind", std::string(to_string(r.kind))},
              {"variant", std::string(to_string(r.variant))},
              {"value", r.value},
              {"value_clamped", r.clamped_value},
              {"n_shots", r.n_shots},
              {"unc_theory", r.theory_unc_single_shot},
              {"unc_qcrb", r.qcrb_unc_single_shot},
              {"clamped", r.clamped}};
}

Json to_json(const TomoDataset& data) {
  Json arr = Json::array();
  for (const TomoRecord& r : data.records) {
    Json j;
    j["basis_a"] = std::string(to_string(r.setting.basis_a));
    j["basis_b"] = std::string(to_string(r.setting.basis_b));
    put_counts(j, r.counts);
    arr.push_back(std::move(j));
  }
  return arr;
}

TomoDataset tomo_dataset_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("tomo dataset: expected a non-empty array");
  TomoDataset data;
  for (const Json& item : j) {
    TomoRecord r;
    r.setting = {parse_local_basis(get_string(item, "basis_a")),
                 parse_local_basis(get_string(item, "basis_b"))};
    r.counts = get_counts(item);
    data.records.push_back(r);
  }
  data.n_per_setting = data.records.front().counts.total();
  data.validate();
  return data;
}

Json to_json(const Reconstruction& recon) {
  Json real = Json::array();
  Json imag = Json::array();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      real.push_back(recon.rho_hat(i, k).real());
      imag.push_back(recon.rho_hat(i, k).imag());
    }
  return Json{{"method", std::string(to_string(recon.method))},
              {"dim", 4},
              {"real", real},
              {"imag", imag},
              {"log_likelihood", recon.log_likelihood},
              {"iterations", recon.iterations},
              {"converged", recon.converged},
              {"psd_violation", recon.psd_violation}};
}

Json to_json(const FisherReport& report) {
  return Json{{"theta", report.theta},
              {"qfi", report.qfi},
              {"cfi", report.cfi},
              {"qcrb", report.qcrb}};
}

}  // namespace qmet
