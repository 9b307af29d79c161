// qmet: command-line front end for the entanglement/discord estimation workbench.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numeric/domain error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmet/estimation.hpp"
#include "qmet/harness.hpp"
#include "qmet/json_io.hpp"
#include "qmet/measure.hpp"
#include "qmet/states.hpp"
#include "qmet/tomography.hpp"

namespace {

using qmet::Json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct StateArgs {
  double p = 1.0;
  double q = 0.5;
};

void add_state_options(CLI::App* cmd, StateArgs& args) {
  cmd->add_option("--p", args.p, "mixing weight of the pure component, in [0, 1]")->capture_default_str();
  cmd->add_option("--q", args.q, "|HV> population of the pure component, in [0, 1]")->capture_default_str();
}

qmet::FamilyParams to_params(const StateArgs& args) {
  qmet::FamilyParams params{args.p, args.q};
  params.validate();
  return params;
}

Json matrix_json(const qmet::ComplexMatrix& m) {
  Json real = Json::array();
  Json imag = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) {
      real.push_back(m(i, j).real());
      imag.push_back(m(i, j).imag());
    }
  return Json{{"dim", m.dim()}, {"real", real}, {"imag", imag}};
}

Json fit_json(const qmet::FamilyFit& fit) {
  return Json{{"p", fit.params.p},
              {"q", fit.params.q},
              {"residual", fit.residual},
              {"degenerate", fit.degenerate},
              {"out_of_family", fit.out_of_family}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::invalid_argument("cannot write " + path);
}

int run_state(const StateArgs& args, bool as_json) {
  const qmet::FamilyParams params = to_params(args);
  const qmet::DensityMatrix rho = qmet::family_state(params);
  const qmet::FamilyFit fit = qmet::fit_family_params(rho);
  const double neg = qmet::negativity(rho).value;
  const double logneg = qmet::log_negativity(rho).value;
  const double conc = qmet::concurrence(rho).value;
  const double qgd = qmet::qgd_closed(params).value;
  if (as_json) {
    Json j{{"p", params.p},
           {"q", params.q},
           {"matrix", matrix_json(rho.matrix())},
           {"negativity", neg},
           {"negativity_closed", qmet::negativity_closed(params).value},
           {"log_negativity", logneg},
           {"log_negativity_closed", qmet::log_negativity_closed(params).value},
           {"concurrence", conc},
           {"qgd", qgd},
           {"fit", fit_json(fit)}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "rho(p=" << params.p << ", q=" << params.q << ") in basis (HH, HV, VH, VV):\n"
            << rho.matrix().to_string() << "negativity      " << neg << "  (closed form "
            << qmet::negativity_closed(params).value << ")\n"
            << "log-negativity  " << logneg << "  (closed form "
            << qmet::log_negativity_closed(params).value << ")\n"
            << "concurrence     " << conc << "\n"
            << "geometric disc. " << qgd << "\n"
            << "fitted (p, q)   (" << fit.params.p << ", " << fit.params.q << ")"
            << (fit.degenerate ? "  [q not identifiable]" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmet - optimal estimation of entanglement and discord for a two-qubit state family"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "master seed (falls back to $QMET_SEED)")
        ->envname("QMET_SEED")
        ->capture_default_str();
  };

  StateArgs state_args;
  bool state_json = false;
  auto* state_cmd = app.add_subcommand("state", "print the family matrix, all measures and fitted parameters");
  add_state_options(state_cmd, state_args);
  state_cmd->add_flag("--json", state_json, "emit JSON");

  StateArgs probe_args;
  std::string probe_setting = "DAxDA";
  auto* probe_cmd = app.add_subcommand("probe", "print joint outcome probabilities of a setting");
  add_state_options(probe_cmd, probe_args);
  probe_cmd->add_option("--setting", probe_setting, "basis pair, e.g. DAxDA")->capture_default_str();

  StateArgs sample_args;
  std::uint64_t sample_n = 10000;
  std::string sample_setting = "DAxDA";
  std::string sample_mode = "direct";
  auto* sample_cmd = app.add_subcommand("sample", "emit a simulated count record as JSON");
  add_state_options(sample_cmd, sample_args);
  sample_cmd->add_option("--n", sample_n, "number of shots")->capture_default_str();
  sample_cmd->add_option("--setting", sample_setting, "basis pair, e.g. DAxDA")->capture_default_str();
  sample_cmd->add_option("--mode", sample_mode, "direct | postmix")->capture_default_str();
  add_seed(sample_cmd);

  StateArgs est_args;
  std::string est_kind = "negativity";
  std::string est_variant = "optimal";
  std::string est_counts;
  std::uint64_t est_n = 10000;
  std::optional<double> est_truth;
  auto* est_cmd = app.add_subcommand("estimate", "evaluate one estimator on DAxDA counts");
  est_cmd->add_option("--kind", est_kind, "negativity | log_negativity | concurrence | qgd")->capture_default_str();
  est_cmd->add_option("--variant", est_variant, "optimal | nonoptimal")->capture_default_str();
  auto* counts_opt = est_cmd->add_option("--counts", est_counts, "counts record JSON file");
  auto* p_opt = est_cmd->add_option("--p", est_args.p, "mixing weight (simulate counts)");
  est_cmd->add_option("--q", est_args.q, "pure-state weight (simulate counts)")->capture_default_str();
  est_cmd->add_option("--n", est_n, "shots when simulating")->capture_default_str();
  est_cmd->add_option("--true-value", est_truth, "evaluate uncertainty curves at this value");
  counts_opt->excludes(p_opt);
  add_seed(est_cmd);

  std::string sweep_config;
  std::vector<std::string> sweep_overrides;
  std::string sweep_out = "sweep_out";
  bool sweep_print = false;
  bool sweep_variance = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the p sweep and write sweep.csv plus SVG panels");
  sweep_cmd->add_option("--config", sweep_config, "flat key = value config file");
  sweep_cmd->add_option("--set", sweep_overrides, "override, e.g. --set n_shots=20000");
  sweep_cmd->add_option("--out-dir", sweep_out, "output directory")->capture_default_str();
  sweep_cmd->add_flag("--print-config", sweep_print, "print the effective configuration and exit");
  sweep_cmd->add_flag("--variance-reps", sweep_variance, "use variance_reps repetitions per point");
  auto* sweep_seed = sweep_cmd->add_option("--seed", seed, "master seed (falls back to $QMET_SEED)")
                         ->envname("QMET_SEED");

  StateArgs tomo_args;
  std::uint64_t tomo_n = 100000;
  std::string tomo_data;
  std::string tomo_method = "mle";
  std::string tomo_export;
  std::string tomo_dataset_out;
  auto* tomo_cmd = app.add_subcommand("tomo", "simulate 36-projector tomography, reconstruct, report");
  add_state_options(tomo_cmd, tomo_args);
  tomo_cmd->add_option("--n-per-setting", tomo_n, "shots per basis pair")->capture_default_str();
  tomo_cmd->add_option("--data", tomo_data, "reconstruct this dataset JSON instead of simulating");
  tomo_cmd->add_option("--method", tomo_method, "mle | linear")->capture_default_str();
  tomo_cmd->add_option("--export", tomo_export, "write the reconstruction JSON here");
  tomo_cmd->add_option("--dataset-out", tomo_dataset_out, "write the simulated dataset JSON here");
  add_seed(tomo_cmd);

  std::string fisher_path = "negativity";
  double fisher_theta = 0.5;
  double fisher_dtheta = qmet::kDefaultFisherStep;
  std::string fisher_setting = "DAxDA";
  auto* fisher_cmd = app.add_subcommand("fisher", "numeric QFI/CFI on the q = 1/2 path vs the closed-form bound");
  fisher_cmd->add_option("--path", fisher_path, "negativity | log_negativity | qgd")->capture_default_str();
  fisher_cmd->add_option("--theta", fisher_theta, "path parameter")->capture_default_str();
  fisher_cmd->add_option("--dtheta", fisher_dtheta, "central-difference step")->capture_default_str();
  fisher_cmd->add_option("--setting", fisher_setting, "measurement for the CFI")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*state_cmd) return run_state(state_args, state_json);

    if (*probe_cmd) {
      const qmet::Setting setting = qmet::parse_setting(probe_setting);
      const auto probs = qmet::outcome_probabilities(qmet::family_state(to_params(probe_args)), setting);
      std::cout << Json{{"setting", qmet::to_string(setting)},
                        {"p_pp", probs.pp()},
                        {"p_pm", probs.pm()},
                        {"p_mp", probs.mp()},
                        {"p_mm", probs.mm()}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (*sample_cmd) {
      const qmet::FamilyParams params = to_params(sample_args);
      const qmet::Setting setting = qmet::parse_setting(sample_setting);
      const qmet::MixingMode mode = qmet::parse_mixing_mode(sample_mode);
      if (sample_n == 0) throw std::invalid_argument("--n must be positive");
      qmet::RandomStream stream(seed);
      qmet::CountsRecord record;
      record.setting = setting;
      record.seed = seed;
      if (mode == qmet::MixingMode::DirectState) {
        record.counts = qmet::sample_counts(qmet::family_state(params), setting, sample_n, stream);
      } else {
        const auto pure = qmet::sample_counts(qmet::family_state({1.0, params.q}), setting, sample_n, stream);
        const auto mixed = qmet::sample_counts(qmet::family_state({0.0, params.q}), setting, sample_n, stream);
        record.counts = qmet::mix_counts(pure, mixed, params.p, stream);
      }
      std::cout << qmet::to_json(record).dump(2) << "\n";
      return 0;
    }

    if (*est_cmd) {
      const qmet::MeasureKind kind = qmet::parse_measure_kind(est_kind);
      const qmet::Variant variant = qmet::parse_variant(est_variant);
      qmet::OutcomeCounts counts;
      if (!est_counts.empty()) {
        const qmet::CountsRecord record = qmet::counts_record_from_json(read_json_file(est_counts));
        if (!(record.setting == qmet::kDiagonalSetting))
          throw std::invalid_argument("estimators need DAxDA counts, got " + qmet::to_string(record.setting));
        counts = record.counts;
      } else {
        if (est_n == 0) throw std::invalid_argument("--n must be positive");
        qmet::RandomStream stream(seed);
        counts = qmet::sample_counts(qmet::family_state(to_params(est_args)), qmet::kDiagonalSetting, est_n,
                                     stream);
      }
      std::cout << qmet::to_json(qmet::estimate(kind, variant, counts, est_truth)).dump(2) << "\n";
      return 0;
    }

    if (*sweep_cmd) {
      qmet::SweepConfig cfg;
      if (!sweep_config.empty()) cfg = qmet::load_sweep_config(sweep_config);
      if (sweep_seed->count() > 0 || std::getenv("QMET_SEED")) cfg.master_seed = seed;
      for (const std::string& entry : sweep_overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + entry);
        qmet::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
      }
      if (sweep_variance) cfg.repetitions = cfg.variance_reps;
      cfg.validate();
      if (sweep_print) {
        std::cout << qmet::format_sweep_config(cfg);
        return 0;
      }
      const auto rows = qmet::run_sweep(cfg);
      for (const auto& path : qmet::write_sweep_outputs(rows, sweep_out)) std::cout << path.string() << "\n";
      return 0;
    }

    if (*tomo_cmd) {
      const qmet::FamilyParams params = to_params(tomo_args);
      const qmet::DensityMatrix truth = qmet::family_state(params);
      qmet::TomoDataset data;
      if (!tomo_data.empty()) {
        data = qmet::tomo_dataset_from_json(read_json_file(tomo_data));
      } else {
        if (tomo_n == 0) throw std::invalid_argument("--n-per-setting must be positive");
        qmet::RandomStream stream(seed);
        data = qmet::simulate_tomography(truth, tomo_n, stream);
      }
      if (!tomo_dataset_out.empty()) write_text_file(tomo_dataset_out, qmet::to_json(data).dump(2) + "\n");

      qmet::Reconstruction recon;
      if (tomo_method == "mle") {
        recon = qmet::reconstruct_mle(data);
      } else if (tomo_method == "linear") {
        recon = qmet::reconstruct_linear(data);
      } else {
        throw std::invalid_argument("--method must be mle or linear");
      }
      if (!tomo_export.empty()) write_text_file(tomo_export, qmet::to_json(recon).dump(2) + "\n");

      const qmet::TomoReport report = qmet::tomo_report(truth, recon);
      std::cout << Json{{"p", params.p},
                        {"q", params.q},
                        {"n_per_setting", data.n_per_setting},
                        {"method", std::string(qmet::to_string(recon.method))},
                        {"iterations", recon.iterations},
                        {"converged", recon.converged},
                        {"psd_violation", recon.psd_violation},
                        {"log_likelihood", recon.log_likelihood},
                        {"fidelity", report.fidelity},
                        {"fit", fit_json(report.fit)},
                        {"negativity", report.negativity},
                        {"log_negativity", report.log_negativity},
                        {"concurrence", report.concurrence},
                        {"qgd", report.qgd}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (*fisher_cmd) {
      const qmet::MeasureKind kind = qmet::parse_measure_kind(fisher_path);
      const auto povm = qmet::setting_povm(qmet::parse_setting(fisher_setting));
      const qmet::FisherReport report =
          qmet::fisher_report(qmet::path_for(kind), fisher_theta, povm, fisher_dtheta);
      Json j = qmet::to_json(report);
      j["path"] = std::string(qmet::to_string(kind));
      j["setting"] = fisher_setting;
      j["qcrb_closed"] = qmet::qcrb_curve(kind, fisher_theta);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "qmet: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "qmet: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "qmet: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
