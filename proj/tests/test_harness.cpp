#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "qmet/harness.hpp"
#include "support/oracles.hpp"

using qmet::kSweepEstimators;
using qmet::MeasureKind;
using qmet::MixingMode;
using qmet::RandomStream;
using qmet::SweepConfig;
using qmet::Variant;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.p_grid = {0.0, 0.5, 1.0};
  cfg.n_shots = 2000;
  cfg.repetitions = 20;
  cfg.tomo_shots = 2000;
  cfg.master_seed = 3;
  return cfg;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

std::size_t index_of(MeasureKind k, Variant v) {
  for (std::size_t e = 0; e < kSweepEstimators.size(); ++e)
    if (kSweepEstimators[e].kind == k && kSweepEstimators[e].variant == v) return e;
  return kSweepEstimators.size();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qmet_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  SweepConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.q == 0.5);
  CHECK(cfg.p_grid.size() == 11);
  CHECK(cfg.n_shots == 10000);
  CHECK(cfg.repetitions == 10);
  CHECK(cfg.variance_reps == 1000);
  CHECK(cfg.mixing_mode == MixingMode::DirectState);

  auto bad = cfg;
  bad.repetitions = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.p_grid = {0.2, 1.2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.p_grid.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.n_shots = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.q = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# sweep\n"
      "[sweep]\n"
      "q = 0.4\n"
      "p_grid = [0, 0.25, 1]   # three points\n"
      "n_shots = 5000\n"
      "reps = 7\n"
      "seed = 99\n"
      "mixing_mode = \"postmix\"\n");
  const SweepConfig cfg = qmet::parse_sweep_config(in);
  CHECK(cfg.q == 0.4);
  CHECK(cfg.p_grid == std::vector<double>{0, 0.25, 1});
  CHECK(cfg.n_shots == 5000);
  CHECK(cfg.repetitions == 7);
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.mixing_mode == MixingMode::PostProcessMix);
  CHECK(cfg.variance_reps == 1000);

  std::istringstream round_trip(qmet::format_sweep_config(cfg));
  const SweepConfig again = qmet::parse_sweep_config(round_trip);
  CHECK(qmet::format_sweep_config(again) == qmet::format_sweep_config(cfg));

  SweepConfig c;
  CHECK_THROWS_AS(qmet::apply_config_entry(c, "shots", "10"), std::invalid_argument);
  CHECK_THROWS_AS(qmet::apply_config_entry(c, "n_shots", "ten"), std::invalid_argument);
  CHECK_THROWS_AS(qmet::apply_config_entry(c, "n_shots", "-5"), std::invalid_argument);
  CHECK_THROWS_AS(qmet::apply_config_entry(c, "q", "0.5x"), std::invalid_argument);
  CHECK_THROWS_AS(qmet::apply_config_entry(c, "mixing_mode", "blend"), std::invalid_argument);
  std::istringstream no_equals("n_shots 10\n");
  CHECK_THROWS_AS(qmet::parse_sweep_config(no_equals), std::invalid_argument);
  CHECK_THROWS_AS(qmet::load_sweep_config("/nonexistent/qmet.cfg"), std::invalid_argument);
}

TEST_CASE("family measures") {
  CHECK(qmet::family_measure(MeasureKind::Negativity, {0.6, 0.5}) == doctest::Approx(0.6));
  CHECK(qmet::family_measure(MeasureKind::LogNegativity, {0.6, 0.5}) == doctest::Approx(std::log2(1.6)));
  CHECK(qmet::family_measure(MeasureKind::QGD, {0.6, 0.5}) == doctest::Approx(0.18));
}

TEST_CASE("diagonal counts under both mixing modes") {
  RandomStream s(1);
  for (MixingMode mode : {MixingMode::DirectState, MixingMode::PostProcessMix}) {
    const auto c = qmet::draw_diagonal_counts({1.0, 0.5}, mode, 3000, s);
    CHECK(c.total() == 3000);
    CHECK(c.pp() == 0);
    CHECK(c.mm() == 0);
  }
  RandomStream a(2), b(2);
  CHECK(qmet::draw_diagonal_counts({0.4, 0.5}, MixingMode::PostProcessMix, 1000, a) ==
        qmet::draw_diagonal_counts({0.4, 0.5}, MixingMode::PostProcessMix, 1000, b));
}

TEST_CASE("repeated estimation does not depend on the thread count") {
  const RandomStream base(12);
  const auto one = qmet::sample_estimators({0.3, 0.5}, MixingMode::DirectState, 1000, 37, base, 1);
  const auto many = qmet::sample_estimators({0.3, 0.5}, MixingMode::DirectState, 1000, 37, base, 5);
  for (std::size_t e = 0; e < kSweepEstimators.size(); ++e) {
    CHECK(one.values[e].size() == 37);
    CHECK(one.values[e] == many.values[e]);
  }
  // repetitions are independent draws
  CHECK(one.values[1][0] != one.values[1][1]);
}

TEST_CASE("summary statistics") {
  const auto s = qmet::summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.count == 4);
  CHECK(s.standard_error() == doctest::Approx(s.stddev / 2.0));
  CHECK(qmet::summarize({}).count == 0);
}

TEST_CASE("pure and mixed endpoints of the sweep") {
  const std::uint64_t n = 10000;
  SUBCASE("p = 1") {
    const auto samples = qmet::sample_estimators({1.0, 0.5}, MixingMode::DirectState, n, 50, RandomStream(4));
    const auto opt = qmet::summarize(samples.values[index_of(MeasureKind::Negativity, Variant::Optimal)]);
    CHECK(opt.mean == doctest::Approx(1.0));
    CHECK(opt.stddev * std::sqrt(double(n)) < 1e-9);
  }
  SUBCASE("p = 0") {
    const auto samples = qmet::sample_estimators({0.0, 0.5}, MixingMode::DirectState, n, 400, RandomStream(5));
    for (std::size_t e = 0; e < kSweepEstimators.size(); ++e) {
      const auto s = qmet::summarize(samples.values[e]);
      CHECK(std::abs(s.mean) < 0.01);
    }
    const auto opt = qmet::summarize(samples.values[index_of(MeasureKind::Negativity, Variant::Optimal)]);
    CHECK(opt.stddev * std::sqrt(double(n)) == doctest::Approx(1.0).epsilon(0.15));
  }
}

TEST_CASE("optimal negativity variance at p = 0.6 follows sqrt(1 - N^2)") {
  const std::uint64_t n = 10000;
  const auto samples = qmet::sample_estimators({0.6, 0.5}, MixingMode::DirectState, n, 1000, RandomStream(6));
  const auto s = qmet::summarize(samples.values[index_of(MeasureKind::Negativity, Variant::Optimal)]);
  CHECK(s.stddev * std::sqrt(double(n)) == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("post-processing mixing matches direct sampling") {
  for (double p : {0.2, 0.7}) {
    const auto direct = qmet::sample_estimators({p, 0.5}, MixingMode::DirectState, 4000, 300, RandomStream(7));
    const auto mixed = qmet::sample_estimators({p, 0.5}, MixingMode::PostProcessMix, 4000, 300, RandomStream(8));
    for (std::size_t e = 0; e < kSweepEstimators.size(); ++e) {
      const auto a = qmet::summarize(direct.values[e]);
      const auto b = qmet::summarize(mixed.values[e]);
      const double se = std::hypot(a.standard_error(), b.standard_error());
      CHECK(std::abs(a.mean - b.mean) <= 3 * se + 1e-12);
    }
  }
}

TEST_CASE("sweep rows") {
  const SweepConfig cfg = small_config();
  const auto rows = qmet::run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.n_shots == cfg.n_shots);
    CHECK(row.reps == cfg.repetitions);
    CHECK(row.seed == cfg.master_seed);
    CHECK(std::abs(row.p_fitted - row.p_true) < 0.05);
    for (std::size_t e = 0; e < kSweepEstimators.size(); ++e) {
      const auto& st = row.stats[e];
      CHECK(st.id.kind == kSweepEstimators[e].kind);
      CHECK(std::isfinite(st.mean));
      CHECK(st.stddev >= 0.0);
      CHECK(st.unc_qcrb <= st.unc_nonopt + 1e-12);
      CHECK(st.theory_value == doctest::Approx(qmet::family_measure(st.id.kind, {row.p_true, row.q})));
    }
  }
  auto threaded = cfg;
  threaded.threads = 3;
  CHECK(qmet::emit_csv(qmet::run_sweep(threaded)) == qmet::emit_csv(rows));
  auto bad = cfg;
  bad.p_grid.clear();
  CHECK_THROWS_AS(qmet::run_sweep(bad), std::invalid_argument);
}

TEST_CASE("CSV output") {
  auto cfg = small_config();
  cfg.p_grid = {0.6};
  const auto rows = qmet::run_sweep(cfg);
  const auto table = parse_csv(qmet::emit_csv(rows));
  REQUIRE(table.size() == 1 + kSweepEstimators.size());
  CHECK(qmet::emit_csv(rows).substr(0, qmet::kCsvHeader.size()) == qmet::kCsvHeader);
  for (std::size_t r = 1; r < table.size(); ++r) {
    REQUIRE(table[r].size() == 12);
    CHECK(table[r][0] == "0.6");
    const MeasureKind kind = qmet::parse_measure_kind(table[r][2]);
    const double value = std::stod(table[r][6]);
    const double nonopt = std::stod(table[r][7]);
    const double qcrb = std::stod(table[r][8]);
    // n = 0.6 on the q = 1/2 slice; the curves below are written out directly
    const double n = 0.6;
    if (kind == MeasureKind::Negativity) {
      CHECK(value == doctest::Approx(n));
      CHECK(nonopt == doctest::Approx(std::sqrt(3 - 2 * n - n * n)));
      CHECK(qcrb == doctest::Approx(std::sqrt(1 - n * n)));
    } else if (kind == MeasureKind::LogNegativity) {
      CHECK(value == doctest::Approx(std::log2(1 + n)));
      CHECK(nonopt == doctest::Approx(std::sqrt(3 - 2 * n - n * n) / ((1 + n) * std::log(2.0))));
      CHECK(qcrb == doctest::Approx(std::sqrt(1 - n * n) / ((1 + n) * std::log(2.0))));
    } else {
      CHECK(value == doctest::Approx(n * n / 2));
      CHECK(nonopt == doctest::Approx(n * std::sqrt(3 - 2 * n - n * n)));
      CHECK(qcrb == doctest::Approx(n * std::sqrt(1 - n * n)));
    }
    CHECK(table[r][9] == "2000");
    CHECK(table[r][10] == "20");
    CHECK(table[r][11] == "3");
  }
  CHECK_THROWS_AS(qmet::emit_csv({}), std::invalid_argument);
}

TEST_CASE("SVG output and files") {
  const auto rows = qmet::run_sweep(small_config());
  for (const auto& id : kSweepEstimators) {
    const std::string svg = qmet::emit_svg(rows, id);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"6,4\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"2,3\"") != std::string::npos);
  }
  CHECK(qmet::svg_file_name({MeasureKind::QGD, Variant::Optimal}) == "sweep_qgd_optimal.svg");
  CHECK_THROWS_AS(qmet::emit_svg({}, kSweepEstimators[0]), std::invalid_argument);
  CHECK_THROWS_AS(qmet::emit_svg(rows, {MeasureKind::Concurrence, Variant::Optimal}), std::invalid_argument);

  const auto dir = scratch_dir("outputs");
  const auto written = qmet::write_sweep_outputs(rows, dir);
  CHECK(written.size() == 7);
  for (const auto& path : written) CHECK(std::filesystem::file_size(path) > 0);

  const auto empty_dir = scratch_dir("empty");
  CHECK_THROWS_AS(qmet::write_sweep_outputs({}, empty_dir), std::invalid_argument);
  CHECK_FALSE(std::filesystem::exists(empty_dir));
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical seeds give identical CSV, different seeds do not") {
  auto cfg = small_config();
  const std::string a = qmet::emit_csv(qmet::run_sweep(cfg));
  const std::string b = qmet::emit_csv(qmet::run_sweep(cfg));
  CHECK(a == b);
  cfg.master_seed = 4;
  CHECK(qmet::emit_csv(qmet::run_sweep(cfg)) != a);
}
