#include "qmet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qmet {

namespace {

constexpr std::uint64_t kEstimationStream = 0;
constexpr std::uint64_t kTomographyStream = 1;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"'");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"'");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw std::invalid_argument("config: " + std::string(key) + " expects a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw std::invalid_argument("config: " + std::string(key) + " expects a non-negative integer, got '" +
                                text + "'");
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

unsigned resolve_threads(unsigned requested, std::uint64_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work, 1)));
}

OutcomeCounts mixed_counts_for(const FamilyParams& params, const Setting& setting,
                               std::uint64_t n_shots, RandomStream& stream) {
  const OutcomeCounts pure = sample_counts(family_state({1.0, params.q}), setting, n_shots, stream);
  const OutcomeCounts mixed = sample_counts(family_state({0.0, params.q}), setting, n_shots, stream);
  return mix_counts(pure, mixed, params.p, stream);
}

double estimated_p(const SweepConfig& cfg, const FamilyParams& params, RandomStream stream) {
  TomoDataset data;
  if (cfg.mixing_mode == MixingMode::DirectState) {
    data = simulate_tomography(family_state(params), cfg.tomo_shots, stream);
  } else {
    data.n_per_setting = cfg.tomo_shots;
    for (const Setting& s : standard_settings())
      data.records.push_back({s, mixed_counts_for(params, s, cfg.tomo_shots, stream)});
  }
  return fit_family_params(reconstruct_mle(data).physical()).params.p;
}

std::string_view color_for(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Negativity: return "#1f4fb4";
    case MeasureKind::LogNegativity: return "#d0461e";
    case MeasureKind::Concurrence: return "#d0461e";
    case MeasureKind::QGD: return "#2a8a3a";
  }
  return "#000000";
}

std::string_view title_for(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Negativity: return "Negativity";
    case MeasureKind::LogNegativity: return "Log-negativity";
    case MeasureKind::Concurrence: return "Concurrence";
    case MeasureKind::QGD: return "Quantum geometric discord";
  }
  return "";
}

// Maps data coordinates into one rectangular plot area.
struct Panel {
  double left, top, width, height;
  double x_lo, x_hi, y_lo, y_hi;

  double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * width; }
  double py(double y) const { return top + height - (y - y_lo) / (y_hi - y_lo) * height; }
};

void draw_axes(std::ostringstream& os, const Panel& p, std::string_view ylabel) {
  os << "<rect x=\"" << fmt_short(p.left) << "\" y=\"" << fmt_short(p.top) << "\" width=\""
     << fmt_short(p.width) << "\" height=\"" << fmt_short(p.height)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double x = p.x_lo + (p.x_hi - p.x_lo) * k / 5.0;
    const double y = p.y_lo + (p.y_hi - p.y_lo) * k / 5.0;
    os << "<text x=\"" << fmt_short(p.px(x)) << "\" y=\"" << fmt_short(p.top + p.height + 16)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_short(x) << "</text>\n";
    os << "<text x=\"" << fmt_short(p.left - 6) << "\" y=\"" << fmt_short(p.py(y) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_short(y) << "</text>\n";
  }
  os << "<text x=\"" << fmt_short(p.left + p.width / 2) << "\" y=\""
     << fmt_short(p.top + p.height + 32) << "\" font-size=\"12\" text-anchor=\"middle\">p</text>\n";
  os << "<text x=\"" << fmt_short(p.left - 44) << "\" y=\"" << fmt_short(p.top + p.height / 2)
     << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 "
     << fmt_short(p.left - 44) << " " << fmt_short(p.top + p.height / 2) << ")\">" << ylabel
     << "</text>\n";
}

template <typename Fn>
void draw_curve(std::ostringstream& os, const Panel& p, Fn&& fn, std::string_view color,
                std::string_view dash) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  constexpr int kSamples = 101;
  for (int k = 0; k < kSamples; ++k) {
    const double x = p.x_lo + (p.x_hi - p.x_lo) * k / (kSamples - 1);
    os << (k ? " " : "") << fmt_short(p.px(x)) << "," << fmt_short(p.py(fn(x)));
  }
  os << "\"/>\n";
}

}  // namespace

std::string_view to_string(MixingMode mode) {
  return mode == MixingMode::DirectState ? "direct" : "postmix";
}

MixingMode parse_mixing_mode(std::string_view text) {
  if (text == "direct" || text == "DirectState") return MixingMode::DirectState;
  if (text == "postmix" || text == "PostProcessMix" || text == "post_process_mix")
    return MixingMode::PostProcessMix;
  throw std::invalid_argument("unknown mixing mode: " + std::string(text));
}

double family_measure(MeasureKind kind, const FamilyParams& params) {
  switch (kind) {
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
      return negativity_closed(params).value;
    case MeasureKind::LogNegativity:
      return log_negativity_closed(params).value;
    case MeasureKind::QGD:
      return qgd_closed(params).value;
  }
  return 0.0;
}

void SweepConfig::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("config: q must lie in [0, 1]");
  if (p_grid.empty()) throw std::invalid_argument("config: p_grid is empty");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("config: p_grid values must lie in [0, 1]");
  if (n_shots == 0) throw std::invalid_argument("config: n_shots must be positive");
  if (repetitions < 2) throw std::invalid_argument("config: repetitions must be at least 2");
  if (variance_reps < 2) throw std::invalid_argument("config: variance_reps must be at least 2");
  if (tomo_shots == 0) throw std::invalid_argument("config: tomo_shots must be positive");
}

void apply_config_entry(SweepConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "q") {
    cfg.q = parse_double(key, value);
  } else if (key == "p_grid") {
    std::string list = value;
    std::erase(list, '[');
    std::erase(list, ']');
    cfg.p_grid.clear();
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) cfg.p_grid.push_back(parse_double(key, t));
    }
  } else if (key == "n_shots") {
    cfg.n_shots = parse_unsigned(key, value);
  } else if (key == "repetitions" || key == "reps") {
    cfg.repetitions = parse_unsigned(key, value);
  } else if (key == "variance_reps") {
    cfg.variance_reps = parse_unsigned(key, value);
  } else if (key == "master_seed" || key == "seed") {
    cfg.master_seed = parse_unsigned(key, value);
  } else if (key == "mixing_mode") {
    cfg.mixing_mode = parse_mixing_mode(value);
  } else if (key == "tomo_shots") {
    cfg.tomo_shots = parse_unsigned(key, value);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(parse_unsigned(key, value));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

SweepConfig parse_sweep_config(std::istream& in, SweepConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    if (trim(line).front() == '[') continue;  // tolerate TOML section headers
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    apply_config_entry(base, std::string_view(line).substr(0, eq),
                       std::string_view(line).substr(eq + 1));
  }
  return base;
}

SweepConfig load_sweep_config(const std::filesystem::path& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  return parse_sweep_config(in, std::move(base));
}

std::string format_sweep_config(const SweepConfig& cfg) {
  std::ostringstream os;
  os << "q = " << fmt(cfg.q) << "\n";
  os << "p_grid = ";
  for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) os << (i ? ", " : "") << fmt(cfg.p_grid[i]);
  os << "\n";
  os << "n_shots = " << cfg.n_shots << "\n";
  os << "repetitions = " << cfg.repetitions << "\n";
  os << "variance_reps = " << cfg.variance_reps << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "mixing_mode = " << to_string(cfg.mixing_mode) << "\n";
  os << "tomo_shots = " << cfg.tomo_shots << "\n";
  os << "threads = " << cfg.threads << "\n";
  return os.str();
}

OutcomeCounts draw_diagonal_counts(const FamilyParams& params, MixingMode mode,
                                   std::uint64_t n_shots, RandomStream& stream) {
  if (mode == MixingMode::DirectState)
    return sample_counts(family_state(params), kDiagonalSetting, n_shots, stream);
  return mixed_counts_for(params, kDiagonalSetting, n_shots, stream);
}

EstimatorSamples sample_estimators(const FamilyParams& params, MixingMode mode,
                                   std::uint64_t n_shots, std::uint64_t reps,
                                   const RandomStream& base, unsigned threads) {
  params.validate();
  EstimatorSamples out;
  for (auto& v : out.values) v.assign(reps, 0.0);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream stream = base.substream(r);
      const OutcomeCounts counts = draw_diagonal_counts(params, mode, n_shots, stream);
      for (std::size_t e = 0; e < kSweepEstimators.size(); ++e)
        out.values[e][r] = estimate(kSweepEstimators[e].kind, kSweepEstimators[e].variant, counts).value;
    }
  };

  const unsigned n_threads = resolve_threads(threads, reps);
  if (n_threads == 1) {
    work(0, reps);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (reps + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min(reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }
  return out;
}

double SampleStats::standard_error() const {
  return count ? stddev / std::sqrt(static_cast<double>(count)) : 0.0;
}

SampleStats summarize(const std::vector<double>& values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.master_seed);
  std::vector<SweepRow> rows(cfg.p_grid.size());

  auto fill_row = [&](std::size_t i) {
    const FamilyParams params{cfg.p_grid[i], cfg.q};
    const RandomStream point = root.substream(i);
    SweepRow& row = rows[i];
    row.p_true = params.p;
    row.q = params.q;
    row.n_shots = cfg.n_shots;
    row.reps = cfg.repetitions;
    row.seed = cfg.master_seed;
    row.p_fitted = estimated_p(cfg, params, point.substream(kTomographyStream));

    const EstimatorSamples samples = sample_estimators(
        params, cfg.mixing_mode, cfg.n_shots, cfg.repetitions, point.substream(kEstimationStream), 1);
    for (std::size_t e = 0; e < kSweepEstimators.size(); ++e) {
      const EstimatorId id = kSweepEstimators[e];
      const SampleStats s = summarize(samples.values[e]);
      EstimatorStats& st = row.stats[e];
      st.id = id;
      st.mean = s.mean;
      st.stddev = s.stddev;
      st.theory_value = family_measure(id.kind, params);
      st.unc_nonopt = nonoptimal_uncertainty_curve(id.kind, st.theory_value);
      st.unc_qcrb = qcrb_uncertainty_curve(id.kind, st.theory_value);
    }
  };

  // Grid points are independent; each owns its derived streams and its row.
  const unsigned n_threads = resolve_threads(cfg.threads, rows.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < rows.size(); i += n_threads) fill_row(i);
      });
  }
  return rows;
}

std::string emit_csv(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const SweepRow& row : rows) {
    for (const EstimatorStats& st : row.stats) {
      os << fmt(row.p_true) << ',' << fmt(row.p_fitted) << ',' << to_string(st.id.kind) << ','
         << to_string(st.id.variant) << ',' << fmt(st.mean) << ',' << fmt(st.stddev) << ','
         << fmt(st.theory_value) << ',' << fmt(st.unc_nonopt) << ',' << fmt(st.unc_qcrb) << ','
         << row.n_shots << ',' << row.reps << ',' << row.seed << "\n";
    }
  }
  return os.str();
}

std::string svg_file_name(const EstimatorId& id) {
  return "sweep_" + std::string(to_string(id.kind)) + "_" + std::string(to_string(id.variant)) +
         ".svg";
}

std::string emit_svg(const std::vector<SweepRow>& rows, const EstimatorId& id) {
  if (rows.empty()) throw std::invalid_argument("emit_svg: no rows");
  const auto it = std::find_if(kSweepEstimators.begin(), kSweepEstimators.end(), [&](const EstimatorId& e) {
    return e.kind == id.kind && e.variant == id.variant;
  });
  if (it == kSweepEstimators.end()) throw std::invalid_argument("emit_svg: estimator not in sweep");
  const std::size_t e = static_cast<std::size_t>(it - kSweepEstimators.begin());

  const double q = rows.front().q;
  const double sqrt_n = std::sqrt(static_cast<double>(rows.front().n_shots));
  const std::string_view color = color_for(id.kind);
  auto value_at = [&](double p) { return family_measure(id.kind, {std::clamp(p, 0.0, 1.0), q}); };
  auto nonopt_at = [&](double p) { return nonoptimal_uncertainty_curve(id.kind, value_at(p)); };
  auto qcrb_at = [&](double p) { return qcrb_uncertainty_curve(id.kind, value_at(p)); };

  const MeasureRange range = measure_range(id.kind);
  double v_lo = range.lo;
  double v_hi = range.hi;
  double u_hi = 0.0;
  for (int k = 0; k <= 100; ++k) u_hi = std::max(u_hi, nonopt_at(k / 100.0));
  for (const SweepRow& row : rows) {
    const EstimatorStats& st = row.stats[e];
    v_lo = std::min(v_lo, st.mean - st.stddev);
    v_hi = std::max(v_hi, st.mean + st.stddev);
    u_hi = std::max(u_hi, st.stddev * sqrt_n);
  }
  const double pad = 0.05 * (v_hi - v_lo);
  const Panel top{70, 40, 520, 260, 0.0, 1.0, v_lo - pad, v_hi + pad};
  const Panel bottom{70, 380, 520, 260, 0.0, 1.0, 0.0, 1.05 * std::max(u_hi, 1e-9)};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"700\" "
        "viewBox=\"0 0 640 700\">\n";
  os << "<rect width=\"640\" height=\"700\" fill=\"white\"/>\n";
  os << "<text x=\"320\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << title_for(id.kind)
     << ", " << (id.variant == Variant::Optimal ? "optimal" : "non-optimal")
     << " estimator (q = " << fmt_short(q) << ", n = " << rows.front().n_shots
     << ", M = " << rows.front().reps << ")</text>\n";

  draw_axes(os, top, "estimate");
  draw_curve(os, top, value_at, color, "6,4");
  for (const SweepRow& row : rows) {
    const EstimatorStats& st = row.stats[e];
    const double x = top.px(row.p_true);
    os << "<line x1=\"" << fmt_short(x) << "\" y1=\"" << fmt_short(top.py(st.mean - st.stddev))
       << "\" x2=\"" << fmt_short(x) << "\" y2=\"" << fmt_short(top.py(st.mean + st.stddev))
       << "\" stroke=\"" << color << "\"/>\n";
    os << "<circle cx=\"" << fmt_short(x) << "\" cy=\"" << fmt_short(top.py(st.mean))
       << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
  }

  draw_axes(os, bottom, "stddev x sqrt(n)");
  draw_curve(os, bottom, nonopt_at, color, "2,3");
  draw_curve(os, bottom, qcrb_at, color, "");
  for (const SweepRow& row : rows) {
    const EstimatorStats& st = row.stats[e];
    os << "<circle cx=\"" << fmt_short(bottom.px(row.p_true)) << "\" cy=\""
       << fmt_short(bottom.py(st.stddev * sqrt_n)) << "\" r=\"3.5\" fill=\"none\" stroke=\""
       << color << "\"/>\n";
  }
  os << "<text x=\"590\" y=\"372\" font-size=\"11\" text-anchor=\"end\">dotted: non-optimal "
        "bound, solid: QCRB</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> write_sweep_outputs(const std::vector<SweepRow>& rows,
                                                       const std::filesystem::path& dir) {
  if (rows.empty()) throw std::invalid_argument("write_sweep_outputs: no rows");
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  files.emplace_back(dir / "sweep.csv", emit_csv(rows));
  for (const EstimatorId& id : kSweepEstimators) files.emplace_back(dir / svg_file_name(id), emit_svg(rows, id));

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace qmet
