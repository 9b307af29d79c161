#include "qmet/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qmet {

namespace {

constexpr std::size_t kParams = 16;
using ParamVector = std::array<double, kParams>;
using ParamMatrix = std::array<ParamVector, kParams>;

// Strictly-lower entries of T, in parameter order after the four diagonals.
constexpr std::array<std::pair<std::size_t, std::size_t>, 6> kLowerEntries{
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

struct FlatData {
  std::vector<ComplexMatrix> projectors;
  std::vector<double> counts;
  double total = 0.0;
};

FlatData flatten(const TomoDataset& data) {
  FlatData flat;
  for (const TomoRecord& record : data.records) {
    const auto projectors = joint_projectors(record.setting);
    for (std::size_t k = 0; k < 4; ++k) {
      flat.projectors.push_back(projectors[k]);
      flat.counts.push_back(static_cast<double>(record.counts.n[k]));
      flat.total += flat.counts.back();
    }
  }
  return flat;
}

double expectation(const ComplexMatrix& projector, const ComplexMatrix& rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) sum += (projector(i, j) * rho(j, i)).real();
  return sum;
}

ComplexMatrix lower_from_params(const ParamVector& x) {
  ComplexMatrix t(4);
  for (std::size_t i = 0; i < 4; ++i) t(i, i) = x[i];
  for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
    const auto [i, j] = kLowerEntries[k];
    t(i, j) = Complex(x[4 + 2 * k], x[5 + 2 * k]);
  }
  return t;
}

ParamVector params_from_lower(const ComplexMatrix& t) {
  ParamVector x{};
  for (std::size_t i = 0; i < 4; ++i) x[i] = t(i, i).real();
  for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
    const auto [i, j] = kLowerEntries[k];
    x[4 + 2 * k] = t(i, j).real();
    x[5 + 2 * k] = t(i, j).imag();
  }
  return x;
}

// Standard Cholesky a = L L^dagger of a positive definite matrix.
ComplexMatrix cholesky(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) throw std::domain_error("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * std::conj(l(j, k));
      l(i, j) = sum / l(j, j).real();
    }
  }
  return l;
}

// Lower-triangular T with T^dagger T = rho, via Cholesky of the
// index-reversed matrix.
ComplexMatrix lower_factor(const ComplexMatrix& rho) {
  ComplexMatrix reversed(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) reversed(i, j) = rho(3 - i, 3 - j);
  const ComplexMatrix l = cholesky(reversed);
  ComplexMatrix upper(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) upper(i, j) = l(3 - i, 3 - j);
  return upper.adjoint();
}

// Negative per-shot log-likelihood of T^dagger T / s plus a (s - 1)^2 term
// that pins the otherwise free overall scale of T.
class CholeskyObjective {
 public:
  explicit CholeskyObjective(const FlatData& data) : data_(data) {}

  double value(const ParamVector& x, ParamVector* grad) const {
    const ComplexMatrix t = lower_from_params(x);
    const ComplexMatrix unnormalized = t.adjoint() * t;
    const double s = unnormalized.trace().real();
    double loglik = 0.0;
    ComplexMatrix g(4);
    double unguarded = 0.0;
    for (std::size_t k = 0; k < data_.projectors.size(); ++k) {
      const double n = data_.counts[k];
      const double weight = expectation(data_.projectors[k], unnormalized);
      const double p = weight / s;
      if (p < kLikelihoodProbabilityFloor) {
        loglik += n * std::log(kLikelihoodProbabilityFloor);
        continue;
      }
      loglik += n * std::log(p);
      if (n > 0.0) {
        g += data_.projectors[k] * Complex(n / weight);
        unguarded += n;
      }
    }
    const double penalty = (s - 1.0) * (s - 1.0);
    const double f = -loglik / data_.total + penalty;
    if (grad) {
      for (std::size_t i = 0; i < 4; ++i) g(i, i) -= unguarded / s;
      const ComplexMatrix gt = g * t.adjoint();
      const double scale = -2.0 / data_.total;
      const double penalty_slope = 4.0 * (s - 1.0);
      for (std::size_t i = 0; i < 4; ++i) (*grad)[i] = scale * gt(i, i).real() + penalty_slope * x[i];
      for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
        const auto [i, j] = kLowerEntries[k];
        (*grad)[4 + 2 * k] = scale * gt(j, i).real() + penalty_slope * x[4 + 2 * k];
        (*grad)[5 + 2 * k] = -scale * gt(j, i).imag() + penalty_slope * x[5 + 2 * k];
      }
    }
    return f;
  }

 private:
  const FlatData& data_;
};

double dot(const ParamVector& a, const ParamVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kParams; ++i) s += a[i] * b[i];
  return s;
}

ParamMatrix identity_matrix() {
  ParamMatrix h{};
  for (std::size_t i = 0; i < kParams; ++i) h[i][i] = 1.0;
  return h;
}

ParamVector mat_vec(const ParamMatrix& m, const ParamVector& v) {
  ParamVector out{};
  for (std::size_t i = 0; i < kParams; ++i) out[i] = dot(m[i], v);
  return out;
}

// Solves a (symmetric positive definite) 16x16 system by Gaussian
// elimination with partial pivoting.
ParamVector solve(ParamMatrix a, ParamVector b) {
  for (std::size_t col = 0; col < kParams; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < kParams; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12)
      throw std::domain_error("reconstruct_linear: singular design matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < kParams; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < kParams; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  ParamVector x{};
  for (std::size_t r = kParams; r-- > 0;) {
    double sum = b[r];
    for (std::size_t c = r + 1; c < kParams; ++c) sum -= a[r][c] * x[c];
    x[r] = sum / a[r][r];
  }
  return x;
}

std::array<ComplexMatrix, kParams> pauli_basis() {
  const std::array<ComplexMatrix, 4> single{pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
  std::array<ComplexMatrix, kParams> basis;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) basis[4 * i + j] = kron(single[i], single[j]);
  return basis;
}

}  // namespace

void TomoDataset::validate() const {
  if (n_per_setting == 0) throw std::invalid_argument("TomoDataset: n_per_setting must be positive");
  const auto settings = standard_settings();
  if (records.size() != settings.size())
    throw std::invalid_argument("TomoDataset: expected one record per standard setting");
  for (const Setting& s : settings) {
    const auto hits = std::count_if(records.begin(), records.end(),
                                    [&](const TomoRecord& r) { return r.setting == s; });
    if (hits != 1)
      throw std::invalid_argument("TomoDataset: setting " + to_string(s) + " missing or repeated");
  }
  for (const TomoRecord& r : records)
    if (r.counts.total() != n_per_setting)
      throw std::invalid_argument("TomoDataset: record total differs from n_per_setting");
}

std::vector<Setting> standard_settings() {
  const std::array<LocalBasis, 3> bases{LocalBasis::HV, LocalBasis::DA, LocalBasis::RL};
  std::vector<Setting> out;
  for (LocalBasis a : bases)
    for (LocalBasis b : bases) out.push_back({a, b});
  return out;
}

TomoDataset simulate_tomography(const DensityMatrix& rho, std::uint64_t n_per_setting,
                                RandomStream& stream) {
  TomoDataset data;
  data.n_per_setting = n_per_setting;
  for (const Setting& s : standard_settings())
    data.records.push_back({s, sample_counts(rho, s, n_per_setting, stream)});
  return data;
}

std::string_view to_string(ReconstructionMethod method) {
  return method == ReconstructionMethod::MLE ? "mle" : "linear";
}

DensityMatrix Reconstruction::physical() const {
  if (method == ReconstructionMethod::MLE && !psd_violation) return DensityMatrix(rho_hat);
  return project_to_physical(rho_hat);
}

double log_likelihood(const TomoDataset& data, const ComplexMatrix& rho) {
  double sum = 0.0;
  for (const TomoRecord& record : data.records) {
    const auto projectors = joint_projectors(record.setting);
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = std::max(expectation(projectors[k], rho), kLikelihoodProbabilityFloor);
      sum += static_cast<double>(record.counts.n[k]) * std::log(p);
    }
  }
  return sum;
}

Reconstruction reconstruct_linear(const TomoDataset& data) {
  data.validate();
  const auto basis = pauli_basis();
  const FlatData flat = flatten(data);
  const double shots = static_cast<double>(data.n_per_setting);

  // Least squares on p_x = sum_k r_k Tr(P_x sigma_k) / 4 via normal equations.
  ParamMatrix normal{};
  ParamVector rhs{};
  for (std::size_t x = 0; x < flat.projectors.size(); ++x) {
    ParamVector row{};
    for (std::size_t k = 0; k < kParams; ++k)
      row[k] = 0.25 * expectation(flat.projectors[x], basis[k]);
    const double freq = flat.counts[x] / shots;
    for (std::size_t i = 0; i < kParams; ++i) {
      rhs[i] += row[i] * freq;
      for (std::size_t j = 0; j < kParams; ++j) normal[i][j] += row[i] * row[j];
    }
  }
  const ParamVector coeffs = solve(normal, rhs);

  ComplexMatrix rho(4);
  for (std::size_t k = 0; k < kParams; ++k) rho += basis[k] * Complex(0.25 * coeffs[k]);
  rho = rho.hermitian_part();
  rho *= Complex(1.0 / rho.trace().real());

  Reconstruction out;
  out.method = ReconstructionMethod::LinearInversion;
  out.rho_hat = rho;
  out.psd_violation = hermitian_eig(rho).eigenvalues[0] < -kPsdViolationThreshold;
  out.log_likelihood = log_likelihood(data, project_to_physical(rho).matrix());
  return out;
}

Reconstruction reconstruct_mle(const TomoDataset& data, const MleOptions& options) {
  const Reconstruction linear = reconstruct_linear(data);
  const FlatData flat = flatten(data);
  const CholeskyObjective objective(flat);

  constexpr double kStartMixing = 1e-3;
  const ComplexMatrix start = (1.0 - kStartMixing) * linear.physical().matrix() +
                              (kStartMixing / 4.0) * ComplexMatrix::identity(4);
  ParamVector x = params_from_lower(lower_factor(start.hermitian_part()));

  ParamVector grad{};
  double f = objective.value(x, &grad);
  ParamMatrix h = identity_matrix();
  bool h_is_identity = true;
  int quiet_iterations = 0;
  int iter = 0;
  bool converged = false;

  for (; iter < options.max_iterations; ++iter) {
    ParamVector dir = mat_vec(h, grad);
    for (double& d : dir) d = -d;
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      h = identity_matrix();
      h_is_identity = true;
      for (std::size_t i = 0; i < kParams; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }
    if (slope == 0.0) {
      converged = true;
      break;
    }

    // Backtracking Armijo line search.
    double step = 1.0;
    ParamVector trial{};
    ParamVector trial_grad{};
    double trial_f = f;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < kParams; ++i) trial[i] = x[i] + step * dir[i];
      trial_f = objective.value(trial, &trial_grad);
      if (std::isfinite(trial_f) && trial_f <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (h_is_identity) {
        converged = true;  // no representable ascent left
        break;
      }
      h = identity_matrix();
      h_is_identity = true;
      continue;
    }

    ParamVector s{};
    ParamVector y{};
    for (std::size_t i = 0; i < kParams; ++i) {
      s[i] = trial[i] - x[i];
      y[i] = trial_grad[i] - grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-18) {
      if (h_is_identity) {
        const double scale = sy / dot(y, y);
        for (auto& row : h)
          for (double& v : row) v *= scale;
      }
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double r = 1.0 / sy;
      const ParamVector hy = mat_vec(h, y);
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < kParams; ++i)
        for (std::size_t j = 0; j < kParams; ++j)
          h[i][j] += -r * (hy[i] * s[j] + s[i] * hy[j]) + (r * r * yhy + r) * s[i] * s[j];
      h_is_identity = false;
    }

    // Quiet means both the realized gain and the quasi-Newton predicted gain
    // are below tolerance; a tiny step alone can come from a poor curvature model.
    const double gain = f - trial_f;
    const double predicted = -0.5 * slope;
    x = trial;
    grad = trial_grad;
    f = trial_f;
    quiet_iterations = (gain < options.tolerance && predicted < options.tolerance) ? quiet_iterations + 1 : 0;
    if (quiet_iterations >= 3) {
      converged = true;
      ++iter;
      break;
    }
  }

  const ComplexMatrix t = lower_from_params(x);
  ComplexMatrix rho = (t.adjoint() * t).hermitian_part();
  rho *= Complex(1.0 / rho.trace().real());

  Reconstruction out;
  out.method = ReconstructionMethod::MLE;
  out.rho_hat = rho;
  out.iterations = iter;
  out.converged = converged;
  out.log_likelihood = log_likelihood(data, rho);
  return out;
}

TomoReport tomo_report(const DensityMatrix& truth, const Reconstruction& recon) {
  const DensityMatrix estimate = recon.physical();
  TomoReport report;
  report.fidelity = fidelity(estimate, truth);
  report.fit = fit_family_params(estimate);
  report.negativity = negativity(estimate).value;
  report.log_negativity = log_negativity(estimate).value;
  report.concurrence = concurrence(estimate).value;
  report.qgd = qgd_from_negativity(estimate).value;
  return report;
}

}  // namespace qmet
