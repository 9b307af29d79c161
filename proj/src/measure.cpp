#include "qmet/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmet {

namespace {

constexpr double kRoundoffProbability = 1e-15;

std::size_t draw_index(const std::array<double, 4>& cdf, double u) {
  for (std::size_t k = 0; k < 3; ++k)
    if (u < cdf[k]) return k;
  return 3;
}

std::array<double, 4> cumulative(const std::array<double, 4>& weights) {
  std::array<double, 4> cdf{};
  double sum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    sum += weights[k];
    cdf[k] = sum;
  }
  for (double& c : cdf) c /= sum;
  // From the last outcome with weight onwards every u < 1 must stop, so
  // rounding in the running sum can never select a zero-weight tail.
  std::size_t last = 3;
  while (last > 0 && weights[last] == 0.0) --last;
  for (std::size_t k = last; k < 4; ++k) cdf[k] = 2.0;
  return cdf;
}

}  // namespace

std::string_view to_string(LocalBasis basis) {
  switch (basis) {
    case LocalBasis::HV: return "HV";
    case LocalBasis::DA: return "DA";
    case LocalBasis::RL: return "RL";
  }
  return "??";
}

LocalBasis parse_local_basis(std::string_view text) {
  if (text == "HV") return LocalBasis::HV;
  if (text == "DA") return LocalBasis::DA;
  if (text == "RL") return LocalBasis::RL;
  throw std::invalid_argument("unknown local basis: " + std::string(text));
}

std::string to_string(const Setting& setting) {
  return std::string(to_string(setting.basis_a)) + "x" + std::string(to_string(setting.basis_b));
}

Setting parse_setting(std::string_view text) {
  if (text.size() != 5 || (text[2] != 'x' && text[2] != 'X'))
    throw std::invalid_argument("setting must look like DAxDA: " + std::string(text));
  return {parse_local_basis(text.substr(0, 2)), parse_local_basis(text.substr(3, 2))};
}

ComplexMatrix local_projector(LocalBasis basis, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("local_projector: sign must be +-1");
  const double s = sign;
  constexpr double h = 1.0 / std::numbers::sqrt2;
  std::array<Complex, 2> v{};
  switch (basis) {
    case LocalBasis::HV:
      v = sign > 0 ? std::array<Complex, 2>{1.0, 0.0} : std::array<Complex, 2>{0.0, 1.0};
      break;
    case LocalBasis::DA:
      v = {h, s * h};
      break;
    case LocalBasis::RL:
      v = {h, Complex(0.0, s * h)};
      break;
  }
  ComplexMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out(i, j) = v[i] * std::conj(v[j]);
  return out;
}

std::array<ComplexMatrix, 4> joint_projectors(const Setting& setting) {
  const ComplexMatrix ap = local_projector(setting.basis_a, +1);
  const ComplexMatrix am = local_projector(setting.basis_a, -1);
  const ComplexMatrix bp = local_projector(setting.basis_b, +1);
  const ComplexMatrix bm = local_projector(setting.basis_b, -1);
  return {kron(ap, bp), kron(ap, bm), kron(am, bp), kron(am, bm)};
}

OutcomeProbabilities outcome_probabilities(const DensityMatrix& rho, const Setting& setting) {
  const auto projectors = joint_projectors(setting);
  OutcomeProbabilities out;
  double sum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    out.p[k] = (rho.matrix() * projectors[k]).trace().real();
    // Round-off residue on forbidden outcomes.
    if (out.p[k] < kRoundoffProbability) out.p[k] = 0.0;
    sum += out.p[k];
  }
  for (double& x : out.p) x /= sum;
  return out;
}

OutcomeCounts sample_counts(const OutcomeProbabilities& probs, std::uint64_t shots,
                            RandomStream& stream) {
  if (shots == 0) throw std::invalid_argument("sample_counts: shots must be positive");
  const auto cdf = cumulative(probs.p);
  OutcomeCounts counts;
  for (std::uint64_t s = 0; s < shots; ++s) ++counts.n[draw_index(cdf, stream.uniform())];
  return counts;
}

OutcomeCounts sample_counts(const DensityMatrix& rho, const Setting& setting,
                            std::uint64_t shots, RandomStream& stream) {
  return sample_counts(outcome_probabilities(rho, setting), shots, stream);
}

OutcomeCounts mix_counts(const OutcomeCounts& pure, const OutcomeCounts& mixed, double p,
                         RandomStream& stream) {
  if (pure.total() == 0 || mixed.total() == 0)
    throw std::invalid_argument("mix_counts: empty count record");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mix_counts: p must lie in [0, 1]");
  // Events are taken from the recorded pools without replacement. A random
  // subset of an i.i.d. record is again i.i.d., so the output has the same
  // law as sampling the mixed state; drawing with replacement would add a
  // second layer of multinomial noise.
  std::array<std::uint64_t, 4> pool_pure = pure.n;
  std::array<std::uint64_t, 4> pool_mixed = mixed.n;
  std::uint64_t left_pure = pure.total();
  std::uint64_t left_mixed = mixed.total();
  const std::uint64_t shots = std::min(left_pure, left_mixed);

  auto take = [&stream](std::array<std::uint64_t, 4>& pool, std::uint64_t& left) {
    auto r = static_cast<std::uint64_t>(stream.uniform() * static_cast<double>(left));
    if (r >= left) r = left - 1;
    std::size_t k = 0;
    while (r >= pool[k]) r -= pool[k++];
    --pool[k];
    --left;
    return k;
  };

  OutcomeCounts out;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const bool from_pure = stream.uniform() < p;
    ++out.n[from_pure ? take(pool_pure, left_pure) : take(pool_mixed, left_mixed)];
  }
  return out;
}

}  // namespace qmet
