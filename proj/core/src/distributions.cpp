#include "riskscore/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace riskscore {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be a finite positive number, got " +
                         std::to_string(value));
  }
}

}  // namespace

void LogNormalPeriod::validate() const {
  if (!std::isfinite(meanlog)) throw ParameterError("meanlog must be finite");
  require_positive(sdlog, "sdlog");
}

double LogNormalPeriod::mean() const { return std::exp(meanlog + 0.5 * sdlog * sdlog); }

double LogNormalPeriod::variance() const {
  const double s2 = sdlog * sdlog;
  return std::expm1(s2) * std::exp(2.0 * meanlog + s2);
}

void WeibullPeriod::validate() const {
  require_positive(shape, "shape");
  require_positive(scale, "scale");
}

double WeibullPeriod::mean() const { return scale * std::tgamma(1.0 + 1.0 / shape); }

double WeibullPeriod::variance() const {
  const double g1 = std::tgamma(1.0 + 1.0 / shape);
  const double g2 = std::tgamma(1.0 + 2.0 / shape);
  return scale * scale * (g2 - g1 * g1);
}

void EpiDistributions::validate() const {
  if (!std::isfinite(incubation_meanlog)) throw ParameterError("incubation_meanlog must be finite");
  require_positive(incubation_sdlog, "incubation_sdlog");
  require_positive(generation_shape, "generation_shape");
  require_positive(generation_scale, "generation_scale");
}

std::vector<double> sample_difference(const EpiDistributions& dist, std::size_t n,
                                      std::uint64_t seed) {
  dist.validate();
  return sample_difference_of(dist.generation(), dist.incubation(), n, seed);
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

FitReport gaussian_fit_report(std::span<const double> samples, double mu0, double sigma0) {
  if (samples.empty()) throw ParameterError("gaussian_fit_report needs at least one sample");
  require_positive(sigma0, "sigma0");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    // Ties form one jump of the empirical CDF.
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = normal_cdf(sorted[i], mu0, sigma0);
    ks = std::max({ks, static_cast<double>(j) / n - f, f - static_cast<double>(i) / n});
    i = j;
  }

  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : sorted) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const double sd = sorted.size() > 1 ? std::sqrt(m2 * n / (n - 1.0)) : 0.0;
  return {ks, mean, sd, skew};
}

SumCdf::SumCdf(double grid_step, std::vector<double> values, std::size_t sample_count,
               std::uint64_t rng_seed)
    : step_(grid_step), values_(std::move(values)), sample_count_(sample_count), seed_(rng_seed) {
  require_positive(step_, "grid_step");
  if (values_.empty()) throw ParameterError("SumCdf needs at least one grid value");
  double previous = 0.0;
  for (double v : values_) {
    if (!(v >= previous) || v > 1.0) {
      throw ParameterError("SumCdf grid values must be non-decreasing within [0, 1]");
    }
    previous = v;
  }
}

double SumCdf::operator()(double t_days) const {
  if (!(t_days > 0.0)) return t_days == 0.0 ? values_.front() : 0.0;
  const double pos = t_days / step_;
  if (pos >= static_cast<double>(values_.size() - 1)) return values_.back();
  // Offsets that land on a grid node up to rounding read the node exactly.
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) return values_[static_cast<std::size_t>(nearest)];
  const auto k = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

SumCdf build_sum_cdf(const EpiDistributions& dist, std::size_t n, double grid_step,
                     std::uint64_t seed) {
  if (n < 10'000) throw ParameterError("build_sum_cdf needs at least 10^4 samples");
  require_positive(grid_step, "grid_step");
  dist.validate();

  std::vector<double> sums = sample_sum_of(dist.generation(), dist.incubation(), n, seed);
  std::sort(sums.begin(), sums.end());

  const auto tail_index = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * (1.0 - kSumCdfTailMass)));
  const double cover = sums[std::min(tail_index, n - 2)];
  auto last = static_cast<std::size_t>(std::ceil(cover / grid_step));
  while (last > 1 && static_cast<double>(last) * grid_step >= sums.back()) --last;

  std::vector<double> values(last + 1);
  const double total = static_cast<double>(n);
  for (std::size_t k = 0; k <= last; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    const auto below = std::upper_bound(sums.begin(), sums.end(), t) - sums.begin();
    values[k] = static_cast<double>(below) / total;
  }
  if (values.back() < 0.999) {
    throw ParameterError("grid_step too coarse: G at the grid horizon is below 0.999");
  }
  return SumCdf(grid_step, std::move(values), n, seed);
}

}  // namespace riskscore
