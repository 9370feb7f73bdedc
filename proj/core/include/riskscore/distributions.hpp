#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "riskscore/errors.hpp"
#include "riskscore/random.hpp"

namespace riskscore {

/// Log-normal period in days: log(X) ~ Normal(meanlog, sdlog^2).
struct LogNormalPeriod {
  double meanlog;
  double sdlog;

  void validate() const;
  double mean() const;
  double variance() const;
  double sample(Engine& engine) const {
    return std::lognormal_distribution<double>(meanlog, sdlog)(engine);
  }
};

/// Weibull period in days with CDF 1 - exp(-(x/scale)^shape).
struct WeibullPeriod {
  double shape;
  double scale;

  void validate() const;
  double mean() const;
  double variance() const;
  double sample(Engine& engine) const {
    return std::weibull_distribution<double>(shape, scale)(engine);
  }
};

/// Incubation (log-normal) and generation (Weibull) period models.
///
/// Defaults come from the published COVID-19 estimates the risk-score
/// design cites (incubation after Lauer et al., generation after Ferretti
/// et al.). Verify them before production use.
struct EpiDistributions {
  double incubation_meanlog = 1.644;
  double incubation_sdlog = 0.363;
  double generation_shape = 2.826;
  double generation_scale = 5.665;

  /// Throws ParameterError unless every shape/scale/sd is strictly positive.
  void validate() const;

  LogNormalPeriod incubation() const { return {incubation_meanlog, incubation_sdlog}; }
  WeibullPeriod generation() const { return {generation_shape, generation_scale}; }

  bool operator==(const EpiDistributions&) const = default;
};

template <class Period>
concept SampledPeriod = requires(const Period& p, Engine& e) {
  { p.sample(e) } -> std::convertible_to<double>;
  p.validate();
};

/// n i.i.d. draws of (minuend - subtrahend), the two drawn independently
/// from one seeded stream.
template <SampledPeriod Minuend, SampledPeriod Subtrahend>
std::vector<double> sample_difference_of(const Minuend& minuend, const Subtrahend& subtrahend,
                                         std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("sample count must be at least 1");
  minuend.validate();
  subtrahend.validate();
  Engine engine = make_engine(seed, 1);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double a = minuend.sample(engine);
    const double b = subtrahend.sample(engine);
    x = a - b;
  }
  return out;
}

template <SampledPeriod First, SampledPeriod Second>
std::vector<double> sample_sum_of(const First& first, const Second& second, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) throw ParameterError("sample count must be at least 1");
  first.validate();
  second.validate();
  Engine engine = make_engine(seed, 2);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double a = first.sample(engine);
    const double b = second.sample(engine);
    x = a + b;
  }
  return out;
}

/// Samples of (generation - incubation) in days: the offset between a
/// source's symptom onset and the contact that infects a recipient.
std::vector<double> sample_difference(const EpiDistributions& dist, std::size_t n,
                                      std::uint64_t seed);

struct FitReport {
  double ks_statistic;
  double sample_mean;
  double sample_sd;
  double sample_skewness;

  /// Negative skew: the empirical left tail is heavier than the Gaussian's.
  bool left_tail_heavier() const { return sample_skewness < 0.0; }
};

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
/// and Normal(mu0, sigma0^2), plus the sample moments.
FitReport gaussian_fit_report(std::span<const double> samples, double mu0, double sigma0);

double normal_cdf(double x, double mean, double sd);

/// Tabulated CDF on the uniform grid t_k = k * step (days), k = 0..K.
///
/// Values are non-decreasing in [0, 1]. Evaluation interpolates linearly,
/// returns 0 below the grid and the last tabulated value above it.
class SumCdf {
 public:
  SumCdf(double grid_step, std::vector<double> values, std::size_t sample_count,
         std::uint64_t rng_seed);

  double grid_step() const noexcept { return step_; }
  std::size_t size() const noexcept { return values_.size(); }
  double grid_time(std::size_t k) const noexcept { return static_cast<double>(k) * step_; }
  double horizon() const noexcept { return grid_time(values_.size() - 1); }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t sample_count() const noexcept { return sample_count_; }
  std::uint64_t rng_seed() const noexcept { return seed_; }

  double operator()(double t_days) const;

 private:
  double step_;
  std::vector<double> values_;
  std::size_t sample_count_;
  std::uint64_t seed_;
};

/// Tail mass left beyond the grid horizon of build_sum_cdf.
inline constexpr double kSumCdfTailMass = 1e-5;

/// Empirical CDF G of (generation + incubation), tabulated on a grid
/// that stops just short of the largest sample and leaves at most
/// kSumCdfTailMass of the empirical mass beyond its end (plus one
/// sample for small n). Requires n >= 10^4 and grid_step > 0.
SumCdf build_sum_cdf(const EpiDistributions& dist, std::size_t n, double grid_step,
                     std::uint64_t seed);

/// G(t) for t in days.
inline double eval_cdf(const SumCdf& cdf, double t_days) { return cdf(t_days); }

}  // namespace riskscore
