#include "riskscore/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "riskscore/random.hpp"

namespace riskscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double inv_logit(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 - nu^rho) without cancellation near nu^rho -> 1.
double log_infection(double rho, double log_nu) {
  return std::log(-std::expm1(rho * log_nu));
}

std::vector<double> midpoint_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  return grid;
}

void normalize(const std::vector<double>& grid, std::vector<double>& density) {
  const double z = integrate_grid(grid, density);
  for (double& d : density) d /= z;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ImpossibleRecordError::ImpossibleRecordError(std::size_t row)
    : DataError("row " + std::to_string(row) +
                ": infected with rho_total = 0 has zero likelihood under the model"),
      row_(row) {}

void validate(const OutcomeDataset& data) {
  std::vector<std::string> problems;
  for (std::size_t m = 0; m < data.records.size(); ++m) {
    const OutcomeRecord& r = data.records[m];
    if (!(r.rho_total >= 0.0) || !std::isfinite(r.rho_total)) {
      problems.push_back("records[" + std::to_string(m) + "].rho_total: must be finite and >= 0");
    } else if (r.infected && r.rho_total == 0.0) {
      throw ImpossibleRecordError(m);
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

double log_likelihood(double nu, const OutcomeDataset& data) {
  if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("nu must lie in (0, 1)");
  const double log_nu = std::log(nu);
  double survived_rho = 0.0;
  double infected_terms = 0.0;
  for (const OutcomeRecord& r : data.records) {
    if (r.infected) {
      if (r.rho_total == 0.0) return kNegInf;
      infected_terms += log_infection(r.rho_total, log_nu);
    } else {
      survived_rho += r.rho_total;
    }
  }
  return survived_rho * log_nu + infected_terms;
}

double integrate_grid(std::span<const double> grid, std::span<const double> values) {
  if (grid.empty() || grid.size() != values.size()) {
    throw ParameterError("integrate_grid needs equal, non-empty grid and value spans");
  }
  double sum = grid.front() * values.front() + (1.0 - grid.back()) * values.back();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    sum += 0.5 * (grid[k] - grid[k - 1]) * (values[k] + values[k - 1]);
  }
  return sum;
}

double Posterior::mean() const {
  if (samples && !samples->empty()) {
    return std::accumulate(samples->begin(), samples->end(), 0.0) /
           static_cast<double>(samples->size());
  }
  std::vector<double> weighted(grid_nu.size());
  for (std::size_t k = 0; k < grid_nu.size(); ++k) weighted[k] = grid_nu[k] * grid_density[k];
  return integrate_grid(grid_nu, weighted);
}

double Posterior::sd() const {
  const double mu = mean();
  if (samples && samples->size() > 1) {
    double ss = 0.0;
    for (double x : *samples) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(samples->size() - 1));
  }
  std::vector<double> weighted(grid_nu.size());
  for (std::size_t k = 0; k < grid_nu.size(); ++k) {
    weighted[k] = (grid_nu[k] - mu) * (grid_nu[k] - mu) * grid_density[k];
  }
  return std::sqrt(integrate_grid(grid_nu, weighted));
}

std::pair<double, double> Posterior::credible_interval(double mass) const {
  if (!(mass > 0.0 && mass < 1.0)) throw ParameterError("credible mass must lie in (0, 1)");
  const double lo_q = 0.5 * (1.0 - mass);
  const double hi_q = 1.0 - lo_q;
  if (samples && !samples->empty()) {
    std::vector<double> sorted = *samples;
    std::sort(sorted.begin(), sorted.end());
    return {quantile_sorted(sorted, lo_q), quantile_sorted(sorted, hi_q)};
  }

  // Cumulative mass at each node, consistent with integrate_grid.
  const std::size_t n = grid_nu.size();
  std::vector<double> cum(n);
  cum[0] = grid_nu[0] * grid_density[0];
  for (std::size_t k = 1; k < n; ++k) {
    cum[k] = cum[k - 1] + 0.5 * (grid_nu[k] - grid_nu[k - 1]) * (grid_density[k] + grid_density[k - 1]);
  }
  const auto invert = [&](double q) {
    if (q <= cum[0]) return grid_nu[0] * q / cum[0];
    const auto it = std::lower_bound(cum.begin(), cum.end(), q);
    if (it == cum.end()) return grid_nu.back();
    const auto k = static_cast<std::size_t>(it - cum.begin());
    const double span = cum[k] - cum[k - 1];
    const double frac = span > 0.0 ? (q - cum[k - 1]) / span : 0.0;
    return grid_nu[k - 1] + frac * (grid_nu[k] - grid_nu[k - 1]);
  };
  return {invert(lo_q), invert(hi_q)};
}

Posterior posterior_grid(const OutcomeDataset& data, std::size_t grid_size) {
  if (grid_size < 64) throw ParameterError("posterior grid needs at least 64 points");
  Posterior post;
  post.grid_nu = midpoint_grid(grid_size);
  std::vector<double> log_post(grid_size);
  double peak = kNegInf;
  for (std::size_t k = 0; k < grid_size; ++k) {
    log_post[k] = log_likelihood(post.grid_nu[k], data);
    peak = std::max(peak, log_post[k]);
  }
  if (peak == kNegInf) throw DataError("likelihood is zero at every grid point");

  post.grid_density.resize(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) post.grid_density[k] = std::exp(log_post[k] - peak);
  normalize(post.grid_nu, post.grid_density);
  return post;
}

Posterior posterior_mcmc(const OutcomeDataset& data, std::size_t n_samples, std::size_t burn_in,
                         double step, std::uint64_t seed) {
  if (n_samples < 1000) throw ParameterError("MCMC needs at least 1000 samples");
  if (!(step > 0.0)) throw ParameterError("MCMC step must be > 0");

  // Density of theta = logit(nu) picks up the Jacobian nu (1 - nu).
  const auto log_target = [&](double theta) {
    const double nu = inv_logit(theta);
    if (!(nu > 0.0 && nu < 1.0)) return kNegInf;
    return log_likelihood(nu, data) + std::log(nu) + std::log1p(-nu);
  };

  Engine engine = make_engine(seed, 3);
  std::normal_distribution<double> proposal(0.0, step);

  double theta = 0.0;
  double current = log_target(theta);
  if (current == kNegInf) throw DataError("likelihood is zero at the chain's starting point");

  std::vector<double> chain;
  chain.reserve(n_samples);
  std::size_t accepted = 0;
  for (std::size_t it = 0; it < burn_in + n_samples; ++it) {
    const double candidate = theta + proposal(engine);
    const double lp = log_target(candidate);
    const bool accept = lp >= current || std::log(uniform_open(engine)) < lp - current;
    if (accept) {
      theta = candidate;
      current = lp;
    }
    if (it >= burn_in) {
      accepted += accept ? 1 : 0;
      chain.push_back(inv_logit(theta));
    }
  }

  Posterior post;
  post.diagnostics.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_samples);
  post.diagnostics.ess = effective_sample_size(chain);
  if (post.diagnostics.acceptance_rate < 0.05 || post.diagnostics.acceptance_rate > 0.95) {
    post.diagnostics.warning = "acceptance rate " + std::to_string(post.diagnostics.acceptance_rate) +
                               " outside [0.05, 0.95]; retune the proposal step";
  }

  constexpr std::size_t kBins = 100;
  post.grid_nu = midpoint_grid(kBins);
  post.grid_density.assign(kBins, 0.0);
  for (double nu : chain) {
    const auto bin = std::min(kBins - 1, static_cast<std::size_t>(nu * static_cast<double>(kBins)));
    post.grid_density[bin] += 1.0;
  }
  normalize(post.grid_nu, post.grid_density);
  post.samples = std::move(chain);
  return post;
}

double effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);

  // Geyer: sum consecutive autocorrelation pairs while positive, forced monotone.
  double tau = -1.0;
  double previous_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, previous_pair);
    tau += 2.0 * pair;
    previous_pair = pair;
  }
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

OutcomeDataset simulate_outcomes(double true_nu, std::size_t m, RhoRange rho_range,
                                 std::uint64_t seed) {
  if (!(true_nu > 0.0 && true_nu < 1.0)) throw ParameterError("true_nu must lie in (0, 1)");
  if (m == 0) throw ParameterError("simulate_outcomes needs m >= 1");
  if (!(rho_range.low >= 0.0 && rho_range.low <= rho_range.high) || !std::isfinite(rho_range.high)) {
    throw ParameterError("rho range must satisfy 0 <= low <= high");
  }
  Engine engine = make_engine(seed, 4);
  const double log_nu = std::log(true_nu);
  OutcomeDataset data;
  data.records.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double rho = rho_range.low + (rho_range.high - rho_range.low) * uniform_open(engine);
    const double p_infect = -std::expm1(rho * log_nu);
    data.records.push_back({rho, uniform_open(engine) < p_infect});
  }
  return data;
}

}  // namespace riskscore
