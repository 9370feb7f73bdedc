#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskscore/errors.hpp"

namespace riskscore {

/// One recipient's aggregated exposure and whether they became infected.
struct OutcomeRecord {
  double rho_total = 0.0;
  bool infected = false;

  bool operator==(const OutcomeRecord&) const = default;
};

struct OutcomeDataset {
  std::vector<OutcomeRecord> records;

  bool operator==(const OutcomeDataset&) const = default;
};

/// An infected record with zero exposure: impossible under the model.
class ImpossibleRecordError : public DataError {
 public:
  explicit ImpossibleRecordError(std::size_t row);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Rejects negative or non-finite rho (ValidationError) and infected
/// records with rho == 0 (ImpossibleRecordError).
void validate(const OutcomeDataset& data);

/// sum_m rho_m (1 - o_m) log(nu) + o_m log(1 - nu^rho_m).
///
/// Returns -infinity when the data contains an infected record with
/// rho == 0. Throws ParameterError for nu outside (0, 1).
double log_likelihood(double nu, const OutcomeDataset& data);

struct PosteriorDiagnostics {
  double acceptance_rate = 0.0;
  double ess = 0.0;
  /// Set when the sampler looks mistuned; not an error.
  std::string warning;
};

/// Posterior over nu under a flat Beta(1,1) prior.
struct Posterior {
  std::vector<double> grid_nu;       ///< uniform cell midpoints in (0, 1)
  std::vector<double> grid_density;  ///< integrates to 1, see integrate_grid
  std::optional<std::vector<double>> samples;
  PosteriorDiagnostics diagnostics;

  double mean() const;
  double sd() const;
  /// Equal-tailed interval holding `mass` of the posterior.
  std::pair<double, double> credible_interval(double mass) const;
};

/// Trapezoid rule over the cell-midpoint grid, closed by flat half-cells
/// out to 0 and 1 so that a constant density of 1 integrates to exactly 1.
double integrate_grid(std::span<const double> grid, std::span<const double> values);

/// Reference posterior by direct evaluation on `grid_size` midpoints.
/// Throws DataError when every grid point has zero likelihood.
Posterior posterior_grid(const OutcomeDataset& data, std::size_t grid_size = 1024);

/// Random-walk Metropolis on logit(nu), including the Jacobian of the
/// transform. Needs n_samples >= 1000.
Posterior posterior_mcmc(const OutcomeDataset& data, std::size_t n_samples, std::size_t burn_in,
                         double step, std::uint64_t seed);

/// Initial-monotone-sequence effective sample size of a chain.
double effective_sample_size(std::span<const double> chain);

struct RhoRange {
  double low = 0.0;
  double high = 0.0;
};

/// Synthetic outcomes: rho ~ Uniform(low, high), infected ~ Bernoulli(1 - nu^rho).
OutcomeDataset simulate_outcomes(double true_nu, std::size_t m, RhoRange rho_range,
                                 std::uint64_t seed);

}  // namespace riskscore
