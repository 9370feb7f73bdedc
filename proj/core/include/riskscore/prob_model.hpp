#pragma once

#include <vector>

#include "riskscore/distributions.hpp"
#include "riskscore/risk_engine.hpp"

namespace riskscore {

/// nu is the per-unit-risk probability of escaping infection, so a
/// contact with score rho is survived with probability nu^rho.
struct ProbParams {
  double nu = 0.9;
  double p_min = 0.175;
  SumCdf sum_cdf;

  /// Throws ParameterError unless 0 < nu < 1 and 0 < p_min < 1.
  void validate() const;
};

struct ExposureEvent {
  double event_time_min = 0.0;  ///< absolute minutes
  double rho = 0.0;
};

struct RecipientExposure {
  RecipientId recipient_id;
  std::vector<ExposureEvent> events;

  double total_rho() const;
  /// Latest event time, or 0 when there are no events.
  double latest_event_time() const;
};

/// Treats each windowed event risk in the ledger as its rho.
RecipientExposure exposure_from_ledger(const RecipientLedger& ledger);

/// nu^rho, the probability one exposure does not infect.
double escape_probability(double rho, double nu);

/// 1 - nu^(sum of rho).
double infection_probability(const RecipientExposure& exposure, const ProbParams& params);

/// infection_probability >= p_min.
bool prob_notify(const RecipientExposure& exposure, const ProbParams& params);

/// Probability the recipient is infected given no symptoms by time `t_min`:
///
///   [1 - prod_n (1 - (1 - G_n) p_n)] / [1 - sum_n G_n p_n]
///
/// with p_n = 1 - nu^rho_n and G_n = G((t - t_n) in days). The sum in the
/// denominator is a first-order expansion and can reach zero or below for
/// large exposures; that raises ModelValidityError.
double symptom_free_infection_probability(const RecipientExposure& exposure, double t_min,
                                          const ProbParams& params);

/// First time on the G grid (offset from the latest event) at which the
/// symptom-free infection probability falls below `threshold`. Returns
/// the latest event time when the probability there is already at or
/// below the threshold; throws HorizonError if the grid runs out.
double release_time(const RecipientExposure& exposure, double threshold, const ProbParams& params);

}  // namespace riskscore
