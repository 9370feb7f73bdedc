#include "riskscore/prob_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace riskscore {

void ProbParams::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("nu must lie in (0, 1)");
  if (!(p_min > 0.0 && p_min < 1.0)) throw ParameterError("p_min must lie in (0, 1)");
}

double RecipientExposure::total_rho() const {
  double sum = 0.0;
  for (const ExposureEvent& e : events) sum += e.rho;
  return sum;
}

double RecipientExposure::latest_event_time() const {
  double latest = 0.0;
  bool any = false;
  for (const ExposureEvent& e : events) {
    latest = any ? std::max(latest, e.event_time_min) : e.event_time_min;
    any = true;
  }
  return latest;
}

RecipientExposure exposure_from_ledger(const RecipientLedger& ledger) {
  RecipientExposure out{ledger.recipient_id(), {}};
  for (const auto& [source, contribution] : ledger.per_source()) {
    for (const EventRisk& e : contribution.event_risks) {
      out.events.push_back({static_cast<double>(e.start_time), e.risk});
    }
  }
  return out;
}

double escape_probability(double rho, double nu) { return std::exp(rho * std::log(nu)); }

double infection_probability(const RecipientExposure& exposure, const ProbParams& params) {
  return -std::expm1(exposure.total_rho() * std::log(params.nu));
}

bool prob_notify(const RecipientExposure& exposure, const ProbParams& params) {
  return infection_probability(exposure, params) >= params.p_min;
}

double symptom_free_infection_probability(const RecipientExposure& exposure, double t_min,
                                          const ProbParams& params) {
  const double log_nu = std::log(params.nu);
  double still_clear = 1.0;  // prod_n (1 - (1 - G_n) p_n)
  double symptomatic = 0.0;  // sum_n G_n p_n
  for (const ExposureEvent& e : exposure.events) {
    const double p = -std::expm1(e.rho * log_nu);
    const double g = params.sum_cdf((t_min - e.event_time_min) / static_cast<double>(kMinutesPerDay));
    still_clear *= 1.0 - (1.0 - g) * p;
    symptomatic += g * p;
  }
  const double denominator = 1.0 - symptomatic;
  if (!(denominator > 0.0)) {
    throw ModelValidityError("symptom-free probability undefined: 1 - sum G p = " +
                             std::to_string(denominator) + " for recipient '" +
                             exposure.recipient_id + "'");
  }
  return (1.0 - still_clear) / denominator;
}

double release_time(const RecipientExposure& exposure, double threshold, const ProbParams& params) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ParameterError("threshold must lie in (0, 1)");
  const double start = exposure.latest_event_time();
  if (symptom_free_infection_probability(exposure, start, params) <= threshold) return start;

  const double step_min = params.sum_cdf.grid_step() * static_cast<double>(kMinutesPerDay);
  for (std::size_t k = 1; k < params.sum_cdf.size(); ++k) {
    const double t = start + static_cast<double>(k) * step_min;
    if (symptom_free_infection_probability(exposure, t, params) < threshold) return t;
  }
  throw HorizonError("probability stays at or above " + std::to_string(threshold) +
                     " through the G grid horizon for recipient '" + exposure.recipient_id + "'");
}

}  // namespace riskscore
