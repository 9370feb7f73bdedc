#pragma once

// Monte Carlo oracle for the symptom-free infection probability.
//
// Each trial infects the recipient through each event independently with
// probability 1 - nu^rho; an infecting event produces symptoms at
// t_E + (generation + incubation). The estimate for time t is the
// frequency of "infected and no symptoms by t" among trials with
// "no symptoms by t".

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "riskscore/distributions.hpp"
#include "riskscore/prob_model.hpp"

namespace riskscore::testing {

struct OracleEstimate {
  double frequency = 0.0;
  double standard_error = 0.0;
  std::size_t conditioning_trials = 0;
};

inline std::vector<OracleEstimate> simulate_symptom_free(const RecipientExposure& exposure, double nu,
                                                         const EpiDistributions& epi,
                                                         std::span<const double> times_min,
                                                         std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> incubation(epi.incubation_meanlog, epi.incubation_sdlog);
  std::weibull_distribution<double> generation(epi.generation_shape, epi.generation_scale);

  std::vector<double> p_infect;
  for (const ExposureEvent& e : exposure.events) p_infect.push_back(1.0 - std::pow(nu, e.rho));

  std::vector<std::size_t> no_symptoms(times_min.size(), 0);
  std::vector<std::size_t> infected_no_symptoms(times_min.size(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    bool infected = false;
    double first_symptom = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < exposure.events.size(); ++n) {
      if (unit(rng) < p_infect[n]) {
        infected = true;
        const double delay_days = generation(rng) + incubation(rng);
        first_symptom = std::min(first_symptom, exposure.events[n].event_time_min + delay_days * 1440.0);
      }
    }
    for (std::size_t k = 0; k < times_min.size(); ++k) {
      if (first_symptom > times_min[k]) {
        ++no_symptoms[k];
        if (infected) ++infected_no_symptoms[k];
      }
    }
  }

  std::vector<OracleEstimate> out;
  for (std::size_t k = 0; k < times_min.size(); ++k) {
    const double c = static_cast<double>(no_symptoms[k]);
    const double f = c > 0 ? static_cast<double>(infected_no_symptoms[k]) / c : 0.0;
    out.push_back({f, c > 0 ? std::sqrt(f * (1.0 - f) / c) : 0.0, no_symptoms[k]});
  }
  return out;
}

/// Conditional probability under fully independent per-event infection:
/// [prod(1 - G p) - prod(1 - p)] / prod(1 - G p). Equals the closed form
/// for a single event; used to explain multi-event differences.
inline double independent_model_probability(const RecipientExposure& exposure, double t_min,
                                            double nu, const SumCdf& g) {
  double no_symptoms = 1.0;
  double never_infected = 1.0;
  for (const ExposureEvent& e : exposure.events) {
    const double p = 1.0 - std::pow(nu, e.rho);
    no_symptoms *= 1.0 - g((t_min - e.event_time_min) / 1440.0) * p;
    never_infected *= 1.0 - p;
  }
  return (no_symptoms - never_infected) / no_symptoms;
}

}  // namespace riskscore::testing
