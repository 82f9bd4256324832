#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "abcem/rng.hpp"

namespace abcem::fw {

// Defaults are the basic Franke-Westerhoff calibration.
struct FwParams {
  double phi = 0.18;     // fundamentalist aggressiveness, 1/time
  double chi = 2.3;      // chartist extrapolation weight
  double alpha_p = -0.161;  // predisposition (sign free)
  double alpha_h = 1.3;     // herding weight
  double alpha_m = 12.5;    // misalignment weight, 1/price^2
  double sigma_f = 0.79;    // fundamentalist demand noise scale
  double sigma_c = 1.9;     // chartist demand noise scale
  double nu = 0.05;         // switching flexibility, 1/time
  double fundamental_price = 1.0;  // log price F
  double mu = 0.01;                // price impact
  double dt = 1.0;
  bool clamp_probabilities = false;

  void validate() const;  // throws invalid_parameter_error
};

struct FwState {
  double log_price = 1.0;
  double prev_log_price = 1.0;  // price one step back, feeds the lagged return
  double n_f = 0.5;
  double n_c = 0.5;
  double time = 0.0;
};

enum class Scheme { ExplicitEuler, SemiImplicit };

// Strategy-switching rates: cf = chartist -> fundamentalist, fc = reverse.
struct Probabilities {
  double cf;
  double fc;
};

// a = alpha_p + alpha_h (n_f - n_c) + alpha_m (P - F)^2, at the current state.
double switching_index(const FwState& state, const FwParams& params);

// Unclamped: (nu e^a, nu e^-a); clamped: each capped at 1. The exponential
// saturates at the largest finite magnitude instead of overflowing, so the
// semi-implicit update stays well defined and explicit blow-ups surface as
// non-finite prices downstream where they are recorded.
Probabilities switching_probabilities(double a, const FwParams& params);

// n_f phi (F - P) + n_c chi (P - prev_P)/dt, with the lagged price change.
double excess_demand(const FwState& state, const FwParams& params);

// P + mu dt D + sqrt(dt) mu (n_f sigma_f + n_c sigma_c) eta.
// eta is injected so tests can run the deterministic path.
double price_step(const FwState& state, const FwParams& params, double eta);

// Explicit Euler transfer between the groups. Preserves n_f + n_c exactly
// (one shared transfer term); makes no [0,1] promise.
std::pair<double, double> fractions_step_explicit(double n_f, double n_c,
                                                  const Probabilities& pi,
                                                  double dt);

// Closed form of the semi-implicit update. Keeps both fractions in [0,1]
// for every dt > 0 and every finite nonnegative pair of rates.
std::pair<double, double> fractions_step_semi_implicit(double n_f, double n_c,
                                                       const Probabilities& pi,
                                                       double dt);

// One full step: index and rates from the state at time t, price advances
// with the current fractions, fractions advance per scheme.
FwState step_with_eta(const FwState& state, const FwParams& params,
                      Scheme scheme, double eta);
FwState step(const FwState& state, const FwParams& params, Scheme scheme,
             RngStream& rng);

struct Trajectory {
  std::vector<double> time;
  std::vector<double> log_price;
  std::vector<double> n_f;
  std::vector<double> n_c;
  // Index of the step that first produced a non-finite value; that row is
  // not recorded. Blow-up is an outcome, not an exception.
  std::optional<std::size_t> first_nonfinite_step;

  std::size_t size() const { return time.size(); }
};

Trajectory run(FwState initial, const FwParams& params, Scheme scheme,
               std::size_t steps, RngStream& rng);

struct DriftDiffusion {
  double drift;
  double diffusion;
};

// Coefficients of the reduced price SDE at group imbalance n = n_f - n_c:
//   drift     = mu ((1+n)/2) phi (F - P) / (1 - mu ((1-n)/2) chi)
//   diffusion = mu (((1+n)/2) sigma_f + ((1-n)/2) sigma_c) / (same denominator)
// Throws invalid_parameter_error if the denominator is not positive.
DriftDiffusion continuous_coefficients(double log_price, double n,
                                       const FwParams& params);

}  // namespace abcem::fw
