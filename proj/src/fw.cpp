#include "abcem/fw.hpp"

#include <algorithm>
#include <cmath>

#include "abcem/errors.hpp"

namespace abcem::fw {

namespace {

// exp(709) is still finite in double; the rate cap keeps dt * pi finite for
// every dt and nu in play.
constexpr double kMaxExponent = 709.0;
constexpr double kMaxRate = 1e300;

bool finite_state(const FwState& s) {
  return std::isfinite(s.log_price) && std::isfinite(s.n_f) &&
         std::isfinite(s.n_c);
}

}  // namespace

void FwParams::validate() const {
  if (!(phi > 0.0)) throw invalid_parameter_error("FwParams: phi must be > 0");
  if (!(chi > 0.0)) throw invalid_parameter_error("FwParams: chi must be > 0");
  if (!(alpha_h > 0.0))
    throw invalid_parameter_error("FwParams: alpha_h must be > 0");
  if (!(alpha_m > 0.0))
    throw invalid_parameter_error("FwParams: alpha_m must be > 0");
  if (!(sigma_f > 0.0))
    throw invalid_parameter_error("FwParams: sigma_f must be > 0");
  if (!(sigma_c > 0.0))
    throw invalid_parameter_error("FwParams: sigma_c must be > 0");
  if (!(nu > 0.0)) throw invalid_parameter_error("FwParams: nu must be > 0");
  if (!(mu > 0.0)) throw invalid_parameter_error("FwParams: mu must be > 0");
  if (!(dt > 0.0)) throw invalid_parameter_error("FwParams: dt must be > 0");
  if (!std::isfinite(alpha_p))
    throw invalid_parameter_error("FwParams: alpha_p must be finite");
  if (!std::isfinite(fundamental_price))
    throw invalid_parameter_error("FwParams: fundamental_price must be finite");
}

double switching_index(const FwState& state, const FwParams& params) {
  const double misalignment = state.log_price - params.fundamental_price;
  return params.alpha_p + params.alpha_h * (state.n_f - state.n_c) +
         params.alpha_m * misalignment * misalignment;
}

Probabilities switching_probabilities(double a, const FwParams& params) {
  const double e = std::isnan(a) ? a : std::clamp(a, -kMaxExponent, kMaxExponent);
  double cf = std::min(params.nu * std::exp(e), kMaxRate);
  double fc = std::min(params.nu * std::exp(-e), kMaxRate);
  if (params.clamp_probabilities) {
    cf = std::min(1.0, cf);
    fc = std::min(1.0, fc);
  }
  return {cf, fc};
}

double excess_demand(const FwState& state, const FwParams& params) {
  const double lagged_return =
      (state.log_price - state.prev_log_price) / params.dt;
  return state.n_f * params.phi *
             (params.fundamental_price - state.log_price) +
         state.n_c * params.chi * lagged_return;
}

double price_step(const FwState& state, const FwParams& params, double eta) {
  const double demand = excess_demand(state, params);
  const double noise_scale =
      params.mu * (state.n_f * params.sigma_f + state.n_c * params.sigma_c);
  return state.log_price + params.mu * params.dt * demand +
         std::sqrt(params.dt) * noise_scale * eta;
}

std::pair<double, double> fractions_step_explicit(double n_f, double n_c,
                                                  const Probabilities& pi,
                                                  double dt) {
  const double transfer = dt * (n_c * pi.cf - n_f * pi.fc);
  return {n_f + transfer, n_c - transfer};
}

std::pair<double, double> fractions_step_semi_implicit(double n_f, double n_c,
                                                       const Probabilities& pi,
                                                       double dt) {
  const double denom = 1.0 + dt * (pi.cf + pi.fc);
  return {(n_f + dt * pi.cf) / denom, (n_c + dt * pi.fc) / denom};
}

FwState step_with_eta(const FwState& state, const FwParams& params,
                      Scheme scheme, double eta) {
  const double a = switching_index(state, params);
  const Probabilities pi = switching_probabilities(a, params);

  FwState next;
  next.log_price = price_step(state, params, eta);
  next.prev_log_price = state.log_price;
  const auto [n_f, n_c] =
      scheme == Scheme::SemiImplicit
          ? fractions_step_semi_implicit(state.n_f, state.n_c, pi, params.dt)
          : fractions_step_explicit(state.n_f, state.n_c, pi, params.dt);
  next.n_f = n_f;
  next.n_c = n_c;
  next.time = state.time + params.dt;
  return next;
}

FwState step(const FwState& state, const FwParams& params, Scheme scheme,
             RngStream& rng) {
  return step_with_eta(state, params, scheme, rng.standard_normal());
}

Trajectory run(FwState state, const FwParams& params, Scheme scheme,
               std::size_t steps, RngStream& rng) {
  Trajectory out;
  out.time.reserve(steps + 1);
  out.log_price.reserve(steps + 1);
  out.n_f.reserve(steps + 1);
  out.n_c.reserve(steps + 1);

  const auto record = [&out](const FwState& s) {
    out.time.push_back(s.time);
    out.log_price.push_back(s.log_price);
    out.n_f.push_back(s.n_f);
    out.n_c.push_back(s.n_c);
  };
  record(state);

  for (std::size_t k = 1; k <= steps; ++k) {
    state = step(state, params, scheme, rng);
    if (!finite_state(state)) {
      out.first_nonfinite_step = k;
      break;
    }
    record(state);
  }
  return out;
}

DriftDiffusion continuous_coefficients(double log_price, double n,
                                       const FwParams& params) {
  const double weight_f = 0.5 * (1.0 + n);
  const double weight_c = 0.5 * (1.0 - n);
  const double denom = 1.0 - params.mu * weight_c * params.chi;
  if (!(denom > 0.0)) {
    throw invalid_parameter_error(
        "continuous_coefficients: 1 - mu ((1-n)/2) chi must be positive");
  }
  const double drift = params.mu * weight_f * params.phi *
                       (params.fundamental_price - log_price) / denom;
  const double diffusion =
      params.mu * (weight_f * params.sigma_f + weight_c * params.sigma_c) /
      denom;
  return {drift, diffusion};
}

}  // namespace abcem::fw
