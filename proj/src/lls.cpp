#include "abcem/lls.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "abcem/errors.hpp"

namespace abcem::lls {

namespace {

constexpr double kDenominatorFloor = 1e-12;   // log-utility safety margin
constexpr double kIndifferenceTol = 1e-14;
constexpr double kBisectionTol = 1e-10;       // on the gamma interval

// Candidate wealth inside the clearance residual; no bankruptcy check, the
// root finder probes unphysical prices on purpose.
double wealth_update_raw(double w, double gamma_prev, double r, double x,
                         double dt) {
  return w + dt * ((1.0 - gamma_prev) * r + gamma_prev * x) * w;
}

}  // namespace

void LlsParams::validate() const {
  if (num_agents < 1)
    throw invalid_parameter_error("LlsParams: num_agents must be >= 1");
  if (!(interest_rate > 0.0 && interest_rate < 1.0))
    throw invalid_parameter_error("LlsParams: interest_rate must be in (0,1)");
  if (!(dividend_lo <= dividend_hi))
    throw invalid_parameter_error("LlsParams: dividend_lo > dividend_hi");
  if (!(gamma_noise_sd >= 0.0))
    throw invalid_parameter_error("LlsParams: gamma_noise_sd must be >= 0");
  if (!(dt > 0.0)) throw invalid_parameter_error("LlsParams: dt must be > 0");
  if (total_shares < 1)
    throw invalid_parameter_error("LlsParams: total_shares must be >= 1");
  if (base_memory.size() != static_cast<std::size_t>(num_agents))
    throw invalid_parameter_error(
        "LlsParams: base_memory needs one entry per agent");
  for (double m : base_memory) {
    if (memory_mode == MemoryMode::Fixed ? !(m >= 1.0) : !(m > 0.0))
      throw invalid_parameter_error("LlsParams: base_memory entry too small");
    if (effective_memory(m, dt, memory_mode) < 1)
      throw invalid_parameter_error(
          "LlsParams: memory shorter than one step");
  }
  if (!(history_init_sd >= 0.0))
    throw invalid_parameter_error("LlsParams: history_init_sd must be >= 0");
  if (!(initial_gamma >= kGammaMin && initial_gamma <= kGammaMax))
    throw invalid_parameter_error("LlsParams: initial_gamma out of range");
  if (!(initial_wealth > 0.0))
    throw invalid_parameter_error("LlsParams: initial_wealth must be > 0");
  if (!(initial_price > 0.0))
    throw invalid_parameter_error("LlsParams: initial_price must be > 0");
  if (!(initial_dividend > 0.0))
    throw invalid_parameter_error("LlsParams: initial_dividend must be > 0");
}

int LlsParams::max_effective_memory() const {
  int out = 1;
  for (double m : base_memory)
    out = std::max(out, effective_memory(m, dt, memory_mode));
  return out;
}

int effective_memory(double m, double dt, MemoryMode mode) {
  if (mode == MemoryMode::Fixed)
    return std::max(1, static_cast<int>(std::llround(m)));
  return std::max(1, static_cast<int>(std::floor(m / dt + 1e-9)));
}

double dividend_step(double dividend, const LlsParams& params,
                     RngStream& rng) {
  const double z = rng.uniform(params.dividend_lo, params.dividend_hi);
  const double next = (1.0 + params.dt * z) * dividend;
  if (!(next > 0.0))
    throw invalid_parameter_error("dividend_step: nonpositive dividend");
  return next;
}

double step_return(double s_new, double s_old, double z_new, double dt) {
  return ((s_new - s_old) / dt + z_new) / s_old;
}

double foc_value(double gamma, std::span<const double> history, double r,
                 double dt) {
  if (history.empty())
    throw invalid_parameter_error("foc_value: empty history");
  const double base = 1.0 + dt * r;
  double sum = 0.0;
  for (double x : history) {
    const double excess = dt * (x - r);
    const double denom = excess * gamma + base;
    if (denom <= kDenominatorFloor)
      throw degenerate_history_error(
          "foc_value: wealth factor vanishes on the feasible range");
    sum += excess / denom;
  }
  return sum / static_cast<double>(history.size());
}

std::optional<double> maximizing_gamma(std::span<const double> history,
                                       double r, double dt) {
  const double f_lo = foc_value(kGammaMin, history, r, dt);
  const double f_hi = foc_value(kGammaMax, history, r, dt);
  if (std::abs(f_lo) <= kIndifferenceTol && std::abs(f_hi) <= kIndifferenceTol)
    return std::nullopt;
  if (f_lo <= 0.0) return kGammaMin;
  if (f_hi >= 0.0) return kGammaMax;
  // f is strictly decreasing here, with f(lo) > 0 > f(hi).
  double lo = kGammaMin;
  double hi = kGammaMax;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    (foc_value(mid, history, r, dt) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double optimal_gamma(std::span<const double> history, double r, double dt,
                     double prev_gamma) {
  return maximizing_gamma(history, r, dt).value_or(prev_gamma);
}

double clamp_gamma(double x) {
  return std::min(kGammaMax, std::max(kGammaMin, x));
}

double noisy_gamma(double gamma_star, const LlsParams& params,
                   RngStream& rng) {
  return clamp_gamma(gamma_star + rng.normal(0.0, params.gamma_noise_sd));
}

double wealth_step(double w, double gamma_prev, double r, double x,
                   double dt) {
  const double next = wealth_update_raw(w, gamma_prev, r, x, dt);
  if (!(next > 0.0))
    throw bankruptcy_error("wealth_step: nonpositive wealth");
  return next;
}

std::vector<double> init_history(const LlsParams& params, RngStream& rng) {
  std::vector<double> out(params.max_effective_memory());
  for (double& x : out)
    x = rng.normal(params.history_init_mean, params.history_init_sd);
  return out;
}

double clearance_price_explicit(std::span<const Agent> agents,
                                std::span<const double> new_gammas,
                                double old_price, double dividend,
                                const LlsParams& params) {
  // Substituting the wealth update (return evaluated at the candidate
  // price) into the clearance condition leaves a relation linear in S:
  //   S (n - sum_i g_i g'_i w_i / S_old)
  //     = sum_i g_i w_i (1 + dt (1-g'_i) r + g'_i (dt Z - S_old)/S_old).
  double held_demand = 0.0;
  double numerator = 0.0;
  const double r = params.interest_rate;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Agent& a = agents[i];
    held_demand += new_gammas[i] * a.gamma * a.wealth;
    numerator += new_gammas[i] * a.wealth *
                 (1.0 + params.dt * (1.0 - a.gamma) * r +
                  a.gamma * (params.dt * dividend - old_price) / old_price);
  }
  const double denom =
      static_cast<double>(params.total_shares) - held_demand / old_price;
  if (!(denom > 0.0))
    throw clearance_error("clearance: nonpositive demand denominator");
  const double price = numerator / denom;
  if (!(price > 0.0))
    throw clearance_error("clearance: nonpositive price");
  return price;
}

double clearance_price_fixed_point(std::span<const Agent> agents,
                                   std::span<const double> new_gammas,
                                   double old_price, double dividend,
                                   const LlsParams& params) {
  const double r = params.interest_rate;
  const auto residual = [&](double s) {
    const double x = step_return(s, old_price, dividend, params.dt);
    double demanded = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Agent& a = agents[i];
      demanded +=
          new_gammas[i] * wealth_update_raw(a.wealth, a.gamma, r, x, params.dt);
    }
    return static_cast<double>(params.total_shares) - demanded / s;
  };

  double lo = old_price * 1e-12;
  double hi = old_price;
  double f_hi = residual(hi);
  for (int i = 0; f_hi < 0.0 && i < 120; ++i) {
    hi *= 2.0;
    f_hi = residual(hi);
  }
  const double f_lo = residual(lo);
  if (!(f_lo < 0.0 && f_hi >= 0.0))
    throw clearance_error("clearance: no bracketing interval");
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double clearance_residual(std::span<const Agent> agents, double price,
                          long long total_shares) {
  double demanded = 0.0;
  for (const Agent& a : agents) demanded += a.gamma * a.wealth;
  return static_cast<double>(total_shares) - demanded / price;
}

Simulation Simulation::init(const LlsParams& params, RngStream& rng) {
  params.validate();
  Simulation sim;
  sim.params_ = params;
  sim.agents_.reserve(params.num_agents);
  for (int i = 0; i < params.num_agents; ++i) {
    sim.agents_.push_back(
        {params.initial_wealth, params.initial_gamma, params.initial_gamma,
         effective_memory(params.base_memory[i], params.dt,
                          params.memory_mode)});
  }
  sim.price_ = params.initial_price;
  sim.prev_price_ = params.initial_price;
  sim.dividend_ = params.initial_dividend;
  sim.returns_ = init_history(params, rng);
  sim.decisions_.assign(params.num_agents, params.initial_gamma);
  sim.new_gammas_.assign(params.num_agents, params.initial_gamma);
  return sim;
}

std::span<const double> Simulation::recent_returns(int k) const {
  const std::size_t n = returns_.size();
  const std::size_t take = std::min<std::size_t>(k, n);
  return {returns_.data() + (n - take), take};
}

double Simulation::mean_wealth() const {
  double sum = 0.0;
  for (const Agent& a : agents_) sum += a.wealth;
  return sum / static_cast<double>(agents_.size());
}

void Simulation::step(RngStream& rng) {
  const LlsParams& p = params_;

  // Agents sharing a lookback length see the same history and therefore
  // the same optimum; solve once per distinct length. The indifference tie
  // stays per-agent (each keeps its own held allocation).
  std::unordered_map<int, std::optional<double>> solved;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const int m = agents_[i].effective_memory;
    auto it = solved.find(m);
    if (it == solved.end()) {
      it = solved
               .emplace(m, maximizing_gamma(recent_returns(m),
                                            p.interest_rate, p.dt))
               .first;
    }
    decisions_[i] = it->second.value_or(agents_[i].gamma);
  }

  for (std::size_t i = 0; i < agents_.size(); ++i)
    new_gammas_[i] = noisy_gamma(decisions_[i], p, rng);

  // The dividend is realized before clearing: the cleared price, the step
  // return, and the wealth accrual all see the same Z.
  const double z_new = dividend_step(dividend_, p, rng);
  const double s_new =
      clearance_price_explicit(agents_, new_gammas_, price_, z_new, p);
  const double x = step_return(s_new, price_, z_new, p.dt);

  for (Agent& a : agents_) {
    try {
      a.wealth = wealth_step(a.wealth, a.gamma, p.interest_rate, x, p.dt);
    } catch (const bankruptcy_error&) {
      throw bankruptcy_error("lls step " + std::to_string(step_index_ + 1) +
                             ": agent wealth not positive");
    }
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    agents_[i].prev_gamma = agents_[i].gamma;
    agents_[i].gamma = new_gammas_[i];
  }

  returns_.push_back(x);
  prev_price_ = price_;
  price_ = s_new;
  dividend_ = z_new;
  time_ += p.dt;
  ++step_index_;

  last_residual_ =
      std::abs(clearance_residual(agents_, price_, p.total_shares)) /
      static_cast<double>(p.total_shares);
  max_residual_ = std::max(max_residual_, last_residual_);
}

}  // namespace abcem::lls
