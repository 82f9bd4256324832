#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "abcem/rng.hpp"

namespace abcem::lls {

enum class MemoryMode {
  Scaled,  // lookback covers a fixed time span: floor(m / dt) steps
  Fixed,   // lookback covers a fixed number of steps regardless of dt
};

// Allocations live on [kGammaMin, kGammaMax].
inline constexpr double kGammaMin = 0.01;
inline constexpr double kGammaMax = 0.99;

// Defaults are the basic Levy-Levy-Solomon calibration (uniform memory 15,
// one hundred agents holding one hundred shares each).
struct LlsParams {
  int num_agents = 100;
  double interest_rate = 0.04;  // r, 1/time
  double dividend_lo = 0.05;    // z1, 1/time
  double dividend_hi = 0.05;    // z2, 1/time
  double gamma_noise_sd = 0.2;  // sigma_gamma
  double dt = 1.0;
  long long total_shares = 10000;
  MemoryMode memory_mode = MemoryMode::Scaled;
  std::vector<double> base_memory;  // per agent; time (Scaled) or steps (Fixed)
  double history_init_mean = 0.0415;  // mu_h
  double history_init_sd = 0.003;     // sigma_h
  double initial_gamma = 0.4;
  double initial_wealth = 1000.0;
  double initial_price = 4.0;
  double initial_dividend = 0.2;

  void validate() const;  // throws invalid_parameter_error
  int max_effective_memory() const;
};

// Scaled: floor(m / dt), never below one step (a small tolerance keeps
// ratios like 15/0.1 on the intended integer). Fixed: m unchanged.
int effective_memory(double m, double dt, MemoryMode mode);

// Z' = (1 + dt z) Z with z ~ U[z1, z2]. Throws invalid_parameter_error if
// the result is not positive.
double dividend_step(double dividend, const LlsParams& params, RngStream& rng);

// x = ((S_new - S_old)/dt + Z_new) / S_old: the step's starting price is
// the denominator throughout this codebase.
double step_return(double s_new, double s_old, double z_new, double dt);

// Derivative of the expected log utility of allocating `gamma` to stock:
//   f(gamma) = (1/m) sum_j dt (x_j - r) / (dt (x_j - r) gamma + 1 + dt r).
// Throws degenerate_history_error when a denominator is not safely positive.
double foc_value(double gamma, std::span<const double> history, double r,
                 double dt);

// Maximizer of expected log utility over [kGammaMin, kGammaMax]:
// the boundary when the first-order condition has one sign there, the
// unique interior root otherwise (bisection to 1e-10). nullopt signals
// total indifference (f identically zero within 1e-14).
std::optional<double> maximizing_gamma(std::span<const double> history,
                                       double r, double dt);

// maximizing_gamma with the indifference tie broken by keeping prev_gamma.
double optimal_gamma(std::span<const double> history, double r, double dt,
                     double prev_gamma);

double clamp_gamma(double x);

// H(gamma* + eps) with eps ~ N(0, sigma_gamma^2).
double noisy_gamma(double gamma_star, const LlsParams& params, RngStream& rng);

// w' = w + dt [(1 - gamma) r + gamma x] w. Throws bankruptcy_error if the
// result is not positive.
double wealth_step(double w, double gamma_prev, double r, double x, double dt);

// i.i.d. N(mu_h, sigma_h^2) artificial returns, one per step of the longest
// lookback.
std::vector<double> init_history(const LlsParams& params, RngStream& rng);

struct Agent {
  double wealth;
  double gamma;       // allocation currently held
  double prev_gamma;  // allocation held one step earlier
  int effective_memory;
};

// Closed form of the market-clearance price: total shares demanded at the
// new price, with wealths advanced by the step return at that price, equal
// total outstanding shares. `new_gammas` are the allocations just decided;
// agents still carry the held allocations and pre-step wealths. `dividend`
// is the dividend entering the step's return. Throws clearance_error on a
// nonpositive denominator or price.
double clearance_price_explicit(std::span<const Agent> agents,
                                std::span<const double> new_gammas,
                                double old_price, double dividend,
                                const LlsParams& params);

// Root of the clearance residual n - sum_i gamma_i w_i(S)/S by bracketing
// bisection to 1e-12 relative. This is the authority the closed form is
// validated against. Throws clearance_error when no bracket exists.
double clearance_price_fixed_point(std::span<const Agent> agents,
                                   std::span<const double> new_gammas,
                                   double old_price, double dividend,
                                   const LlsParams& params);

// Residual n - sum_i gamma_i w_i / S of a settled market state.
double clearance_residual(std::span<const Agent> agents, double price,
                          long long total_shares);

class Simulation {
 public:
  static Simulation init(const LlsParams& params, RngStream& rng);

  // One full step: allocations re-optimized on the shared return history,
  // noised, the market cleared, the dividend and return realized, wealths
  // accrued on the allocations held over the step.
  void step(RngStream& rng);

  const LlsParams& params() const { return params_; }
  const std::vector<Agent>& agents() const { return agents_; }
  double price() const { return price_; }
  double prev_price() const { return prev_price_; }
  double dividend() const { return dividend_; }
  double time() const { return time_; }
  std::size_t step_index() const { return step_index_; }
  double mean_wealth() const;

  // Optimizer outputs of the latest step, one per agent, before noise.
  const std::vector<double>& decisions() const { return decisions_; }

  // |n - sum gamma w / S| / n after the latest step, and the worst so far.
  double last_clearance_residual() const { return last_residual_; }
  double max_clearance_residual() const { return max_residual_; }

  // The k most recent step returns, oldest first.
  std::span<const double> recent_returns(int k) const;

 private:
  LlsParams params_;
  std::vector<Agent> agents_;
  double price_ = 0.0;
  double prev_price_ = 0.0;
  double dividend_ = 0.0;
  double time_ = 0.0;
  std::size_t step_index_ = 0;
  std::vector<double> returns_;  // artificial prefix + every realized return
  std::vector<double> decisions_;
  std::vector<double> new_gammas_;
  double last_residual_ = 0.0;
  double max_residual_ = 0.0;
};

}  // namespace abcem::lls
