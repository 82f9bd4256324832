#include "abcem/particles.hpp"

#include <algorithm>
#include <cmath>

#include "abcem/errors.hpp"

namespace abcem::mf {

namespace {

void rhs(std::span<const double> w, std::span<const double> gammas, double r,
         double z, std::span<double> out) {
  const std::size_t n = w.size();
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    denom += (1.0 - gammas[j]) * gammas[j] * w[j];
  denom /= static_cast<double>(n);
  if (!(denom > 0.0))
    throw singular_coefficient_error(
        "simplified_particle_run: interaction denominator not positive");
  for (std::size_t i = 0; i < n; ++i)
    out[i] = r * w[i] + gammas[i] * w[i] * z / denom;
}

}  // namespace

ParticleRun simplified_particle_run(std::span<const double> w0,
                                    std::span<const double> gammas, double r,
                                    const std::function<double(double)>& dividend,
                                    double horizon, double dt,
                                    std::size_t record_stride) {
  if (w0.empty() || w0.size() != gammas.size())
    throw invalid_parameter_error(
        "simplified_particle_run: need matching nonempty w0 and gammas");
  if (!(dt > 0.0) || !(horizon >= 0.0))
    throw invalid_parameter_error("simplified_particle_run: bad dt or horizon");
  for (std::size_t i = 0; i < w0.size(); ++i)
    if (!(w0[i] > 0.0) || !(gammas[i] > 0.0 && gammas[i] < 1.0))
      throw invalid_parameter_error(
          "simplified_particle_run: wealths must be positive, gammas in (0,1)");

  const std::size_t n = w0.size();
  std::vector<double> w(w0.begin(), w0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);

  ParticleRun out;
  out.times.push_back(0.0);
  out.wealth.push_back(w);

  double t = 0.0;
  std::size_t step = 0;
  while (t < horizon - 1e-15 * std::max(1.0, horizon)) {
    const double h = std::min(dt, horizon - t);

    rhs(w, gammas, r, dividend(t), k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + 0.5 * h * k1[i];
    rhs(stage, gammas, r, dividend(t + 0.5 * h), k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + 0.5 * h * k2[i];
    rhs(stage, gammas, r, dividend(t + 0.5 * h), k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + h * k3[i];
    rhs(stage, gammas, r, dividend(t + h), k4);
    for (std::size_t i = 0; i < n; ++i)
      w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    t += h;
    ++step;
    if (record_stride != 0 && step % record_stride == 0) {
      out.times.push_back(t);
      out.wealth.push_back(w);
    }
  }
  if (out.times.back() != t) {
    out.times.push_back(t);
    out.wealth.push_back(std::move(w));
  }
  return out;
}

}  // namespace abcem::mf
