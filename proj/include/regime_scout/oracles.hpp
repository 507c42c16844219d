#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "regime_scout/dynamics.hpp"
#include "regime_scout/errors.hpp"
#include "regime_scout/optimize.hpp"

namespace regime_scout {

// Ground-truth graders for the three benchmark planes, independent of the
// learned pipeline. Labels: 0 = the tame regime (oscillation / steady state /
// low amplitude), 1 = the other one.

// Oscillation iff the total energy sits below the saddle energy. Periodic in
// x0, so boxes wider than [-pi, pi] grade adjacent wells correctly.
inline int pendulum_oracle_label(double omega, double x0, double v0) {
  const double energy = 0.5 * v0 * v0 + omega * omega * (1.0 - std::cos(x0));
  return energy < 2.0 * omega * omega ? 0 : 1;
}

// Convergence test: channel variance aggregated over the final quarter of the
// record must fall under 1e-3 of the full-record aggregate.
inline bool lorenz_steady_state(const TimeSeries& ts) {
  double full = 0.0, tail = 0.0;
  std::size_t n_full = 0, n_tail = 0;
  for (const auto& channel : ts.values) {
    const std::size_t n = channel.size();
    const std::size_t tail_start = n - n / 4;
    double sum = 0.0, sum_tail = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += channel[i];
    for (std::size_t i = tail_start; i < n; ++i) sum_tail += channel[i];
    const double mean = sum / static_cast<double>(n);
    const double mean_tail = sum_tail / static_cast<double>(n - tail_start);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = channel[i] - mean;
      full += d * d;
    }
    for (std::size_t i = tail_start; i < n; ++i) {
      const double d = channel[i] - mean_tail;
      tail += d * d;
    }
    n_full += n;
    n_tail += n - tail_start;
  }
  const double var_full = full / static_cast<double>(n_full);
  const double var_tail = tail / static_cast<double>(n_tail);
  // the absolute floor keeps rounding noise on a flat record from mattering
  return var_tail < 1e-3 * var_full + 1e-12;
}

struct DuffingBranches {
  std::optional<double> low;   // stable small-amplitude solution
  std::optional<double> high;  // stable large-amplitude solution
};

// Stable steady-state amplitudes of the response curve at detuning sigma.
// The curve's two arms are monotone in amplitude: sigma_minus(a) rises to the
// peak amplitude F/(2 lambda), sigma_plus(a) falls to its fold minimum and
// turns back up (the rising part is the unstable middle branch). Each stable
// arm is bisected for sigma.
inline DuffingBranches duffing_stable_branches(double F, double alpha, double lambda,
                                               double sigma) {
  if (!(F > 0.0 && alpha > 0.0 && lambda > 0.0))
    throw ConfigError("system.coefficients",
                      "branch oracle needs F > 0, alpha > 0, lambda > 0");
  const double a_peak = F / (2.0 * lambda);
  const double a_tiny = a_peak * 1e-9;
  auto sigma_minus = [&](double a) { return duffing_frc(a, F, alpha, lambda).sigma_minus; };
  auto sigma_plus = [&](double a) { return duffing_frc(a, F, alpha, lambda).sigma_plus; };

  DuffingBranches out;
  if (sigma <= sigma_minus(a_peak)) {
    double lo = a_tiny, hi = a_peak;  // sigma_minus increasing, root bracketed
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sigma_minus(mid) < sigma ? lo : hi) = mid;
    }
    out.high = 0.5 * (lo + hi);
  }
  const auto [a_fold, fold_sigma] = detail::golden_section(a_tiny, a_peak, sigma_plus, 64);
  if (sigma >= fold_sigma) {
    double lo = a_tiny, hi = a_fold;  // sigma_plus decreasing on the stable arm
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sigma_plus(mid) > sigma ? lo : hi) = mid;
    }
    out.low = 0.5 * (lo + hi);
  }
  return out;
}

// Amplitude-threshold grader: midpoint of the two stable branches where both
// exist, otherwise all points take the single branch's label.
inline int duffing_oracle_label(const SystemSpec& spec, const ParameterVector& theta) {
  const DuffingBranches branches =
      duffing_stable_branches(spec.resolve("F", theta), spec.resolve("alpha", theta),
                              spec.resolve("lambda", theta), spec.resolve("sigma", theta));
  if (branches.low && branches.high) {
    const double amp = duffing_amplitude_oracle(spec, theta);
    return amp > 0.5 * (*branches.low + *branches.high) ? 1 : 0;
  }
  if (branches.high) return 1;
  if (branches.low) return 0;
  throw ConfigError("system", "no stable branch at this detuning");
}

inline int oracle_label(const SystemSpec& spec, const ParameterVector& theta) {
  switch (spec.kind) {
    case SystemKind::pendulum:
      return pendulum_oracle_label(spec.resolve("omega", theta), spec.resolve("x0", theta),
                                   spec.resolve("v0", theta));
    case SystemKind::lorenz:
      return lorenz_steady_state(simulate(spec, theta)) ? 0 : 1;
    case SystemKind::duffing:
      return duffing_oracle_label(spec, theta);
  }
  throw Error("unreachable");
}

}  // namespace regime_scout
