#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "regime_scout/errors.hpp"

namespace regime_scout {

enum class SystemKind { pendulum, lorenz, duffing };

inline const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::pendulum: return "pendulum";
    case SystemKind::lorenz: return "lorenz";
    case SystemKind::duffing: return "duffing";
  }
  return "?";
}

inline SystemKind system_kind_from_string(const std::string& s,
                                          const std::string& path = "system.kind") {
  if (s == "pendulum") return SystemKind::pendulum;
  if (s == "lorenz") return SystemKind::lorenz;
  if (s == "duffing") return SystemKind::duffing;
  throw ConfigError(path, "unknown system kind '" + s +
                              "' (expected pendulum, lorenz or duffing)");
}

// One free axis of the search box: a named coefficient or initial condition
// swept over [lo, hi].
struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

// Point in the search box, aligned with SystemSpec::free_axes.
using ParameterVector = std::vector<double>;

namespace detail {

inline const std::vector<std::string>& coefficient_names(SystemKind k) {
  static const std::vector<std::string> pend{"lambda", "omega"};
  static const std::vector<std::string> lor{"b", "rho", "s"};
  static const std::vector<std::string> duf{"F", "alpha", "epsilon", "lambda", "sigma"};
  switch (k) {
    case SystemKind::pendulum: return pend;
    case SystemKind::lorenz: return lor;
    case SystemKind::duffing: return duf;
  }
  return pend;
}

inline const std::vector<std::string>& ic_names(SystemKind k) {
  static const std::vector<std::string> second_order{"v0", "x0"};
  static const std::vector<std::string> lor{"x0", "y0", "z0"};
  return k == SystemKind::lorenz ? lor : second_order;
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// State cap: anything beyond this is treated as divergence, not data.
constexpr double kBlowupGuard = 1e12;

}  // namespace detail

// Uniformly sampled multichannel record; values[c][i] is channel c at t = i*dt.
struct TimeSeries {
  double dt = 0.0;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> values;

  std::size_t length() const { return values.empty() ? 0 : values.front().size(); }
};

// A benchmark system plus the split of its named quantities into fixed values
// and free axes, and the integration horizon.
struct SystemSpec {
  SystemKind kind = SystemKind::pendulum;
  std::map<std::string, double> coefficients;
  std::map<std::string, double> initial_conditions;
  std::vector<Axis> free_axes;
  double t_f = 0.0;
  int n_t = 0;

  // Throws ConfigError naming the offending key under `prefix`.
  void validate(const std::string& prefix = "system") const {
    if (!(std::isfinite(t_f) && t_f > 0.0))
      throw ConfigError(prefix + ".t_f", "termination time must be finite and > 0");
    if (n_t < 2) throw ConfigError(prefix + ".n_t", "need at least 2 time samples");

    const auto& coeffs = detail::coefficient_names(kind);
    const auto& ics = detail::ic_names(kind);

    for (const auto& [name, value] : coefficients) {
      if (!detail::contains(coeffs, name))
        throw ConfigError(prefix + ".coefficients." + name,
                          "not a coefficient of " + std::string(to_string(kind)));
      if (!std::isfinite(value))
        throw ConfigError(prefix + ".coefficients." + name, "value must be finite");
    }
    for (const auto& [name, value] : initial_conditions) {
      if (!detail::contains(ics, name))
        throw ConfigError(prefix + ".ics." + name,
                          "not an initial condition of " + std::string(to_string(kind)));
      if (!std::isfinite(value))
        throw ConfigError(prefix + ".ics." + name, "value must be finite");
    }

    for (std::size_t i = 0; i < free_axes.size(); ++i) {
      const std::string path = prefix + ".free_axes[" + std::to_string(i) + "]";
      const Axis& ax = free_axes[i];
      if (!detail::contains(coeffs, ax.name) && !detail::contains(ics, ax.name))
        throw ConfigError(path, "'" + ax.name + "' is not a coefficient or initial condition of " +
                                    std::string(to_string(kind)));
      if (!(std::isfinite(ax.lo) && std::isfinite(ax.hi) && ax.lo < ax.hi))
        throw ConfigError(path, "axis bounds must be finite with min < max");
      for (std::size_t j = 0; j < i; ++j)
        if (free_axes[j].name == ax.name)
          throw ConfigError(path, "'" + ax.name + "' appears on more than one axis");
      if (coefficients.count(ax.name) || initial_conditions.count(ax.name))
        throw ConfigError(path, "'" + ax.name + "' is bound both as a fixed value and a free axis");
    }

    auto check_bound = [&](const std::string& name, bool fixed) {
      bool free = false;
      for (const Axis& ax : free_axes) free = free || ax.name == name;
      if (!fixed && !free)
        throw ConfigError(prefix, "'" + name + "' is unbound; fix it or add a free axis");
    };
    for (const auto& name : coeffs) check_bound(name, coefficients.count(name) > 0);
    for (const auto& name : ics) check_bound(name, initial_conditions.count(name) > 0);
  }

  // Index into theta for a free name, -1 for a fixed one.
  int axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < free_axes.size(); ++i)
      if (free_axes[i].name == name) return static_cast<int>(i);
    return -1;
  }

  double resolve(const std::string& name, const ParameterVector& theta) const {
    const int idx = axis_index(name);
    if (idx >= 0) return theta[static_cast<std::size_t>(idx)];
    if (auto it = coefficients.find(name); it != coefficients.end()) return it->second;
    if (auto it = initial_conditions.find(name); it != initial_conditions.end()) return it->second;
    throw ConfigError("system", "'" + name + "' is not bound anywhere");
  }

  void validate_point(const ParameterVector& theta) const {
    if (theta.size() != free_axes.size())
      throw ConfigError("theta", "expected " + std::to_string(free_axes.size()) +
                                     " components, got " + std::to_string(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (!std::isfinite(theta[i]) || theta[i] < free_axes[i].lo || theta[i] > free_axes[i].hi)
        throw ConfigError("theta[" + std::to_string(i) + "]",
                          "outside the bounds of axis '" + free_axes[i].name + "'");
    }
  }
};

// Classical fixed-step RK4 over n_steps steps of size dt. `rhs(t, y, dy)` fills
// the derivative, `record(i, y)` sees every state including i = 0. Throws
// NonFiniteError as soon as the state leaves the guard box.
template <std::size_t N, class Rhs, class Record>
void rk4_integrate(Rhs&& rhs, std::array<double, N> y, double dt, std::size_t n_steps,
                   Record&& record) {
  std::array<double, N> k1{}, k2{}, k3{}, k4{}, tmp{};
  record(std::size_t{0}, y);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t = dt * static_cast<double>(step - 1);
    rhs(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(t + dt, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(y[i]) || std::fabs(y[i]) > detail::kBlowupGuard)
        throw NonFiniteError(step, "integration diverged at step " + std::to_string(step));
    record(step, y);
  }
}

// Integrates the configured system at theta. Pendulum/Duffing expose the single
// channel x; Lorenz exposes x, y, z. The pendulum angle is not wrapped.
inline TimeSeries simulate(const SystemSpec& spec, const ParameterVector& theta) {
  spec.validate();
  spec.validate_point(theta);
  const std::size_t n_steps = static_cast<std::size_t>(spec.n_t) - 1;
  const double dt = spec.t_f / static_cast<double>(n_steps);

  TimeSeries ts;
  ts.dt = dt;
  switch (spec.kind) {
    case SystemKind::pendulum: {
      const double lambda = spec.resolve("lambda", theta);
      const double omega = spec.resolve("omega", theta);
      ts.channels = {"x"};
      ts.values.assign(1, std::vector<double>(static_cast<std::size_t>(spec.n_t)));
      rk4_integrate<2>(
          [&](double, const std::array<double, 2>& s, std::array<double, 2>& d) {
            d[0] = s[1];
            d[1] = -lambda * s[1] - omega * omega * std::sin(s[0]);
          },
          {spec.resolve("x0", theta), spec.resolve("v0", theta)}, dt, n_steps,
          [&](std::size_t i, const std::array<double, 2>& s) { ts.values[0][i] = s[0]; });
      break;
    }
    case SystemKind::lorenz: {
      const double s_ = spec.resolve("s", theta);
      const double rho = spec.resolve("rho", theta);
      const double b = spec.resolve("b", theta);
      ts.channels = {"x", "y", "z"};
      ts.values.assign(3, std::vector<double>(static_cast<std::size_t>(spec.n_t)));
      rk4_integrate<3>(
          [&](double, const std::array<double, 3>& s, std::array<double, 3>& d) {
            d[0] = s_ * (s[1] - s[0]);
            d[1] = s[0] * (rho - s[2]) - s[1];
            d[2] = s[0] * s[1] - b * s[2];
          },
          {spec.resolve("x0", theta), spec.resolve("y0", theta), spec.resolve("z0", theta)}, dt,
          n_steps, [&](std::size_t i, const std::array<double, 3>& s) {
            ts.values[0][i] = s[0];
            ts.values[1][i] = s[1];
            ts.values[2][i] = s[2];
          });
      break;
    }
    case SystemKind::duffing: {
      const double eps = spec.resolve("epsilon", theta);
      const double lambda = spec.resolve("lambda", theta);
      const double alpha = spec.resolve("alpha", theta);
      const double F = spec.resolve("F", theta);
      const double sigma = spec.resolve("sigma", theta);
      const double w = 1.0 + eps * sigma;
      ts.channels = {"x"};
      ts.values.assign(1, std::vector<double>(static_cast<std::size_t>(spec.n_t)));
      rk4_integrate<2>(
          [&](double t, const std::array<double, 2>& s, std::array<double, 2>& d) {
            d[0] = s[1];
            d[1] = -2.0 * eps * lambda * s[1] - s[0] - eps * alpha * s[0] * s[0] * s[0] +
                   eps * F * std::sin(w * t);
          },
          {spec.resolve("x0", theta), spec.resolve("v0", theta)}, dt, n_steps,
          [&](std::size_t i, const std::array<double, 2>& s) { ts.values[0][i] = s[0]; });
      break;
    }
  }
  return ts;
}

// Separatrix velocity curve of the undamped unit-frequency pendulum in the
// (x0, v0) plane; callers use the ± symmetry. Supremum over x0 is 2.
inline double pendulum_separatrix(double x0) {
  return std::sqrt(2.0 * (1.0 - std::cos(x0)));
}

struct FrcPoint {
  double sigma_minus = 0.0;
  double sigma_plus = 0.0;
};

// Frequency-response curve of the weakly forced Duffing oscillator: the two
// detunings at which the slow-flow response amplitude equals `a`,
// sigma = (3 alpha / 8) a^2 -/+ sqrt(F^2 / (4 a^2) - lambda^2).
inline FrcPoint duffing_frc(double a, double F, double alpha, double lambda) {
  if (!(a > 0.0)) throw ConfigError("a", "amplitude must be > 0");
  const double disc = F * F / (4.0 * a * a) - lambda * lambda;
  if (disc < 0.0)
    throw NegativeDiscriminantError("amplitude " + std::to_string(a) +
                                    " lies outside the response curve");
  const double backbone = 3.0 * alpha / 8.0 * a * a;
  const double root = std::sqrt(disc);
  return {backbone - root, backbone + root};
}

inline FrcPoint duffing_frc(double a, const SystemSpec& spec) {
  if (spec.kind != SystemKind::duffing)
    throw ConfigError("system.kind", "frequency-response curve needs a duffing system");
  for (const char* name : {"F", "alpha", "lambda"})
    if (!spec.coefficients.count(name))
      throw ConfigError("system.coefficients",
                        std::string("'") + name + "' must be fixed to evaluate the response curve");
  return duffing_frc(a, spec.coefficients.at("F"), spec.coefficients.at("alpha"),
                     spec.coefficients.at("lambda"));
}

// Steady-state response amplitude by brute force: re-integrates at 4x the
// configured horizon (same dt) and takes max |x| over the final quarter of the
// samples, well past any transient.
inline double duffing_amplitude_oracle(const SystemSpec& spec, const ParameterVector& theta) {
  if (spec.kind != SystemKind::duffing)
    throw ConfigError("system.kind", "amplitude oracle needs a duffing system");
  SystemSpec longer = spec;
  longer.n_t = 4 * (spec.n_t - 1) + 1;
  longer.t_f = 4.0 * spec.t_f;
  const TimeSeries ts = simulate(longer, theta);
  const std::vector<double>& x = ts.values.front();
  double amp = 0.0;
  for (std::size_t i = x.size() - x.size() / 4; i < x.size(); ++i)
    amp = std::max(amp, std::fabs(x[i]));
  return amp;
}

}  // namespace regime_scout
