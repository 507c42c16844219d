#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regime_scout/errors.hpp"
#include "regime_scout/linalg.hpp"
#include "regime_scout/optimize.hpp"
#include "regime_scout/random.hpp"

namespace regime_scout {

// Kernel / noise scales, all strictly positive. The fit searches in log-space,
// which enforces positivity by construction.
struct Hyperparameters {
  double sigma_n = 0.1;  // observation-noise std
  double length = 0.3;   // isotropic length scale, unit-cube coordinates
  double sigma_l = 1.0;  // signal std
};

// Search box for the fit (linear scale; bounds must be positive).
struct HyperBox {
  std::array<double, 2> sigma_n{1e-4, 0.5};
  std::array<double, 2> length{0.01, 2.0};
  std::array<double, 2> sigma_l{0.05, 3.05};

  void validate(const std::string& prefix = "gp") const {
    auto check = [&](const std::array<double, 2>& b, const char* name) {
      if (!(std::isfinite(b[0]) && std::isfinite(b[1]) && b[0] > 0.0 && b[0] <= b[1]))
        throw ConfigError(prefix + "." + name, "bounds must be positive with lo <= hi");
    };
    check(sigma_n, "sigma_n_bounds");
    check(length, "length_bounds");
    check(sigma_l, "sigma_l_bounds");
  }
};

// Signal-std bound tied to the observed target spread, so the box stays
// meaningful whether labels span {0,1} or {0..5}.
inline HyperBox default_hyper_box(std::span<const double> targets) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double t : targets) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  const double range = targets.empty() ? 0.0 : hi - lo;
  HyperBox box;
  box.sigma_l = {0.05, 3.0 * range + 0.05};
  return box;
}

inline double kernel(std::span<const double> x, std::span<const double> y,
                     const Hyperparameters& h) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return h.sigma_l * h.sigma_l * std::exp(-d2 / (2.0 * h.length * h.length));
}

namespace detail {

struct CovFactor {
  std::vector<double> chol;
  double jitter = 0.0;
};

// K + sigma_n^2 I + jitter I, Cholesky-factored. Jitter starts at 1e-10
// sigma_l^2 and escalates x10 to 1e-4 sigma_l^2 before giving up.
inline std::optional<CovFactor> factor_covariance(const std::vector<std::vector<double>>& x,
                                                  const Hyperparameters& h) {
  const std::size_t n = x.size();
  std::vector<double> base(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel(x[i], x[j], h);
      base[i * n + j] = k;
      base[j * n + i] = k;
    }
    base[i * n + i] += h.sigma_n * h.sigma_n;
  }
  const double sl2 = h.sigma_l * h.sigma_l;
  for (double jitter = 1e-10 * sl2; jitter <= 1.0000001e-4 * sl2; jitter *= 10.0) {
    std::vector<double> a = base;
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += jitter;
    if (cholesky_lower(a, n)) return CovFactor{std::move(a), jitter};
  }
  return std::nullopt;
}

}  // namespace detail

// Negative log marginal likelihood of the targets under the GP prior:
// 1/2 t^T K_tt^{-1} t + 1/2 log|K_tt| + (N/2) log 2pi. Lower is better.
inline double nlml(const Hyperparameters& h, const std::vector<std::vector<double>>& inputs,
                   const std::vector<double>& targets) {
  const std::size_t n = inputs.size();
  if (n == 0 || n != targets.size())
    throw DimensionMismatchError("nlml needs matching, nonempty inputs and targets");
  auto factor = detail::factor_covariance(inputs, h);
  if (!factor) throw NotPositiveDefiniteError("covariance not positive definite at max jitter");
  std::vector<double> v = targets;
  solve_lower(factor->chol, n, v);
  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) logdet += std::log(factor->chol[i * n + i]);
  return 0.5 * dot(v, v) + logdet +
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

// MAP fit by multistart coordinate descent: from n_starts seeded-uniform points
// in the log-space box, cycle golden-section line searches over each coordinate
// until the objective stalls. Ties across starts go to the lowest start index.
// Throws NotPositiveDefinite only if every evaluation of every start failed.
inline Hyperparameters fit_hyperparameters(const std::vector<std::vector<double>>& inputs,
                                           const std::vector<double>& targets,
                                           const HyperBox& box, int n_starts,
                                           std::uint64_t seed) {
  if (inputs.size() < 2) throw DimensionMismatchError("hyperparameter fit needs >= 2 points");
  box.validate();
  const std::array<std::array<double, 2>, 3> lb{{
      {std::log(box.sigma_n[0]), std::log(box.sigma_n[1])},
      {std::log(box.length[0]), std::log(box.length[1])},
      {std::log(box.sigma_l[0]), std::log(box.sigma_l[1])},
  }};

  const double inf = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::array<double, 3>& g) {
    const Hyperparameters h{std::exp(g[0]), std::exp(g[1]), std::exp(g[2])};
    try {
      return nlml(h, inputs, targets);
    } catch (const NotPositiveDefiniteError&) {
      return inf;
    }
  };

  Rng rng(seed);
  double best_f = inf;
  std::array<double, 3> best{};
  for (int s = 0; s < n_starts; ++s) {
    std::array<double, 3> g;
    for (int c = 0; c < 3; ++c) g[c] = rng.uniform(lb[c][0], lb[c][1]);
    double f = eval(g);
    for (int cycle = 0; cycle < 8; ++cycle) {
      const double f_before = f;
      for (int c = 0; c < 3; ++c) {
        auto [x, fx] = detail::golden_section(lb[c][0], lb[c][1], [&](double v) {
          std::array<double, 3> probe = g;
          probe[c] = v;
          return eval(probe);
        });
        if (fx <= f) {
          g[c] = x;
          f = fx;
        }
      }
      if (!(f_before - f > 1e-10 * (1.0 + std::fabs(f)))) break;
    }
    if (f < best_f) {
      best_f = f;
      best = g;
    }
  }
  if (!(best_f < inf))
    throw NotPositiveDefiniteError("every hyperparameter start failed to factorize");
  return {std::exp(best[0]), std::exp(best[1]), std::exp(best[2])};
}

struct Posterior {
  double mean = 0.0;
  double std = 0.0;
};

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Expected improvement over beta_max + zeta. Zero when the posterior is
// certain; the final clamp absorbs far-tail rounding.
inline double expected_improvement(const Posterior& post, double beta_max, double zeta) {
  if (!(post.std > 0.0)) return 0.0;
  const double delta = post.mean - beta_max - zeta;
  const double z = delta / post.std;
  const double ei = delta * normal_cdf(z) + post.std * normal_pdf(z);
  return ei > 0.0 ? ei : 0.0;
}

inline std::vector<double> normalize_to_unit(const std::vector<double>& lo,
                                             const std::vector<double>& hi,
                                             std::span<const double> theta) {
  std::vector<double> x(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) x[i] = (theta[i] - lo[i]) / (hi[i] - lo[i]);
  return x;
}

// Immutable fitted surrogate. Inputs are mapped to the unit hypercube before
// any kernel evaluation (axes of the benchmark boxes differ by orders of
// magnitude; an isotropic length scale is meaningless otherwise).
class GpModel {
 public:
  GpModel(std::vector<double> lo, std::vector<double> hi,
          const std::vector<std::vector<double>>& inputs, std::vector<double> targets,
          const Hyperparameters& hyper)
      : lo_(std::move(lo)), hi_(std::move(hi)), targets_(std::move(targets)), hyper_(hyper) {
    if (inputs.empty() || inputs.size() != targets_.size())
      throw DimensionMismatchError("model needs matching, nonempty inputs and targets");
    x_.reserve(inputs.size());
    for (const auto& p : inputs) {
      if (p.size() != lo_.size()) throw DimensionMismatchError("input dimension mismatch");
      x_.push_back(normalize_to_unit(lo_, hi_, p));
    }
    auto factor = detail::factor_covariance(x_, hyper_);
    if (!factor) throw NotPositiveDefiniteError("covariance not positive definite at max jitter");
    chol_ = std::move(factor->chol);
    jitter_ = factor->jitter;
    alpha_ = cholesky_solve(chol_, x_.size(), targets_);
  }

  Posterior predict(std::span<const double> theta) const {
    const std::size_t n = x_.size();
    const std::vector<double> xs = normalize_to_unit(lo_, hi_, theta);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = kernel(xs, x_[i], hyper_);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += k[i] * alpha_[i];
    solve_lower(chol_, n, k);
    const double var = std::max(0.0, hyper_.sigma_l * hyper_.sigma_l - dot(k, k));
    return {mu, std::sqrt(var)};
  }

  const Hyperparameters& hyper() const { return hyper_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& box_lo() const { return lo_; }
  const std::vector<double>& box_hi() const { return hi_; }

 private:
  std::vector<double> lo_, hi_;
  std::vector<std::vector<double>> x_;  // normalized training inputs
  std::vector<double> targets_;
  Hyperparameters hyper_;
  std::vector<double> chol_;   // lower factor of K + sigma_n^2 I + jitter I
  std::vector<double> alpha_;  // (K + sigma_n^2 I + jitter I)^{-1} targets
  double jitter_ = 0.0;
};

}  // namespace regime_scout
