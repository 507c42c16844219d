#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "regime_scout/dynamics.hpp"
#include "regime_scout/errors.hpp"
#include "regime_scout/fft.hpp"
#include "regime_scout/linalg.hpp"

namespace regime_scout {

struct EmbeddingConfig {
  std::size_t n_f = 1024;          // frequency bins, power of two
  double transient_fraction = 0.5; // leading share of samples dropped first

  void validate(const std::string& prefix = "embedding") const {
    if (!is_power_of_two(n_f))
      throw ConfigError(prefix + ".n_f", "bin count must be a power of two");
    if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
      throw ConfigError(prefix + ".transient_fraction", "must lie in [0, 1)");
  }
};

// Concatenated per-channel magnitude spectra; length N * n_f.
using EmbeddingVector = std::vector<double>;

// Magnitude spectrum of one channel: drop the leading transient_fraction of
// samples, decimate the remainder down to n_f points with stride
// floor(remaining / n_f) (so the window spans the whole post-transient record),
// transform, and return the n_f bin magnitudes. No amplitude normalization:
// regimes that differ only in response amplitude must stay distinguishable.
inline std::vector<double> fft_magnitude(std::span<const double> samples,
                                         const EmbeddingConfig& cfg) {
  cfg.validate();
  const std::size_t drop =
      static_cast<std::size_t>(std::floor(cfg.transient_fraction * static_cast<double>(samples.size())));
  const std::size_t remaining = samples.size() - drop;
  if (remaining < cfg.n_f)
    throw TooShortError("only " + std::to_string(remaining) + " samples left after trimming, need " +
                        std::to_string(cfg.n_f));
  const std::size_t stride = remaining / cfg.n_f;

  std::vector<std::complex<double>> buf(cfg.n_f);
  for (std::size_t i = 0; i < cfg.n_f; ++i) buf[i] = samples[drop + i * stride];
  fft_inplace(buf);

  std::vector<double> mag(cfg.n_f);
  for (std::size_t i = 0; i < cfg.n_f; ++i) mag[i] = std::abs(buf[i]);
  return mag;
}

// Channel-ordered concatenation of magnitude spectra.
inline EmbeddingVector embed(const TimeSeries& ts, const EmbeddingConfig& cfg) {
  EmbeddingVector v;
  v.reserve(ts.values.size() * cfg.n_f);
  for (const auto& channel : ts.values) {
    const std::vector<double> mag = fft_magnitude(channel, cfg);
    v.insert(v.end(), mag.begin(), mag.end());
  }
  return v;
}

struct PcaProjection {
  std::vector<std::vector<double>> coordinates;  // one k-vector per input vector
  std::vector<double> explained_variance;        // fraction of total variance per component
  bool degenerate = false;                       // all inputs identical
};

namespace detail {

// Deterministic sign: flip so the first non-negligible component is positive.
inline void fix_eigenvector_sign(std::vector<double>& w) {
  double peak = 0.0;
  for (double c : w) peak = std::max(peak, std::fabs(c));
  for (double c : w) {
    if (std::fabs(c) > 1e-12 * peak) {
      if (c < 0.0)
        for (double& x : w) x = -x;
      return;
    }
  }
}

}  // namespace detail

// Principal-component projection onto the top k directions of the sample
// covariance. Uses the m x m covariance when the dimension is small, otherwise
// the count x count Gram matrix (same nonzero spectrum, far cheaper for the
// long embedding vectors handled here).
inline PcaProjection pca_project(const std::vector<EmbeddingVector>& vectors, std::size_t k) {
  const std::size_t p = vectors.size();
  if (p < 2) throw DimensionMismatchError("pca needs at least 2 vectors");
  const std::size_t m = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != m) throw DimensionMismatchError("pca inputs differ in dimension");
  if (k == 0 || k > std::min(p, m))
    throw DimensionMismatchError("pca component count must be in [1, min(count, dim)]");

  std::vector<double> mean(m, 0.0);
  for (const auto& v : vectors)
    for (std::size_t i = 0; i < m; ++i) mean[i] += v[i];
  for (double& c : mean) c /= static_cast<double>(p);

  std::vector<std::vector<double>> centered(p, std::vector<double>(m));
  double total_var = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d = vectors[r][i] - mean[i];
      centered[r][i] = d;
      total_var += d * d;
    }
  }
  total_var /= static_cast<double>(p - 1);

  PcaProjection out;
  if (total_var <= 0.0) {
    out.coordinates.assign(p, std::vector<double>(k, 0.0));
    out.explained_variance.assign(k, 0.0);
    out.degenerate = true;
    return out;
  }

  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> directions;  // unit vectors in data space

  if (m <= p) {
    std::vector<double> cov(m * m, 0.0);
    for (const auto& row : centered)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) cov[i * m + j] += row[i] * row[j];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        cov[i * m + j] /= static_cast<double>(p - 1);
        cov[j * m + i] = cov[i * m + j];
      }
    std::vector<double> vals, vecs;
    symmetric_eigen(std::move(cov), m, vals, vecs);
    for (std::size_t c = 0; c < k; ++c) {
      eigenvalues.push_back(vals[c]);
      directions.emplace_back(vecs.begin() + static_cast<std::ptrdiff_t>(c * m),
                              vecs.begin() + static_cast<std::ptrdiff_t>((c + 1) * m));
    }
  } else {
    std::vector<double> gram(p * p, 0.0);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = r; c < p; ++c) {
        const double g = dot(centered[r], centered[c]) / static_cast<double>(p - 1);
        gram[r * p + c] = g;
        gram[c * p + r] = g;
      }
    std::vector<double> vals, vecs;
    symmetric_eigen(std::move(gram), p, vals, vecs);
    for (std::size_t c = 0; c < k; ++c) {
      eigenvalues.push_back(vals[c]);
      // direction = X^T u / ||X^T u||
      std::vector<double> w(m, 0.0);
      for (std::size_t r = 0; r < p; ++r) {
        const double u = vecs[c * p + r];
        for (std::size_t i = 0; i < m; ++i) w[i] += u * centered[r][i];
      }
      const double norm = std::sqrt(dot(w, w));
      if (norm > 0.0)
        for (double& x : w) x /= norm;
      directions.push_back(std::move(w));
    }
  }

  for (auto& w : directions) detail::fix_eigenvector_sign(w);

  out.coordinates.assign(p, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < k; ++c) out.coordinates[r][c] = dot(centered[r], directions[c]);
  out.explained_variance.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c)
    out.explained_variance[c] = std::max(0.0, eigenvalues[c]) / total_var;
  return out;
}

}  // namespace regime_scout
