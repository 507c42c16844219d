#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "regime_scout/fft.hpp"
#include "regime_scout/random.hpp"

using regime_scout::fft;
using regime_scout::Rng;

namespace {

// O(n^2) reference transform with a precomputed twiddle table, so its own
// rounding stays well under the comparison tolerance.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) sum += x[t] * w[(t * k) % n];
    out[k] = sum;
  }
  return out;
}

}  // namespace

TEST_CASE("constant signal concentrates in bin zero") {
  std::vector<std::complex<double>> x(8, 3.0);
  const auto spectrum = fft(x);
  CHECK(std::abs(spectrum[0] - std::complex<double>(24.0)) < 1e-12);
  for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(spectrum[k]) < 1e-12);
}

TEST_CASE("pure cosine splits into two conjugate bins") {
  const std::size_t n = 64;
  std::vector<std::complex<double>> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = std::cos(2.0 * std::numbers::pi * 5.0 * static_cast<double>(t) / static_cast<double>(n));
  const auto spectrum = fft(x);
  CHECK(std::abs(spectrum[5]) == Catch::Approx(32.0).margin(1e-9));
  CHECK(std::abs(spectrum[59]) == Catch::Approx(32.0).margin(1e-9));
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 5 || k == 59) continue;
    CHECK(std::abs(spectrum[k]) < 1e-9);
  }
}

TEST_CASE("non-power-of-two length is rejected") {
  std::vector<std::complex<double>> x(12, 1.0);
  CHECK_THROWS_AS(regime_scout::fft_inplace(x), regime_scout::DimensionMismatchError);
}

TEST_CASE("matches the quadratic transform on random signals") {
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::complex<double>> x(1024);
    for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const auto fast = fft(x);
    const auto slow = naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k)
      worst = std::max(worst, std::abs(fast[k] - slow[k]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("energy is conserved up to the transform scale") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::complex<double>> x(1024);
    double time_energy = 0.0;
    for (auto& v : x) {
      v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      time_energy += std::norm(v);
    }
    const auto spectrum = fft(x);
    double freq_energy = 0.0;
    for (const auto& v : spectrum) freq_energy += std::norm(v);
    CHECK(freq_energy / static_cast<double>(x.size()) ==
          Catch::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("linearity") {
  Rng rng(11);
  std::vector<std::complex<double>> a(256), b(256), sum(256);
  for (std::size_t i = 0; i < 256; ++i) {
    a[i] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    b[i] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    sum[i] = 2.0 * a[i] + 3.0 * b[i];
  }
  const auto fa = fft(a), fb = fft(b), fsum = fft(sum);
  for (std::size_t k = 0; k < 256; ++k)
    CHECK(std::abs(fsum[k] - (2.0 * fa[k] + 3.0 * fb[k])) < 1e-10);
}
