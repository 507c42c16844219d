#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "regime_scout/embedding.hpp"
#include "regime_scout/random.hpp"

using namespace regime_scout;

namespace {

double gauss(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double pair_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("single tone lands on its bin") {
  EmbeddingConfig cfg;
  cfg.n_f = 64;
  cfg.transient_fraction = 0.0;
  std::vector<double> x(64);
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = 1.25 * std::cos(2.0 * std::numbers::pi * 5.0 * static_cast<double>(j) / 64.0);
  const std::vector<double> mag = fft_magnitude(x, cfg);
  REQUIRE(mag.size() == 64);
  CHECK(mag[5] == Catch::Approx(40.0).margin(1e-9));
  CHECK(mag[59] == Catch::Approx(40.0).margin(1e-9));
  for (std::size_t k = 0; k < mag.size(); ++k)
    if (k != 5 && k != 59) CHECK(mag[k] < 1e-9);
}

TEST_CASE("constant offset is all DC") {
  EmbeddingConfig cfg;
  cfg.n_f = 64;
  cfg.transient_fraction = 0.0;
  const std::vector<double> x(64, 0.75);
  const std::vector<double> mag = fft_magnitude(x, cfg);
  CHECK(mag[0] == Catch::Approx(48.0).margin(1e-12));
  for (std::size_t k = 1; k < mag.size(); ++k) CHECK(mag[k] < 1e-12);
}

TEST_CASE("transient drop and stride select the documented samples") {
  EmbeddingConfig cfg;
  cfg.n_f = 256;
  cfg.transient_fraction = 0.5;
  std::vector<double> x(2048);
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = std::sin(0.01 * static_cast<double>(j)) + 0.001 * static_cast<double>(j);

  // reproduce the selection by hand: drop 1024, stride 4
  std::vector<std::complex<double>> sel(256);
  for (std::size_t i = 0; i < 256; ++i) sel[i] = x[1024 + 4 * i];
  fft_inplace(sel);

  const std::vector<double> mag = fft_magnitude(x, cfg);
  for (std::size_t k = 0; k < 256; ++k)
    CHECK(mag[k] == Catch::Approx(std::abs(sel[k])).margin(1e-12));
}

TEST_CASE("too little post-transient data is rejected") {
  EmbeddingConfig cfg;
  cfg.n_f = 1024;
  cfg.transient_fraction = 0.5;
  const std::vector<double> x(1500, 1.0);  // 750 left after trimming
  CHECK_THROWS_AS(fft_magnitude(x, cfg), TooShortError);
}

TEST_CASE("config validation names the bad key") {
  EmbeddingConfig cfg;
  cfg.n_f = 100;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("embedding.n_f") != std::string::npos);
  }
  cfg.n_f = 64;
  cfg.transient_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("channels concatenate in order") {
  EmbeddingConfig cfg;
  cfg.n_f = 32;
  cfg.transient_fraction = 0.0;
  TimeSeries ts;
  ts.dt = 0.1;
  ts.channels = {"a", "b"};
  ts.values.resize(2, std::vector<double>(32));
  for (std::size_t j = 0; j < 32; ++j) {
    ts.values[0][j] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(j) / 32.0);
    ts.values[1][j] = 2.0;
  }
  const EmbeddingVector v = embed(ts, cfg);
  REQUIRE(v.size() == 64);
  const std::vector<double> first = fft_magnitude(ts.values[0], cfg);
  const std::vector<double> second = fft_magnitude(ts.values[1], cfg);
  for (std::size_t k = 0; k < 32; ++k) {
    CHECK(v[k] == first[k]);
    CHECK(v[32 + k] == second[k]);
  }
}

TEST_CASE("pca finds a rank-1 cloud") {
  Rng rng(31);
  const std::vector<double> dir{0.6, 0.0, -0.8, 0.0, 0.0};
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 40; ++i) {
    const double t = rng.uniform(-2.0, 2.0);
    EmbeddingVector v(5);
    for (std::size_t d = 0; d < 5; ++d) v[d] = 3.0 + t * dir[d];
    pts.push_back(v);
  }
  const PcaProjection proj = pca_project(pts, 2);
  CHECK_FALSE(proj.degenerate);
  CHECK(proj.explained_variance[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(proj.explained_variance[1] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("pca of a planar cloud preserves distances") {
  // orthonormal plane basis inside a 600-dim space: exercises the gram path
  const std::size_t m = 600;
  std::vector<double> e1(m, 0.0), e2(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    e1[i] = (i % 2 == 0) ? 1.0 : 0.0;
    e2[i] = (i % 2 == 1) ? 1.0 : 0.0;
  }
  const double norm = std::sqrt(static_cast<double>(m) / 2.0);
  for (double& c : e1) c /= norm;
  for (double& c : e2) c /= norm;

  Rng rng(32);
  std::vector<std::vector<double>> plane;  // true 2-d coordinates
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 25; ++i) {
    const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
    plane.push_back({a, b});
    EmbeddingVector v(m);
    for (std::size_t d = 0; d < m; ++d) v[d] = a * e1[d] + b * e2[d];
    pts.push_back(v);
  }
  const PcaProjection proj = pca_project(pts, 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      CHECK(pair_dist(proj.coordinates[i], proj.coordinates[j]) ==
            Catch::Approx(pair_dist(plane[i], plane[j])).margin(1e-9));
  CHECK(proj.explained_variance[0] + proj.explained_variance[1] ==
        Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("isotropic cloud splits variance evenly") {
  Rng rng(33);
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back({gauss(rng), gauss(rng)});
  const PcaProjection proj = pca_project(pts, 2);
  CHECK(proj.explained_variance[0] == Catch::Approx(0.5).margin(0.05));
  CHECK(proj.explained_variance[1] == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("pca coordinates follow an input permutation") {
  Rng rng(34);
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 30; ++i)
    pts.push_back({gauss(rng), 0.3 * gauss(rng), 0.1 * gauss(rng)});
  std::vector<EmbeddingVector> reversed(pts.rbegin(), pts.rend());

  const PcaProjection a = pca_project(pts, 2);
  const PcaProjection b = pca_project(reversed, 2);
  const std::size_t p = pts.size();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(a.coordinates[i][c] == Catch::Approx(b.coordinates[p - 1 - i][c]).margin(1e-9));
}

TEST_CASE("identical inputs are flagged degenerate") {
  const std::vector<EmbeddingVector> pts(4, EmbeddingVector{1.0, 2.0, 3.0});
  const PcaProjection proj = pca_project(pts, 2);
  CHECK(proj.degenerate);
  for (const auto& c : proj.coordinates) {
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
  }
}

TEST_CASE("pca input validation") {
  CHECK_THROWS_AS(pca_project({{1.0, 2.0}}, 1), DimensionMismatchError);
  CHECK_THROWS_AS(pca_project({{1.0, 2.0}, {1.0}}, 1), DimensionMismatchError);
  CHECK_THROWS_AS(pca_project({{1.0, 2.0}, {3.0, 4.0}}, 3), DimensionMismatchError);
}
