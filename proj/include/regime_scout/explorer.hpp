#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regime_scout/clustering.hpp"
#include "regime_scout/contour.hpp"
#include "regime_scout/dynamics.hpp"
#include "regime_scout/embedding.hpp"
#include "regime_scout/errors.hpp"
#include "regime_scout/gpr.hpp"
#include "regime_scout/parallel.hpp"
#include "regime_scout/random.hpp"

namespace regime_scout {

struct GpConfig {
  std::array<double, 2> sigma_n_bounds{1e-4, 0.5};
  std::array<double, 2> length_bounds{0.01, 2.0};
  std::optional<std::array<double, 2>> sigma_l_bounds;  // absent: 3*range(targets)+0.05
  double zeta_ei = 0.01;  // exploration offset inside the acquisition
  int n_starts = 8;
  int refit_every = 1;    // hyperparameter refit cadence (factorization refreshes every step)

  void validate(const std::string& prefix = "gp") const {
    HyperBox probe{sigma_n_bounds, length_bounds, sigma_l_bounds.value_or(std::array<double, 2>{0.05, 3.05})};
    probe.validate(prefix);
    if (!(std::isfinite(zeta_ei) && zeta_ei >= 0.0))
      throw ConfigError(prefix + ".zeta_ei", "must be finite and >= 0");
    if (n_starts < 1) throw ConfigError(prefix + ".n_starts", "must be >= 1");
    if (refit_every < 1) throw ConfigError(prefix + ".refit_every", "must be >= 1");
  }
};

struct StopConfig {
  double zeta_stop = 0.0;        // uncertainty threshold; 0 disables this stop
  std::optional<long> t_max;     // iteration cap

  void validate(const std::string& prefix = "stop") const {
    if (!(std::isfinite(zeta_stop) && zeta_stop >= 0.0))
      throw ConfigError(prefix + ".zeta_stop", "must be finite and >= 0");
    if (t_max && *t_max < 0) throw ConfigError(prefix + ".t_max", "must be >= 0");
    if (zeta_stop == 0.0 && !t_max)
      throw ConfigError(prefix, "need zeta_stop > 0 or t_max, otherwise the run never stops");
  }
};

struct SamplingConfig {
  long budget = 0;
  double initial_fraction = 0.2;
  long n_candidates = 2048;
  long grid_resolution = 101;
  std::uint64_t seed = 0;
};

struct ExplorationConfig {
  SystemSpec system;
  EmbeddingConfig embedding;
  ClusterParams cluster;
  GpConfig gp;
  StopConfig stop;
  SamplingConfig sampling;

  void validate() const {
    system.validate();
    if (system.free_axes.empty())
      throw ConfigError("system.free_axes", "need at least one free axis to explore");
    embedding.validate();
    cluster.validate();
    gp.validate();
    stop.validate();
    if (!(sampling.initial_fraction > 0.0 && sampling.initial_fraction < 1.0))
      throw ConfigError("sampling.initial_fraction", "must lie strictly between 0 and 1");
    if (sampling.budget < cluster.min_pts + 2)
      throw ConfigError("sampling.budget",
                        "must be at least cluster.min_pts + 2 = " + std::to_string(cluster.min_pts + 2));
    if (sampling.n_candidates < 1)
      throw ConfigError("sampling.n_candidates", "must be >= 1");
    if (sampling.grid_resolution < 2)
      throw ConfigError("sampling.grid_resolution", "must be >= 2");
    double nodes = 1.0;
    for (std::size_t i = 0; i < system.free_axes.size(); ++i)
      nodes *= static_cast<double>(sampling.grid_resolution);
    if (nodes > 4.0e6)
      throw ConfigError("sampling.grid_resolution", "monitor grid would exceed 4e6 nodes");
  }
};

enum class SampleState { labeled, noise, failed };

inline const char* to_string(SampleState s) {
  switch (s) {
    case SampleState::labeled: return "labeled";
    case SampleState::noise: return "NOISE";
    case SampleState::failed: return "FAILED";
  }
  return "?";
}

struct SampleRecord {
  ParameterVector theta;
  std::size_t iteration = 0;  // 0 = initial batch
  SampleState state = SampleState::noise;
  int label = kNoise;
  std::optional<double> ei;   // acquisition value at selection; absent for the initial batch
};

struct IterationRecord {
  std::size_t iteration = 0;
  ParameterVector theta;
  double ei = 0.0;
  SampleState state = SampleState::noise;
  int label = kNoise;
  double max_grid_std = 0.0;
  int n_regimes = 0;
  std::vector<MergeEvent> merges;
  std::optional<double> refit_nlml;  // present when hyperparameters were refit
};

// Dense evaluation lattice; row-major with axis 0 fastest. Doubles as the
// stopping monitor and the contour grid.
struct MonitorGrid {
  std::vector<std::size_t> shape;
  std::vector<ParameterVector> points;
};

inline MonitorGrid make_monitor_grid(const SystemSpec& system, long resolution) {
  const std::size_t n = system.free_axes.size();
  const std::size_t res = static_cast<std::size_t>(resolution);
  MonitorGrid grid;
  grid.shape.assign(n, res);
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= res;
  grid.points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ParameterVector p(n);
    std::size_t rem = idx;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t node = rem % res;
      rem /= res;
      const Axis& ax = system.free_axes[a];
      p[a] = ax.lo + (ax.hi - ax.lo) * static_cast<double>(node) / static_cast<double>(res - 1);
    }
    grid.points.push_back(std::move(p));
  }
  return grid;
}

// n0 uniform points in the box, component order = axis order. Same seed, same list.
inline std::vector<ParameterVector> initial_sample(const std::vector<Axis>& box, std::size_t n0,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ParameterVector> points(n0, ParameterVector(box.size()));
  for (auto& p : points)
    for (std::size_t a = 0; a < box.size(); ++a) p[a] = rng.uniform(box[a].lo, box[a].hi);
  return points;
}

struct Selection {
  std::size_t index = 0;
  double ei = 0.0;
  Posterior posterior;
};

// Acquisition argmax over the candidate pool. Candidates equal (componentwise)
// to an already-sampled point are skipped; ties go to the lowest index; if
// every candidate scores zero the one with the largest posterior std wins
// (pure exploration fallback).
inline Selection select_next(const GpModel& model, const std::vector<ParameterVector>& sampled,
                             const std::vector<ParameterVector>& candidates, double beta_max,
                             double zeta_ei) {
  const std::size_t m = candidates.size();
  std::vector<Posterior> post(m);
  std::vector<char> excluded(m, 0);
  parallel_for(m, [&](std::size_t i) {
    for (const auto& s : sampled)
      if (s == candidates[i]) {
        excluded[i] = 1;
        return;
      }
    post[i] = model.predict(candidates[i]);
  });

  bool any = false;
  Selection best;
  for (std::size_t i = 0; i < m; ++i) {
    if (excluded[i]) continue;
    const double ei = expected_improvement(post[i], beta_max, zeta_ei);
    if (!any || ei > best.ei) {
      best = {i, ei, post[i]};
      any = true;
    }
  }
  if (!any) throw EmptyPoolError("every candidate was already sampled");
  if (best.ei > 0.0) return best;

  for (std::size_t i = 0; i < m; ++i) {
    if (excluded[i]) continue;
    if (post[i].std > best.posterior.std) best = {i, 0.0, post[i]};
  }
  return best;
}

// round(mean), halves away from zero, clamped to the known regimes.
inline int classify(const GpModel& model, const ParameterVector& theta, int n_regimes) {
  const double r = std::round(model.predict(theta).mean);
  return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(n_regimes - 1)));
}

struct BoundarySet {
  double level = 0.0;
  std::vector<Polyline> polylines;
};

// Half-integer levels 1/2, 3/2, ..., n_regimes - 3/2 of the posterior mean
// field (one inter-regime boundary per consecutive label pair).
inline std::vector<BoundarySet> extract_boundaries(const GridField& field, int n_regimes) {
  std::vector<BoundarySet> out;
  for (int j = 0; j + 1 < n_regimes; ++j) {
    const double level = static_cast<double>(j) + 0.5;
    out.push_back({level, marching_squares(field, level)});
  }
  return out;
}

struct RunReport {
  std::string stop_reason;  // "uncertainty" | "t_max" | "budget"
  int n_regimes = 0;
  std::size_t iterations = 0;
  Hyperparameters hyper;
  std::vector<MergeEvent> merge_log;
  std::vector<SampleRecord> samples;
  std::vector<IterationRecord> iteration_log;
  MonitorGrid grid;
  std::vector<double> grid_mean;
  std::vector<double> grid_std;
  double max_grid_std = 0.0;
  std::vector<BoundarySet> boundaries;                  // 2-D runs only
  std::vector<EmbeddingVector> embeddings;              // insertion order
  std::vector<std::size_t> embedded_sample;             // sample index per embedding
  Labeling labeling;
  std::optional<GpModel> model;
};

// One exploration run: construction performs the initial phase (batch sample,
// cluster, fit, grid scan); step() adds one acquisition sample; stop_check()
// runs *before* each iteration so a satisfied threshold means zero iterations.
class Explorer {
 public:
  explicit Explorer(ExplorationConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    for (const Axis& ax : cfg_.system.free_axes) {
      lo_.push_back(ax.lo);
      hi_.push_back(ax.hi);
    }
    const auto budget = static_cast<std::size_t>(cfg_.sampling.budget);
    const std::size_t n0 = std::min<std::size_t>(
        budget, static_cast<std::size_t>(
                    std::ceil(cfg_.sampling.initial_fraction * static_cast<double>(budget))));
    for (auto& theta :
         initial_sample(cfg_.system.free_axes, n0, mix_seed(cfg_.sampling.seed, kStreamInitial)))
      ingest(std::move(theta), 0, std::nullopt);
    if (embeddings_.empty())
      throw DegenerateClusteringError("every initial sample blew up; shrink the search box");
    labeling_ = recluster(embeddings_, cfg_.cluster, std::nullopt, 0);
    sync_labels();
    if (labeling_.n_regimes == 0)
      throw DegenerateClusteringError(
          "the whole initial batch is noise; loosen cluster.eps or lower cluster.min_pts");
    refit_model(true);
    grid_ = make_monitor_grid(cfg_.system, cfg_.sampling.grid_resolution);
    refresh_grid();
  }

  // Stop reason if the run should end now, nullptr otherwise. Checked in
  // order: uncertainty, iteration cap, budget.
  const char* stop_check() const {
    if (cfg_.stop.zeta_stop > 0.0 && max_grid_std_ < cfg_.stop.zeta_stop) return "uncertainty";
    if (cfg_.stop.t_max && iterations_ >= static_cast<std::size_t>(*cfg_.stop.t_max))
      return "t_max";
    if (samples_.size() >= static_cast<std::size_t>(cfg_.sampling.budget)) return "budget";
    return nullptr;
  }

  void step() {
    const std::size_t t = iterations_ + 1;
    Rng rng(mix_seed(cfg_.sampling.seed, kStreamCandidates + t));
    std::vector<ParameterVector> pool(static_cast<std::size_t>(cfg_.sampling.n_candidates),
                                      ParameterVector(lo_.size()));
    for (auto& p : pool)
      for (std::size_t a = 0; a < lo_.size(); ++a) p[a] = rng.uniform(lo_[a], hi_[a]);

    std::vector<ParameterVector> sampled;
    sampled.reserve(samples_.size());
    for (const auto& rec : samples_) sampled.push_back(rec.theta);
    const Selection sel = select_next(*model_, sampled, pool, beta_max_, cfg_.gp.zeta_ei);

    const std::size_t sample_idx = samples_.size();
    ingest(pool[sel.index], t, sel.ei);

    IterationRecord log;
    log.iteration = t;
    log.theta = pool[sel.index];
    log.ei = sel.ei;
    const std::size_t known_merges = labeling_.merge_log.size();
    if (samples_[sample_idx].state != SampleState::failed) {
      const int regimes_before = labeling_.n_regimes;
      labeling_ = recluster(embeddings_, cfg_.cluster, labeling_, t);
      sync_labels();
      const bool refit_hyper = (t % static_cast<std::size_t>(cfg_.gp.refit_every) == 0) ||
                               labeling_.n_regimes != regimes_before;
      log.refit_nlml = refit_model(refit_hyper);
      refresh_grid();
    }
    log.state = samples_[sample_idx].state;
    log.label = samples_[sample_idx].label;
    log.max_grid_std = max_grid_std_;
    log.n_regimes = labeling_.n_regimes;
    log.merges.assign(labeling_.merge_log.begin() + static_cast<std::ptrdiff_t>(known_merges),
                      labeling_.merge_log.end());
    iteration_log_.push_back(std::move(log));
    ++iterations_;
  }

  RunReport finish(std::string stop_reason) const {
    RunReport r;
    r.stop_reason = std::move(stop_reason);
    r.n_regimes = labeling_.n_regimes;
    r.iterations = iterations_;
    r.hyper = hyper_;
    r.merge_log = labeling_.merge_log;
    r.samples = samples_;
    r.iteration_log = iteration_log_;
    r.grid = grid_;
    r.grid_mean = grid_mean_;
    r.grid_std = grid_std_;
    r.max_grid_std = max_grid_std_;
    r.embeddings = embeddings_;
    r.embedded_sample = embedded_sample_;
    r.labeling = labeling_;
    r.model = model_;
    if (lo_.size() == 2) {
      const std::size_t res = grid_.shape.front();
      GridField field{res, res, lo_[0], hi_[0], lo_[1], hi_[1], grid_mean_};
      r.boundaries = extract_boundaries(field, labeling_.n_regimes);
    }
    return r;
  }

  const std::vector<SampleRecord>& samples() const { return samples_; }
  const Labeling& labeling() const { return labeling_; }
  const GpModel& model() const { return *model_; }
  double max_grid_std() const { return max_grid_std_; }
  std::size_t iterations() const { return iterations_; }
  double beta_max() const { return beta_max_; }

 private:
  static constexpr std::uint64_t kStreamInitial = 0x1000;
  static constexpr std::uint64_t kStreamCandidates = 0x2000;
  static constexpr std::uint64_t kStreamFit = 0x3000;

  void ingest(ParameterVector theta, std::size_t iteration, std::optional<double> ei) {
    SampleRecord rec{std::move(theta), iteration, SampleState::noise, kNoise, ei};
    try {
      const TimeSeries ts = simulate(cfg_.system, rec.theta);
      embeddings_.push_back(embed(ts, cfg_.embedding));
      embedded_sample_.push_back(samples_.size());
    } catch (const NonFiniteError&) {
      rec.state = SampleState::failed;
    }
    samples_.push_back(std::move(rec));
  }

  void sync_labels() {
    for (std::size_t e = 0; e < embeddings_.size(); ++e) {
      SampleRecord& rec = samples_[embedded_sample_[e]];
      rec.label = labeling_.labels[e];
      rec.state = rec.label >= 0 ? SampleState::labeled : SampleState::noise;
    }
  }

  // Rebuilds the model on all labeled entries; optionally refits
  // hyperparameters first. Returns the refit nlml when one happened.
  std::optional<double> refit_model(bool refit_hyper) {
    std::vector<ParameterVector> inputs;
    std::vector<double> targets;
    for (const auto& rec : samples_)
      if (rec.state == SampleState::labeled) {
        inputs.push_back(rec.theta);
        targets.push_back(static_cast<double>(rec.label));
      }
    beta_max_ = 0.0;
    for (double tgt : targets) beta_max_ = std::max(beta_max_, tgt);

    std::optional<double> fit_score;
    if (refit_hyper && inputs.size() >= 2) {
      HyperBox box{cfg_.gp.sigma_n_bounds, cfg_.gp.length_bounds,
                   cfg_.gp.sigma_l_bounds.value_or(default_hyper_box(targets).sigma_l)};
      std::vector<std::vector<double>> unit;
      unit.reserve(inputs.size());
      for (const auto& p : inputs) unit.push_back(normalize_to_unit(lo_, hi_, p));
      hyper_ = fit_hyperparameters(unit, targets, box, cfg_.gp.n_starts,
                                   mix_seed(cfg_.sampling.seed, kStreamFit));
      fit_score = nlml(hyper_, unit, targets);
    }
    model_.emplace(lo_, hi_, inputs, targets, hyper_);
    return fit_score;
  }

  void refresh_grid() {
    grid_mean_.resize(grid_.points.size());
    grid_std_.resize(grid_.points.size());
    parallel_for(grid_.points.size(), [&](std::size_t i) {
      const Posterior p = model_->predict(grid_.points[i]);
      grid_mean_[i] = p.mean;
      grid_std_[i] = p.std;
    });
    max_grid_std_ = 0.0;
    for (double s : grid_std_) max_grid_std_ = std::max(max_grid_std_, s);
  }

  ExplorationConfig cfg_;
  std::vector<double> lo_, hi_;
  std::vector<SampleRecord> samples_;
  std::vector<EmbeddingVector> embeddings_;
  std::vector<std::size_t> embedded_sample_;
  Labeling labeling_;
  Hyperparameters hyper_;  // defaults hold until the first refit
  std::optional<GpModel> model_;
  double beta_max_ = 0.0;
  MonitorGrid grid_;
  std::vector<double> grid_mean_, grid_std_;
  double max_grid_std_ = 0.0;
  std::size_t iterations_ = 0;
  std::vector<IterationRecord> iteration_log_;
};

inline RunReport run_exploration(const ExplorationConfig& cfg) {
  Explorer explorer(cfg);
  const char* reason = nullptr;
  while (!(reason = explorer.stop_check())) explorer.step();
  return explorer.finish(reason);
}

}  // namespace regime_scout
