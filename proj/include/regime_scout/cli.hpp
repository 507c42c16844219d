#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "regime_scout/config.hpp"
#include "regime_scout/explorer.hpp"
#include "regime_scout/oracles.hpp"
#include "regime_scout/parallel.hpp"
#include "regime_scout/svg.hpp"
#include "regime_scout/table_io.hpp"

namespace regime_scout {

// ---------------------------------------------------------------------------
// Run-directory artifacts. Formatting lives in standalone builders so the
// round-trip guarantees (17-digit CSV, contour replay) are testable without
// touching the filesystem.

inline std::string format_samples_csv(const SystemSpec& system,
                                      const std::vector<SampleRecord>& samples) {
  std::string out = "iteration";
  for (const Axis& ax : system.free_axes) out += "," + ax.name;
  out += ",label,ei\n";
  for (const SampleRecord& rec : samples) {
    out += std::to_string(rec.iteration);
    for (double v : rec.theta) out += "," + format_g17(v);
    out += ",";
    out += rec.state == SampleState::labeled ? std::to_string(rec.label) : to_string(rec.state);
    out += ",";                               // ei column; empty for the initial batch
    if (rec.ei) out += format_g17(*rec.ei);
    out += "\n";
  }
  return out;
}

inline std::string format_grid_csv(const SystemSpec& system, const MonitorGrid& grid,
                                   const std::vector<double>& mean,
                                   const std::vector<double>& std_dev) {
  std::string out;
  for (const Axis& ax : system.free_axes) out += ax.name + ",";
  out += "mean,std\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    for (double v : grid.points[i]) out += format_g17(v) + ",";
    out += format_g17(mean[i]) + "," + format_g17(std_dev[i]) + "\n";
  }
  return out;
}

inline std::string format_contours_csv(const SystemSpec& system,
                                       const std::vector<BoundarySet>& boundaries) {
  std::string out = "level,polyline";
  for (const Axis& ax : system.free_axes) out += "," + ax.name;
  out += "\n";
  std::size_t id = 0;  // polyline ids are global across levels
  for (const BoundarySet& set : boundaries) {
    for (const Polyline& line : set.polylines) {
      for (const ContourPoint& p : line)
        out += format_g17(set.level) + "," + std::to_string(id) + "," + format_g17(p[0]) + "," +
               format_g17(p[1]) + "\n";
      ++id;
    }
  }
  return out;
}

inline std::string format_pca_csv(const RunReport& report) {
  std::string out = "pc1,pc2,label\n";
  if (report.embeddings.size() < 2) return out;  // projection undefined; header only
  const PcaProjection proj = pca_project(report.embeddings, 2);
  for (std::size_t e = 0; e < report.embeddings.size(); ++e) {
    const SampleRecord& rec = report.samples[report.embedded_sample[e]];
    out += format_g17(proj.coordinates[e][0]) + "," + format_g17(proj.coordinates[e][1]) + ",";
    out += rec.state == SampleState::labeled ? std::to_string(rec.label) : to_string(rec.state);
    out += "\n";
  }
  return out;
}

namespace detail {

inline json merge_to_json(const MergeEvent& m) {
  return {{"absorbed", m.absorbed}, {"iteration", m.iteration}, {"surviving", m.surviving}};
}

}  // namespace detail

// One JSON object per iteration, keys alphabetical, one line each.
inline std::string format_run_log(const RunReport& report) {
  std::string out;
  for (const IterationRecord& it : report.iteration_log) {
    detail::json j;
    j["ei"] = it.ei;
    j["iteration"] = it.iteration;
    j["label"] = it.label;
    j["max_grid_std"] = it.max_grid_std;
    detail::json merges = detail::json::array();
    for (const MergeEvent& m : it.merges) merges.push_back(detail::merge_to_json(m));
    j["merges"] = std::move(merges);
    j["n_regimes"] = it.n_regimes;
    j["refit_nlml"] = it.refit_nlml ? detail::json(*it.refit_nlml) : detail::json();
    j["state"] = to_string(it.state);
    j["theta"] = it.theta;
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline std::string format_report_json(const RunReport& report) {
  detail::json j;
  j["stop_reason"] = report.stop_reason;
  j["n_regimes"] = report.n_regimes;
  j["iterations"] = report.iterations;
  j["hyper"] = {{"length", report.hyper.length},
                {"sigma_l", report.hyper.sigma_l},
                {"sigma_n", report.hyper.sigma_n}};
  detail::json merges = detail::json::array();
  for (const MergeEvent& m : report.merge_log) merges.push_back(detail::merge_to_json(m));
  j["merge_log"] = std::move(merges);
  j["max_grid_std"] = report.max_grid_std;
  return j.dump(2) + "\n";
}

inline void write_run_artifacts(const ExplorationConfig& cfg, const RunReport& report,
                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError(out_dir.string(), "cannot create directory: " + ec.message());
  write_text_file(out_dir / "samples.csv", format_samples_csv(cfg.system, report.samples));
  write_text_file(out_dir / "grid.csv",
                  format_grid_csv(cfg.system, report.grid, report.grid_mean, report.grid_std));
  write_text_file(out_dir / "contours.csv", format_contours_csv(cfg.system, report.boundaries));
  write_text_file(out_dir / "embedding_pca.csv", format_pca_csv(report));
  write_text_file(out_dir / "run_log.jsonl", format_run_log(report));
  write_text_file(out_dir / "report.json", format_report_json(report));
}

// ---------------------------------------------------------------------------
// Commands. Exit codes: 0 success, 2 usage/config, 3 runtime failure.

inline int cmd_explore(const std::filesystem::path& config_path,
                       const std::filesystem::path& out_dir, std::ostream& err) {
  try {
    const ExplorationConfig cfg = load_config_file(config_path);
    const RunReport report = run_exploration(cfg);
    write_run_artifacts(cfg, report, out_dir);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

inline int cmd_simulate(const std::filesystem::path& config_path, const std::string& theta_text,
                        const std::filesystem::path& out_file, std::ostream& err) {
  try {
    const ExplorationConfig cfg = load_config_file(config_path);
    ParameterVector theta;
    for (const std::string& field : split_csv_line(theta_text))
      theta.push_back(parse_double(field, "--theta"));
    const TimeSeries ts = simulate(cfg.system, theta);

    std::string out = "t";
    for (const std::string& name : ts.channels) out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < ts.length(); ++i) {
      out += format_g17(ts.dt * static_cast<double>(i));
      for (const auto& channel : ts.values) out += "," + format_g17(channel[i]);
      out += "\n";
    }
    write_text_file(out_file, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

inline int cmd_oracle(const std::filesystem::path& config_path, long grid,
                      const std::filesystem::path& out_file, std::ostream& err) {
  try {
    const ExplorationConfig cfg = load_config_file(config_path);
    if (cfg.system.free_axes.size() != 2)
      throw ConfigError("system.free_axes", "oracle grid needs exactly 2 free axes");
    if (grid < 2) throw ConfigError("--grid", "must be >= 2");

    const Axis& ax = cfg.system.free_axes[0];
    const Axis& ay = cfg.system.free_axes[1];
    const std::size_t r = static_cast<std::size_t>(grid);
    std::vector<ParameterVector> points;
    points.reserve(r * r);
    for (std::size_t iy = 0; iy < r; ++iy)
      for (std::size_t ix = 0; ix < r; ++ix)
        points.push_back(
            {ax.lo + (ax.hi - ax.lo) * static_cast<double>(ix) / static_cast<double>(r - 1),
             ay.lo + (ay.hi - ay.lo) * static_cast<double>(iy) / static_cast<double>(r - 1)});

    std::vector<int> labels(points.size());
    parallel_for(points.size(),
                 [&](std::size_t i) { labels[i] = oracle_label(cfg.system, points[i]); });

    std::string out = ax.name + "," + ay.name + ",oracle_label\n";
    for (std::size_t i = 0; i < points.size(); ++i)
      out += format_g17(points[i][0]) + "," + format_g17(points[i][1]) + "," +
             std::to_string(labels[i]) + "\n";
    write_text_file(out_file, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

namespace detail {

inline int parse_label_field(const std::string& text) {
  if (text == "NOISE") return -1;
  if (text == "FAILED") return -2;
  return static_cast<int>(std::lround(parse_double(text, "label")));
}

// Data-to-screen mapping for a fixed 640x480 canvas with a 40px margin.
struct PlotFrame {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  static constexpr double kW = 640.0, kH = 480.0, kMargin = 40.0;

  double px(double x) const { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kW - 2 * kMargin); }
  double py(double y) const {
    return kH - kMargin - (y - y_lo) / (y_hi - y_lo) * (kH - 2 * kMargin);
  }
};

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline void draw_chrome(SvgBuilder& svg, const PlotFrame& f, const std::string& title,
                        const std::string& x_name, const std::string& y_name) {
  const double m = PlotFrame::kMargin, w = PlotFrame::kW, h = PlotFrame::kH;
  svg.line(m, m, m, h - m, "#333333");
  svg.line(m, h - m, w - m, h - m, "#333333");
  svg.line(w - m, m, w - m, h - m, "#333333");
  svg.line(m, m, w - m, m, "#333333");
  svg.text(m, m - 10, title, 13.0);
  svg.text(w / 2 - 20, h - 8, x_name, 12.0);
  svg.text(4, m + 10, y_name, 12.0);
  svg.text(m, h - m + 14, tick(f.x_lo), 10.0, "#555555");
  svg.text(w - m - 30, h - m + 14, tick(f.x_hi), 10.0, "#555555");
  svg.text(m - 36, h - m, tick(f.y_lo), 10.0, "#555555");
  svg.text(m - 36, m + 4, tick(f.y_hi), 10.0, "#555555");
}

struct ParsedGrid {
  std::size_t nx = 0, ny = 0;
  std::vector<double> x, y, mean, std_dev;  // row-major, x fastest
  std::string x_name, y_name;
};

inline ParsedGrid parse_grid_csv(const CsvTable& table) {
  if (table.header.size() != 4)
    throw ConfigError("grid.csv", "plotting needs a 2-D run (four columns)");
  ParsedGrid g;
  g.x_name = table.header[0];
  g.y_name = table.header[1];
  for (const auto& row : table.rows) {
    g.x.push_back(parse_double(row.at(0), "grid.csv"));
    g.y.push_back(parse_double(row.at(1), "grid.csv"));
    g.mean.push_back(parse_double(row.at(2), "grid.csv"));
    g.std_dev.push_back(parse_double(row.at(3), "grid.csv"));
  }
  if (g.x.empty()) throw ConfigError("grid.csv", "no grid rows");
  g.nx = 1;
  while (g.nx < table.rows.size() && table.rows[g.nx][1] == table.rows[0][1]) ++g.nx;
  g.ny = g.x.size() / g.nx;
  if (g.nx < 2 || g.ny < 2 || g.nx * g.ny != g.x.size())
    throw ConfigError("grid.csv", "rows do not form a full 2-D lattice");
  return g;
}

inline void draw_heat_map(SvgBuilder& svg, const PlotFrame& f, const ParsedGrid& g,
                          const std::vector<double>& values) {
  double v_lo = values.front(), v_hi = values.front();
  for (double v : values) {
    v_lo = std::min(v_lo, v);
    v_hi = std::max(v_hi, v);
  }
  const double cw = (PlotFrame::kW - 2 * PlotFrame::kMargin) / static_cast<double>(g.nx - 1);
  const double ch = (PlotFrame::kH - 2 * PlotFrame::kMargin) / static_cast<double>(g.ny - 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = v_hi > v_lo ? (values[i] - v_lo) / (v_hi - v_lo) : 0.0;
    svg.rect(f.px(g.x[i]) - cw / 2, f.py(g.y[i]) - ch / 2, cw, ch, heat_color(t));
  }
  svg.text(PlotFrame::kW - 2 * PlotFrame::kMargin - 120, PlotFrame::kMargin - 10,
           "[" + tick(v_lo) + ", " + tick(v_hi) + "]", 11.0, "#555555");
}

inline void draw_contours(SvgBuilder& svg, const PlotFrame& f, const CsvTable& contours) {
  std::vector<std::array<double, 2>> current;
  std::string current_id;
  auto flush = [&] {
    if (current.size() >= 2) svg.polyline(current, "#222222");
    current.clear();
  };
  for (const auto& row : contours.rows) {
    if (row.at(1) != current_id) {
      flush();
      current_id = row[1];
    }
    current.push_back(
        {f.px(parse_double(row.at(2), "contours.csv")), f.py(parse_double(row.at(3), "contours.csv"))});
  }
  flush();
}

}  // namespace detail

inline int cmd_plot(const std::filesystem::path& run_dir, const std::string& fig,
                    const std::filesystem::path& out_file, std::ostream& err) {
  using detail::PlotFrame;
  try {
    SvgBuilder svg(PlotFrame::kW, PlotFrame::kH);
    svg.rect(0, 0, PlotFrame::kW, PlotFrame::kH, "#ffffff");

    if (fig == "pca") {
      const CsvTable table = read_csv(run_dir / "embedding_pca.csv");
      if (table.rows.empty()) throw ConfigError("embedding_pca.csv", "no embedded samples");
      PlotFrame f;
      f.x_lo = f.y_lo = std::numeric_limits<double>::infinity();
      f.x_hi = f.y_hi = -f.x_lo;
      for (const auto& row : table.rows) {
        const double x = parse_double(row.at(0), "embedding_pca.csv");
        const double y = parse_double(row.at(1), "embedding_pca.csv");
        f.x_lo = std::min(f.x_lo, x);
        f.x_hi = std::max(f.x_hi, x);
        f.y_lo = std::min(f.y_lo, y);
        f.y_hi = std::max(f.y_hi, y);
      }
      auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        lo -= span > 0 ? 0.05 * span : 0.5;
        hi += span > 0 ? 0.05 * span : 0.5;
      };
      pad(f.x_lo, f.x_hi);
      pad(f.y_lo, f.y_hi);
      for (const auto& row : table.rows)
        svg.circle(f.px(parse_double(row.at(0), "embedding_pca.csv")),
                   f.py(parse_double(row.at(1), "embedding_pca.csv")), 3.0,
                   label_color(detail::parse_label_field(row.at(2))));
      detail::draw_chrome(svg, f, "embedding (pca)", "pc1", "pc2");
    } else if (fig == "regimes" || fig == "uncertainty" || fig == "surface") {
      const detail::ParsedGrid grid = detail::parse_grid_csv(read_csv(run_dir / "grid.csv"));
      PlotFrame f{grid.x.front(), grid.x.back(), grid.y.front(), grid.y.back()};
      if (fig == "uncertainty") {
        detail::draw_heat_map(svg, f, grid, grid.std_dev);
      } else if (fig == "surface") {
        detail::draw_heat_map(svg, f, grid, grid.mean);
        detail::draw_contours(svg, f, read_csv(run_dir / "contours.csv"));
      } else {
        detail::draw_contours(svg, f, read_csv(run_dir / "contours.csv"));
        const CsvTable samples = read_csv(run_dir / "samples.csv");
        if (samples.header.size() != 5)
          throw ConfigError("samples.csv", "plotting needs a 2-D run (five columns)");
        for (const auto& row : samples.rows)
          svg.circle(f.px(parse_double(row.at(1), "samples.csv")),
                     f.py(parse_double(row.at(2), "samples.csv")), 3.0,
                     label_color(detail::parse_label_field(row.at(3))));
      }
      detail::draw_chrome(svg, f, fig, grid.x_name, grid.y_name);
    } else {
      throw ConfigError("--fig", "expected one of regimes, uncertainty, surface, pca");
    }

    write_text_file(out_file, svg.finish());
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace regime_scout
