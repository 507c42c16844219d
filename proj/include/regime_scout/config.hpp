#pragma once

#include <array>
#include <filesystem>
#include <initializer_list>
#include <string>

#include "json.hpp"

#include "regime_scout/errors.hpp"
#include "regime_scout/explorer.hpp"
#include "regime_scout/table_io.hpp"

namespace regime_scout {

namespace detail {

using json = nlohmann::json;

// Strict schema: every object's keys must come from the allowed list.
inline void reject_unknown_keys(const json& j, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

inline double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long>();
}

inline double get_double(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? as_double(j.at(key), path + "." + key) : fallback;
}

inline long get_integer(const json& j, const std::string& path, const char* key, long fallback) {
  return j.contains(key) ? as_integer(j.at(key), path + "." + key) : fallback;
}

inline std::array<double, 2> as_bounds(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  return {as_double(j.at(0), path + "[0]"), as_double(j.at(1), path + "[1]")};
}

inline SystemSpec parse_system(const json& j) {
  const std::string path = "system";
  require_object(j, path);
  reject_unknown_keys(j, path, {"kind", "coefficients", "ics", "free_axes", "t_f", "n_t"});
  if (!j.contains("kind")) throw ConfigError(path + ".kind", "missing");
  if (!j.at("kind").is_string()) throw ConfigError(path + ".kind", "expected a string");

  SystemSpec spec;
  spec.kind = system_kind_from_string(j.at("kind").get<std::string>(), path + ".kind");
  if (j.contains("coefficients")) {
    const json& c = require_object(j.at("coefficients"), path + ".coefficients");
    for (const auto& [name, value] : c.items())
      spec.coefficients[name] = as_double(value, path + ".coefficients." + name);
  }
  if (j.contains("ics")) {
    const json& c = require_object(j.at("ics"), path + ".ics");
    for (const auto& [name, value] : c.items())
      spec.initial_conditions[name] = as_double(value, path + ".ics." + name);
  }
  if (!j.contains("free_axes") || !j.at("free_axes").is_array())
    throw ConfigError(path + ".free_axes", "expected an array of axes");
  for (std::size_t i = 0; i < j.at("free_axes").size(); ++i) {
    const std::string axis_path = path + ".free_axes[" + std::to_string(i) + "]";
    const json& a = require_object(j.at("free_axes").at(i), axis_path);
    reject_unknown_keys(a, axis_path, {"name", "min", "max"});
    for (const char* key : {"name", "min", "max"})
      if (!a.contains(key)) throw ConfigError(axis_path + "." + key, "missing");
    if (!a.at("name").is_string()) throw ConfigError(axis_path + ".name", "expected a string");
    spec.free_axes.push_back({a.at("name").get<std::string>(),
                              as_double(a.at("min"), axis_path + ".min"),
                              as_double(a.at("max"), axis_path + ".max")});
  }
  if (!j.contains("t_f")) throw ConfigError(path + ".t_f", "missing");
  spec.t_f = as_double(j.at("t_f"), path + ".t_f");
  if (!j.contains("n_t")) throw ConfigError(path + ".n_t", "missing");
  spec.n_t = static_cast<int>(as_integer(j.at("n_t"), path + ".n_t"));
  return spec;
}

inline ExplorationConfig parse_exploration_config(const json& root) {
  require_object(root, "config");
  reject_unknown_keys(root, "", {"system", "embedding", "cluster", "gp", "stop", "sampling"});
  if (!root.contains("system")) throw ConfigError("system", "missing required section");

  ExplorationConfig cfg;
  cfg.system = parse_system(root.at("system"));

  if (root.contains("embedding")) {
    const json& j = require_object(root.at("embedding"), "embedding");
    reject_unknown_keys(j, "embedding", {"n_f", "transient_fraction"});
    cfg.embedding.n_f = static_cast<std::size_t>(
        get_integer(j, "embedding", "n_f", static_cast<long>(cfg.embedding.n_f)));
    cfg.embedding.transient_fraction =
        get_double(j, "embedding", "transient_fraction", cfg.embedding.transient_fraction);
  }
  if (root.contains("cluster")) {
    const json& j = require_object(root.at("cluster"), "cluster");
    reject_unknown_keys(j, "cluster", {"eps", "min_pts"});
    cfg.cluster.eps = get_double(j, "cluster", "eps", cfg.cluster.eps);
    cfg.cluster.min_pts =
        static_cast<int>(get_integer(j, "cluster", "min_pts", cfg.cluster.min_pts));
  }
  if (root.contains("gp")) {
    const json& j = require_object(root.at("gp"), "gp");
    reject_unknown_keys(j, "gp", {"sigma_n_bounds", "length_bounds", "sigma_l_bounds", "zeta_ei",
                                  "n_starts", "refit_every"});
    if (j.contains("sigma_n_bounds"))
      cfg.gp.sigma_n_bounds = as_bounds(j.at("sigma_n_bounds"), "gp.sigma_n_bounds");
    if (j.contains("length_bounds"))
      cfg.gp.length_bounds = as_bounds(j.at("length_bounds"), "gp.length_bounds");
    if (j.contains("sigma_l_bounds"))
      cfg.gp.sigma_l_bounds = as_bounds(j.at("sigma_l_bounds"), "gp.sigma_l_bounds");
    cfg.gp.zeta_ei = get_double(j, "gp", "zeta_ei", cfg.gp.zeta_ei);
    cfg.gp.n_starts = static_cast<int>(get_integer(j, "gp", "n_starts", cfg.gp.n_starts));
    cfg.gp.refit_every = static_cast<int>(get_integer(j, "gp", "refit_every", cfg.gp.refit_every));
  }
  if (root.contains("stop")) {
    const json& j = require_object(root.at("stop"), "stop");
    reject_unknown_keys(j, "stop", {"zeta_stop", "t_max"});
    cfg.stop.zeta_stop = get_double(j, "stop", "zeta_stop", cfg.stop.zeta_stop);
    if (j.contains("t_max")) cfg.stop.t_max = as_integer(j.at("t_max"), "stop.t_max");
  }
  if (!root.contains("sampling")) throw ConfigError("sampling", "missing required section");
  {
    const json& j = require_object(root.at("sampling"), "sampling");
    reject_unknown_keys(
        j, "sampling", {"budget", "initial_fraction", "n_candidates", "grid_resolution", "seed"});
    if (!j.contains("budget")) throw ConfigError("sampling.budget", "missing");
    cfg.sampling.budget = as_integer(j.at("budget"), "sampling.budget");
    cfg.sampling.initial_fraction =
        get_double(j, "sampling", "initial_fraction", cfg.sampling.initial_fraction);
    cfg.sampling.n_candidates =
        get_integer(j, "sampling", "n_candidates", cfg.sampling.n_candidates);
    cfg.sampling.grid_resolution =
        get_integer(j, "sampling", "grid_resolution", cfg.sampling.grid_resolution);
    if (j.contains("seed")) {
      const json& s = j.at("seed");
      if (!s.is_number_integer()) throw ConfigError("sampling.seed", "expected an integer");
      cfg.sampling.seed = s.get<std::uint64_t>();
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace detail

inline ExplorationConfig load_config_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return detail::parse_exploration_config(root);
}

}  // namespace regime_scout
