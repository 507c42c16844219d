#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "regime_scout/errors.hpp"

namespace regime_scout {

// Uniform 2-D scalar field; node (ix, iy) lives at values[iy * nx + ix].
struct GridField {
  std::size_t nx = 0, ny = 0;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  std::vector<double> values;

  double x_at(std::size_t ix) const {
    return x_lo + (x_hi - x_lo) * static_cast<double>(ix) / static_cast<double>(nx - 1);
  }
  double y_at(std::size_t iy) const {
    return y_lo + (y_hi - y_lo) * static_cast<double>(iy) / static_cast<double>(ny - 1);
  }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

using ContourPoint = std::array<double, 2>;
using Polyline = std::vector<ContourPoint>;

namespace detail {

// Crossing vertices are keyed by the global id of the grid edge they sit on, so
// segment chaining is exact (no float comparisons) and deterministic.
struct ContourGraph {
  std::map<std::size_t, ContourPoint> vertex;                    // edge id -> position
  std::vector<std::array<std::size_t, 2>> segments;              // pairs of edge ids
  std::map<std::size_t, std::vector<std::size_t>> incident;      // edge id -> segment indices
};

}  // namespace detail

// Marching squares at one level. "Inside" means value > level; crossings are
// placed by linear interpolation; ambiguous (saddle) cells are split according
// to the cell-center mean. Output polylines are deterministic: open paths
// first (by smallest endpoint edge id), then closed loops (repeating their
// first vertex at the end).
inline std::vector<Polyline> marching_squares(const GridField& field, double level) {
  if (field.nx < 2 || field.ny < 2 || field.values.size() != field.nx * field.ny)
    throw DimensionMismatchError("contour grid must be at least 2x2 with matching values");

  const std::size_t nx = field.nx, ny = field.ny;
  const std::size_t h_count = (nx - 1) * ny;
  auto h_edge = [&](std::size_t i, std::size_t j) { return j * (nx - 1) + i; };
  auto v_edge = [&](std::size_t i, std::size_t j) { return h_count + j * nx + i; };

  detail::ContourGraph graph;
  auto cross_h = [&](std::size_t i, std::size_t j) {
    const std::size_t id = h_edge(i, j);
    if (!graph.vertex.count(id)) {
      const double va = field.at(i, j), vb = field.at(i + 1, j);
      const double t = (level - va) / (vb - va);
      graph.vertex[id] = {field.x_at(i) + t * (field.x_at(i + 1) - field.x_at(i)), field.y_at(j)};
    }
    return id;
  };
  auto cross_v = [&](std::size_t i, std::size_t j) {
    const std::size_t id = v_edge(i, j);
    if (!graph.vertex.count(id)) {
      const double va = field.at(i, j), vb = field.at(i, j + 1);
      const double t = (level - va) / (vb - va);
      graph.vertex[id] = {field.x_at(i), field.y_at(j) + t * (field.y_at(j + 1) - field.y_at(j))};
    }
    return id;
  };

  for (std::size_t cy = 0; cy + 1 < ny; ++cy) {
    for (std::size_t cx = 0; cx + 1 < nx; ++cx) {
      const double v00 = field.at(cx, cy), v10 = field.at(cx + 1, cy);
      const double v01 = field.at(cx, cy + 1), v11 = field.at(cx + 1, cy + 1);
      const int mask = (v00 > level ? 1 : 0) | (v10 > level ? 2 : 0) | (v11 > level ? 4 : 0) |
                       (v01 > level ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      // cell edges: B = bottom, T = top, L = left, R = right
      auto B = [&] { return cross_h(cx, cy); };
      auto T = [&] { return cross_h(cx, cy + 1); };
      auto L = [&] { return cross_v(cx, cy); };
      auto R = [&] { return cross_v(cx + 1, cy); };
      auto seg = [&](std::size_t a, std::size_t b) {
        graph.incident[a].push_back(graph.segments.size());
        graph.incident[b].push_back(graph.segments.size());
        graph.segments.push_back({a, b});
      };

      switch (mask) {
        case 1: seg(L(), B()); break;
        case 2: seg(B(), R()); break;
        case 3: seg(L(), R()); break;
        case 4: seg(T(), R()); break;
        case 6: seg(B(), T()); break;
        case 7: seg(L(), T()); break;
        case 8: seg(L(), T()); break;
        case 9: seg(B(), T()); break;
        case 11: seg(T(), R()); break;
        case 12: seg(L(), R()); break;
        case 13: seg(B(), R()); break;
        case 14: seg(L(), B()); break;
        case 5:  // inside corners bl+tr
          if (0.25 * (v00 + v10 + v01 + v11) > level) {
            seg(B(), R());
            seg(L(), T());
          } else {
            seg(L(), B());
            seg(T(), R());
          }
          break;
        case 10:  // inside corners br+tl
          if (0.25 * (v00 + v10 + v01 + v11) > level) {
            seg(L(), B());
            seg(T(), R());
          } else {
            seg(B(), R());
            seg(L(), T());
          }
          break;
        default: break;
      }
    }
  }

  // Walk the segment graph: every crossing edge touches at most two segments,
  // so components are simple paths or loops.
  std::vector<bool> used(graph.segments.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::size_t start_edge) {
    Polyline line{graph.vertex.at(start_edge)};
    std::size_t edge = start_edge;
    for (;;) {
      std::size_t next_seg = graph.segments.size();
      for (std::size_t s : graph.incident.at(edge))
        if (!used[s]) {
          next_seg = s;
          break;
        }
      if (next_seg == graph.segments.size()) break;
      used[next_seg] = true;
      const auto& s = graph.segments[next_seg];
      edge = (s[0] == edge) ? s[1] : s[0];
      line.push_back(graph.vertex.at(edge));
    }
    return line;
  };

  for (const auto& [edge, segs] : graph.incident)
    if (segs.size() == 1 && !used[segs.front()]) out.push_back(walk(edge));
  for (const auto& [edge, segs] : graph.incident)
    for (std::size_t s : segs)
      if (!used[s]) out.push_back(walk(edge));
  return out;
}

}  // namespace regime_scout
