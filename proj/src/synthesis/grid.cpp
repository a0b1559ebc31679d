// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "sgnet/synthesis.hpp"

namespace sgnet {

Surface find_surface(const Scene& scene, const std::string& name) {
  const Bounds& b = scene.bounds();
  Surface s;
  s.name = name;
  if (name == kFloorSurface) {
    s.x = b.x;
    s.y = b.y;
    s.top = scene.floor().top();
    return s;
  }
  const auto idx = scene.find(name);
  if (!idx) throw UnknownSurface("unknown surface '" + name + "'");
  const SceneObject& o = scene.objects()[*idx];
  s.x = {std::max(o.min(0), b.x[0]), std::min(o.max(0), b.x[1])};
  s.y = {std::max(o.min(1), b.y[0]), std::min(o.max(1), b.y[1])};
  s.top = o.top();
  return s;
}

double default_resolution(const std::string& surface) { return surface == kFloorSurface ? 4.0 : 10.0; }

PlacementGrid eval_grid(const Scene& scene, const Model& model, const std::string& surface, double resolution,
                        int threads) {
  if (!(resolution > 0) || !std::isfinite(resolution)) throw std::invalid_argument("resolution must be positive");
  const Surface s = find_surface(scene, surface);
  const double wx = s.x[1] - s.x[0];
  const double wy = s.y[1] - s.y[0];
  // The small slack keeps 1.0 m * 2 / m from rounding down to one cell.
  const int nx = wx > 0 ? static_cast<int>(std::floor(wx * resolution + 1e-9)) : 0;
  const int ny = wy > 0 ? static_cast<int>(std::floor(wy * resolution + 1e-9)) : 0;
  if (nx < 1 || ny < 1) throw EmptyFootprint("surface '" + surface + "' has no cell at this resolution");

  PlacementGrid grid;
  grid.surface = surface;
  grid.resolution = resolution;
  grid.columns = nx;
  grid.rows = ny;
  grid.cells.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  const double step = 1.0 / resolution;
  const double x0 = s.x[0] + 0.5 * (wx - nx * step) + 0.5 * step;
  const double y0 = s.y[0] + 0.5 * (wy - ny * step) + 0.5 * step;
  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nx; ++c) {
      grid.cells[static_cast<std::size_t>(r * nx + c)].p = {x0 + c * step, y0 + r * step, s.top + kCellLift};
    }
  }

  const SceneGraph base = build_graph(scene);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.cells.size(); i = next++) {
      grid.cells[i].result = predict(model, insert_query_node(base, grid.cells[i].p));
    }
  };
  const auto n = std::min<std::size_t>(grid.cells.size(), static_cast<std::size_t>(std::max(1, threads)));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return grid;
}

nlohmann::json PlacementGrid::to_json() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const GridCell& c : cells) {
    cells_json.push_back({{"p", c.p}, {"probs", c.result.probs}});
  }
  return {{"surface", surface}, {"resolution", resolution}, {"cells", std::move(cells_json)}};
}

}  // namespace sgnet
