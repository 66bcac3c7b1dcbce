#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "latdist/rotation.hpp"

namespace latdist {

enum class Metric { hausdorff, scale };

inline const char* metric_label(Metric m) {
  return m == Metric::hausdorff ? "dH" : "dS";
}

// Symmetric pairwise distance matrix over a named lattice dataset.
struct DistanceMatrix {
  Metric metric = Metric::hausdorff;
  int grid_n = 0;
  std::vector<std::string> ids;
  std::vector<double> values; // row-major N*N, zero diagonal

  std::size_t size() const { return ids.size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * size() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return values[i * size() + j];
  }
};

struct MatrixBuildStats {
  std::size_t cells_computed = 0;
  std::size_t pairs_computed = 0;
};

struct MatrixOptions {
  unsigned threads = 1; // 0 selects hardware concurrency
  bool refine = false;
  int extent = kDefaultNeighborExtent;
  // called after each finished pair with (done, total); used for progress
  std::function<void(std::size_t, std::size_t)> progress;
};

// Computes all N(N-1)/2 pairwise distances. Every Voronoi cell is computed
// exactly once and shared read-only by the workers; results land in slots
// keyed by pair index, so output is identical for any thread count.
inline DistanceMatrix
compute_distance_matrix(const std::vector<std::string>& ids,
                        const std::vector<LatticeBasis>& bases, Metric metric,
                        const RotationGrid& grid,
                        const MatrixOptions& opts = {},
                        MatrixBuildStats* stats = nullptr) {
  if (ids.size() != bases.size())
    throw error("compute_distance_matrix: ids/bases size mismatch");
  const std::size_t n = bases.size();

  std::vector<ConvexPolyhedron> cells;
  cells.reserve(n);
  for (const LatticeBasis& b : bases)
    cells.push_back(compute_voronoi_cell(b, opts.extent));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<double> pair_values(pairs.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairs.size()) return;
      const auto [i, j] = pairs[k];
      const LatticeDistanceResult r =
          metric == Metric::hausdorff
              ? hausdorff_from_cells(cells[i], cells[j], grid, opts.refine)
              : scale_from_cells(cells[i], cells[j], grid, opts.refine);
      pair_values[k] = r.value;
      const std::size_t d = done.fetch_add(1) + 1;
      if (opts.progress) {
        std::scoped_lock lock(progress_mutex);
        opts.progress(d, pairs.size());
      }
    }
  };

  unsigned thread_count = opts.threads ? opts.threads
                                       : std::thread::hardware_concurrency();
  if (thread_count < 1) thread_count = 1;
  thread_count = static_cast<unsigned>(
      std::min<std::size_t>(thread_count, std::max<std::size_t>(pairs.size(), 1)));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  DistanceMatrix m;
  m.metric = metric;
  m.grid_n = grid.n;
  m.ids = ids;
  m.values.assign(n * n, 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    m.at(i, j) = pair_values[k];
    m.at(j, i) = pair_values[k];
  }
  if (stats) {
    stats->cells_computed = n;
    stats->pairs_computed = pairs.size();
  }
  return m;
}

} // namespace latdist
