#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "latdist/lattice.hpp"

namespace latdist {

// Half-space {p : p.normal <= offset} bisecting the segment from the origin
// to `generator`; offset = |generator|/2, normal = generator/|generator|.
struct HalfSpace {
  Vec3 normal;
  double offset = 0;
  Vec3 generator;
};

// Convex polyhedron with the origin strictly interior. Faces are vertex-index
// cycles, counterclockwise seen from outside; face_planes[i] is the supporting
// plane of faces[i] with outward unit normal.
struct ConvexPolyhedron {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
  std::vector<HalfSpace> face_planes;

  double circumradius() const {
    double r = 0;
    for (const Vec3& v : vertices) r = std::max(r, v.norm());
    return r;
  }

  std::size_t edge_count() const {
    std::set<std::pair<int, int>> edges;
    for (const auto& f : faces)
      for (std::size_t k = 0; k < f.size(); ++k) {
        int a = f[k], b = f[(k + 1) % f.size()];
        edges.insert(std::minmax(a, b));
      }
    return edges.size();
  }
};

namespace instrumentation {
// Total Voronoi cells constructed; lets callers assert one-cell-per-lattice.
inline std::atomic<std::uint64_t> voronoi_cells_computed{0};
} // namespace instrumentation

// Axis-aligned cube of the given half-width centered on the origin.
inline ConvexPolyhedron make_box(double half_width) {
  const double h = half_width;
  ConvexPolyhedron p;
  p.vertices = {{-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
                {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
  p.faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
             {2, 3, 7, 6}, {0, 4, 7, 3}, {1, 2, 6, 5}};
  const Vec3 axes[6] = {{0, 0, -1}, {0, 0, 1},  {0, -1, 0},
                        {0, 1, 0},  {-1, 0, 0}, {1, 0, 0}};
  for (const Vec3& n : axes) p.face_planes.push_back({n, h, 2 * h * n});
  return p;
}

namespace detail {

inline void prune_unused_vertices(ConvexPolyhedron& p) {
  std::vector<int> remap(p.vertices.size(), -1);
  std::vector<Vec3> kept;
  for (auto& f : p.faces)
    for (int& idx : f) {
      if (remap[idx] < 0) {
        remap[idx] = static_cast<int>(kept.size());
        kept.push_back(p.vertices[idx]);
      }
      idx = remap[idx];
    }
  p.vertices = std::move(kept);
}

inline void drop_consecutive_duplicates(std::vector<int>& cycle) {
  std::vector<int> out;
  for (int idx : cycle)
    if (out.empty() || out.back() != idx) out.push_back(idx);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  cycle = std::move(out);
}

// Orders the given vertex indices into a convex cycle, counterclockwise
// around +normal.
inline void sort_cycle_by_angle(std::vector<int>& cycle,
                                const std::vector<Vec3>& verts,
                                const Vec3& normal) {
  Vec3 ref = std::abs(normal.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  const Vec3 e1 = normal.cross(ref).normalized();
  const Vec3 e2 = normal.cross(e1);
  Vec3 centroid = Vec3::Zero();
  for (int idx : cycle) centroid += verts[idx];
  centroid /= static_cast<double>(cycle.size());
  std::sort(cycle.begin(), cycle.end(), [&](int a, int b) {
    const Vec3 da = verts[a] - centroid, db = verts[b] - centroid;
    return std::atan2(da.dot(e2), da.dot(e1)) <
           std::atan2(db.dot(e2), db.dot(e1));
  });
}

} // namespace detail

// Clips p by the half-space, keeping the origin side. Returns true if the
// plane removed anything. `tol` is the absolute on-plane band.
inline bool clip_by_half_space(ConvexPolyhedron& p, const HalfSpace& hs,
                               double tol) {
  const std::size_t n_old = p.vertices.size();
  std::vector<double> sd(n_old);
  double worst = -1;
  for (std::size_t i = 0; i < n_old; ++i) {
    sd[i] = hs.normal.dot(p.vertices[i]) - hs.offset;
    worst = std::max(worst, sd[i]);
  }
  if (worst <= tol) return false;

  std::map<std::pair<int, int>, int> cut_cache;
  auto cut_vertex = [&](int a, int b) {
    // A vertex sitting on the plane is its own intersection point.
    if (std::abs(sd[a]) <= tol) return a;
    if (std::abs(sd[b]) <= tol) return b;
    const auto key = std::minmax(a, b);
    if (auto it = cut_cache.find(key); it != cut_cache.end())
      return it->second;
    const double t = sd[a] / (sd[a] - sd[b]);
    p.vertices.push_back(p.vertices[a] + t * (p.vertices[b] - p.vertices[a]));
    sd.push_back(0.0);
    const int idx = static_cast<int>(p.vertices.size()) - 1;
    cut_cache.emplace(key, idx);
    return idx;
  };
  auto inside = [&](int i) { return sd[i] <= tol; };

  std::vector<std::vector<int>> new_faces;
  std::vector<HalfSpace> new_planes;
  std::vector<int> cap;
  for (std::size_t fi = 0; fi < p.faces.size(); ++fi) {
    const auto& poly = p.faces[fi];
    std::vector<int> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const int a = poly[k], b = poly[(k + 1) % poly.size()];
      if (inside(a)) {
        if (inside(b)) {
          out.push_back(b);
        } else {
          out.push_back(cut_vertex(a, b));
        }
      } else if (inside(b)) {
        out.push_back(cut_vertex(a, b));
        out.push_back(b);
      }
    }
    detail::drop_consecutive_duplicates(out);
    if (out.size() < 3) continue;
    new_faces.push_back(out);
    new_planes.push_back(p.face_planes[fi]);
    for (int idx : out)
      if (static_cast<std::size_t>(idx) >= n_old || std::abs(sd[idx]) <= tol)
        cap.push_back(idx);
  }

  std::sort(cap.begin(), cap.end());
  cap.erase(std::unique(cap.begin(), cap.end()), cap.end());
  if (cap.size() >= 3) {
    detail::sort_cycle_by_angle(cap, p.vertices, hs.normal);
    new_faces.push_back(cap);
    new_planes.push_back(hs);
  }
  p.faces = std::move(new_faces);
  p.face_planes = std::move(new_planes);
  detail::prune_unused_vertices(p);
  return true;
}

// Canonical cleanup after clipping: merge near-identical vertices, merge
// coplanar faces, drop collinear cycle points. Clipping alone cannot split a
// geometric face, but near-tolerance cuts can leave split or slivered faces;
// without this pass face counts would exceed the true combinatorics.
inline void canonicalize_polyhedron(ConvexPolyhedron& p, double tol) {
  // 1. weld vertices closer than tol
  const std::size_t n = p.vertices.size();
  std::vector<int> target(n);
  std::iota(target.begin(), target.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (target[i] != static_cast<int>(i)) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (target[j] == static_cast<int>(j) &&
          (p.vertices[i] - p.vertices[j]).norm() <= tol)
        target[j] = static_cast<int>(i);
  }
  for (auto& f : p.faces) {
    for (int& idx : f) idx = target[idx];
    detail::drop_consecutive_duplicates(f);
  }

  // 2. merge faces sharing a supporting plane
  std::vector<int> group(p.faces.size());
  std::iota(group.begin(), group.end(), 0);
  for (std::size_t i = 0; i < p.faces.size(); ++i)
    for (std::size_t j = i + 1; j < p.faces.size(); ++j) {
      if (group[j] != static_cast<int>(j)) continue;
      const auto &a = p.face_planes[i], &b = p.face_planes[j];
      if (a.normal.dot(b.normal) >= 1.0 - 1e-12 &&
          std::abs(a.offset - b.offset) <= tol)
        group[j] = group[static_cast<int>(i)];
    }
  std::vector<std::vector<int>> merged_faces;
  std::vector<HalfSpace> merged_planes;
  for (std::size_t g = 0; g < p.faces.size(); ++g) {
    if (group[g] != static_cast<int>(g)) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = g; j < p.faces.size(); ++j)
      if (static_cast<std::size_t>(group[j]) == g) members.push_back(j);
    if (members.size() == 1) {
      merged_faces.push_back(p.faces[g]);
      merged_planes.push_back(p.face_planes[g]);
      continue;
    }
    // boundary of the union: directed edges whose reverse is absent
    std::set<std::pair<int, int>> directed;
    for (std::size_t m : members) {
      const auto& f = p.faces[m];
      for (std::size_t k = 0; k < f.size(); ++k)
        directed.insert({f[k], f[(k + 1) % f.size()]});
    }
    std::map<int, int> next;
    bool ok = true;
    for (const auto& [a, b] : directed) {
      if (directed.count({b, a})) continue;
      if (!next.emplace(a, b).second) ok = false;
    }
    std::vector<int> cycle;
    if (ok && !next.empty()) {
      int start = next.begin()->first, cur = start;
      do {
        cycle.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end()) {
          ok = false;
          break;
        }
        cur = it->second;
      } while (cur != start && cycle.size() <= next.size());
      if (cycle.size() != next.size()) ok = false;
    }
    if (ok && cycle.size() >= 3) {
      merged_faces.push_back(cycle);
      merged_planes.push_back(p.face_planes[g]);
    } else {
      for (std::size_t m : members) {
        merged_faces.push_back(p.faces[m]);
        merged_planes.push_back(p.face_planes[m]);
      }
    }
  }
  p.faces = std::move(merged_faces);
  p.face_planes = std::move(merged_planes);

  // 3. drop collinear points inside each cycle
  for (auto& f : p.faces) {
    bool changed = true;
    while (changed && f.size() > 3) {
      changed = false;
      for (std::size_t k = 0; k < f.size(); ++k) {
        const Vec3& a = p.vertices[f[(k + f.size() - 1) % f.size()]];
        const Vec3& b = p.vertices[f[k]];
        const Vec3& c = p.vertices[f[(k + 1) % f.size()]];
        if ((b - a).cross(c - b).norm() <= tol * (c - a).norm()) {
          f.erase(f.begin() + static_cast<std::ptrdiff_t>(k));
          changed = true;
          break;
        }
      }
    }
  }
  std::erase_if(p.faces, [](const auto& f) { return f.size() < 3; });
  detail::prune_unused_vertices(p);
}

// Raw Voronoi kernel: intersects the bisector half-spaces of the extent-shell
// of b (as given, no reduction) inside a bounding cube, planes in increasing
// offset order. No validation or fallback.
inline ConvexPolyhedron clip_voronoi_cell(const LatticeBasis& b, int extent) {
  const double len = b.max_length();
  ConvexPolyhedron p = make_box(2.0 * len);
  const double tol = 1e-9 * 2.0 * len;

  NeighborSet shell = neighbor_shell(b, extent);
  std::vector<HalfSpace> planes;
  planes.reserve(shell.points.size());
  for (const Vec3& q : shell.points)
    planes.push_back({q.normalized(), 0.5 * q.norm(), q});
  std::sort(planes.begin(), planes.end(),
            [](const HalfSpace& a, const HalfSpace& c) {
              if (a.offset != c.offset) return a.offset < c.offset;
              return detail::lex_less(a.generator, c.generator);
            });

  for (const HalfSpace& hs : planes) {
    // sorted by offset: once no vertex can lie beyond a plane, none can
    // lie beyond any later one either
    if (hs.offset >= p.circumradius()) break;
    clip_by_half_space(p, hs, tol);
  }
  canonicalize_polyhedron(p, tol);
  return p;
}

inline double polyhedron_volume(const ConvexPolyhedron& p) {
  double six_vol = 0;
  for (const auto& f : p.faces) {
    const Vec3& a = p.vertices[f[0]];
    for (std::size_t k = 1; k + 1 < f.size(); ++k)
      six_vol += a.dot(p.vertices[f[k]].cross(p.vertices[f[k + 1]]));
  }
  return six_vol / 6.0;
}

// Distance from the origin to the cell boundary: the smallest face offset.
inline double inradius(const ConvexPolyhedron& p) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& hs : p.face_planes) r = std::min(r, hs.offset);
  return r;
}

inline bool is_centrally_symmetric(const ConvexPolyhedron& p, double tol) {
  for (const Vec3& v : p.vertices) {
    bool found = false;
    for (const Vec3& w : p.vertices)
      if ((v + w).norm() <= tol) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

inline int euler_characteristic(const ConvexPolyhedron& p) {
  return static_cast<int>(p.vertices.size()) -
         static_cast<int>(p.edge_count()) + static_cast<int>(p.faces.size());
}

// Certificate that P is the full Voronoi cell of b: (i) every face plane is
// the exact bisector of its stored generator, and (ii) the shell one extent
// larger (of the reduced basis) cuts no vertex of P.
inline bool validate_cell(const ConvexPolyhedron& p, const LatticeBasis& b,
                          int extent = kDefaultNeighborExtent) {
  if (p.vertices.size() < 4 || p.faces.size() < 4) return false;
  const double tol = 1e-9 * std::max(1.0, 2.0 * p.circumradius());
  for (const auto& hs : p.face_planes) {
    const double glen = hs.generator.norm();
    if (glen <= 0) return false;
    if (std::abs(0.5 * glen - hs.offset) > tol) return false;
    if ((hs.generator / glen - hs.normal).norm() > 1e-9) return false;
  }
  const LatticeBasis reduced = reduce_basis(b);
  const NeighborSet shell = neighbor_shell(reduced, extent + 1);
  for (const Vec3& q : shell.points) {
    const double d = 0.5 * q.norm();
    const Vec3 n = q / q.norm();
    for (const Vec3& v : p.vertices)
      if (n.dot(v) > d + tol) return false;
  }
  return true;
}

// Voronoi cell of the lattice generated by b, as an explicit polyhedron.
// Reduces the basis, clips the extent-shell bisectors, and certifies the
// result (validate_cell plus volume == |det| within 1e-6 relative). Falls
// back to extent+1 once before giving up.
inline ConvexPolyhedron compute_voronoi_cell(const LatticeBasis& b,
                                             int extent = kDefaultNeighborExtent) {
  const LatticeBasis reduced = reduce_basis(b);
  const double cell_volume = unit_cell_volume(b);
  for (int e = extent; e <= extent + 1; ++e) {
    ConvexPolyhedron p = clip_voronoi_cell(reduced, e);
    const bool volume_ok =
        std::abs(polyhedron_volume(p) - cell_volume) <= 1e-6 * cell_volume;
    if (volume_ok && validate_cell(p, reduced, e)) {
      instrumentation::voronoi_cells_computed.fetch_add(
          1, std::memory_order_relaxed);
      return p;
    }
  }
  throw cell_validation_error(
      "voronoi cell failed validation at fallback extent " +
      std::to_string(extent + 1));
}

} // namespace latdist
