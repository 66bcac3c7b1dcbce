#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "latdist/polytope_metrics.hpp"

namespace latdist {

// Rotation about `axis` (unit vector, non-negative z) by `angle` radians.
struct RotationSample {
  Vec3 axis{0, 0, 1};
  double angle = 0;
};

// Finite sample of SO(3): n heights z in (0,1), ceil(2*pi*n) azimuths and
// angles each, plus the exact identity. Order is z-major, then azimuth, then
// angle, identity last; n*ceil(2*pi*n)^2 + 1 samples in total.
struct RotationGrid {
  int n = 0;
  std::vector<RotationSample> samples;
};

// Rodrigues' rotation of u about the unit axis by theta (dot-product form).
inline Vec3 rodrigues_rotate(const Vec3& u, const Vec3& axis, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return u * c + axis.cross(u) * s + axis * (axis.dot(u)) * (1.0 - c);
}

inline Mat3 rotation_matrix(const RotationSample& r) {
  Mat3 m;
  m.col(0) = rodrigues_rotate(Vec3(1, 0, 0), r.axis, r.angle);
  m.col(1) = rodrigues_rotate(Vec3(0, 1, 0), r.axis, r.angle);
  m.col(2) = rodrigues_rotate(Vec3(0, 0, 1), r.axis, r.angle);
  return m;
}

inline RotationGrid sample_rotations(int n) {
  if (n < 1) throw error("sample_rotations: n must be >= 1");
  const double two_pi = 2.0 * std::numbers::pi;
  const int m = static_cast<int>(std::ceil(two_pi * n));
  RotationGrid grid;
  grid.n = n;
  grid.samples.reserve(static_cast<std::size_t>(n) * m * m + 1);
  for (int k = 1; k <= n; ++k) {
    const double z = (k - 0.5) / n; // midpoints of (0,1)
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < m; ++j) {
      const double mu = two_pi * j / m;
      const Vec3 axis(r * std::cos(mu), r * std::sin(mu), z);
      for (int l = 0; l < m; ++l)
        grid.samples.push_back({axis, two_pi * l / m});
    }
  }
  grid.samples.push_back({Vec3(0, 0, 1), 0.0}); // exact identity
  return grid;
}

struct RotationSearchResult {
  double value = 0;
  RotationSample rotation;
};

namespace detail {

// Maximum over P's rotated vertices of a per-point objective against Q;
// stops early once the running maximum cannot beat `bound`.
template <class PointObjective>
double rotated_vertex_max(const ConvexPolyhedron& p, const Mat3& rot,
                          double bound, PointObjective&& objective) {
  double cur = 0;
  for (const Vec3& v : p.vertices) {
    cur = std::max(cur, objective(rot * v));
    if (cur >= bound) break;
  }
  return cur;
}

// Coordinate descent on (z, mu, theta) around a starting rotation: three
// step-halving levels from the grid spacing.
template <class Objective>
RotationSearchResult refine_rotation(const RotationSample& start,
                                     double start_value, int grid_n,
                                     Objective&& objective) {
  const double two_pi = 2.0 * std::numbers::pi;
  const int m = static_cast<int>(std::ceil(two_pi * grid_n));
  double z = std::clamp(start.axis.z(), 0.0, 1.0);
  const double rxy = std::hypot(start.axis.x(), start.axis.y());
  double mu = rxy > 0 ? std::atan2(start.axis.y(), start.axis.x()) : 0.0;
  double theta = start.angle;
  double best = start_value;

  auto eval = [&](double zz, double mm, double tt) {
    zz = std::clamp(zz, 0.0, 1.0);
    const double r = std::sqrt(std::max(0.0, 1.0 - zz * zz));
    const Vec3 axis(r * std::cos(mm), r * std::sin(mm), zz);
    return objective(RotationSample{axis, tt});
  };

  for (int level = 1; level <= 3; ++level) {
    const double dz = (1.0 / grid_n) / (1 << level);
    const double da = (two_pi / m) / (1 << level);
    for (int sweep = 0; sweep < 8; ++sweep) {
      bool improved = false;
      const double czs[2] = {z - dz, z + dz};
      for (double cz : czs)
        if (double val = eval(cz, mu, theta); val < best) {
          best = val;
          z = std::clamp(cz, 0.0, 1.0);
          improved = true;
        }
      const double cms[2] = {mu - da, mu + da};
      for (double cm : cms)
        if (double val = eval(z, cm, theta); val < best) {
          best = val;
          mu = cm;
          improved = true;
        }
      const double cts[2] = {theta - da, theta + da};
      for (double ct : cts)
        if (double val = eval(z, mu, ct); val < best) {
          best = val;
          theta = ct;
          improved = true;
        }
      if (!improved) break;
    }
  }
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  theta = std::fmod(theta, two_pi);
  if (theta < 0) theta += two_pi;
  return {best, {Vec3(r * std::cos(mu), r * std::sin(mu), z), theta}};
}

template <class PointObjective>
RotationSearchResult minimize_over_grid(const ConvexPolyhedron& p,
                                        const RotationGrid& grid, bool refine,
                                        PointObjective&& objective) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t k = 0; k < grid.samples.size(); ++k) {
    const Mat3 rot = rotation_matrix(grid.samples[k]);
    const double cur = rotated_vertex_max(p, rot, best, objective);
    if (cur < best) { // ties keep the first occurrence in grid order
      best = cur;
      best_idx = k;
    }
  }
  RotationSearchResult result{best, grid.samples[best_idx]};
  if (refine && best > 0) {
    result = refine_rotation(result.rotation, result.value, grid.n,
                             [&](const RotationSample& s) {
                               const Mat3 rot = rotation_matrix(s);
                               return rotated_vertex_max(
                                   p, rot,
                                   std::numeric_limits<double>::infinity(),
                                   objective);
                             });
  }
  return result;
}

} // namespace detail

// min over grid rotations R of offset_static(R(P), Q), with the argmin.
inline RotationSearchResult
offset_min(const ConvexPolyhedron& p, const ConvexPolyhedron& q,
           const RotationGrid& grid, bool refine = false,
           OffsetMethod method = OffsetMethod::exact_distance) {
  if (method == OffsetMethod::face_plane) {
    // the face_plane kernel is not a per-point maximum; evaluate whole-P
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    ConvexPolyhedron rotated = p;
    for (std::size_t k = 0; k < grid.samples.size(); ++k) {
      const Mat3 rot = rotation_matrix(grid.samples[k]);
      for (std::size_t i = 0; i < p.vertices.size(); ++i)
        rotated.vertices[i] = rot * p.vertices[i];
      const double cur = offset_static(rotated, q, method);
      if (cur < best) {
        best = cur;
        best_idx = k;
      }
    }
    return {best, grid.samples[best_idx]};
  }
  return detail::minimize_over_grid(
      p, grid, refine,
      [&](const Vec3& x) { return point_to_polyhedron_distance(x, q); });
}

// min over grid rotations R of scale_static(R(P), Q), with the argmin.
inline RotationSearchResult scale_min(const ConvexPolyhedron& p,
                                      const ConvexPolyhedron& q,
                                      const RotationGrid& grid,
                                      bool refine = false) {
  return detail::minimize_over_grid(
      p, grid, refine, [&](const Vec3& x) { return polytope_gauge(q, x); });
}

// Distance between two lattices together with the witnessing rotations.
// For the Hausdorff distance, value = max(forward_term, backward_term) in the
// input length units; for the scale-invariant distance, the terms are the two
// minimized scale factors and value = ln(max of them), dimensionless.
struct LatticeDistanceResult {
  double value = 0;
  double forward_term = 0;
  double backward_term = 0;
  RotationSample best_rotation_forward;
  RotationSample best_rotation_backward;
};

inline LatticeDistanceResult
hausdorff_from_cells(const ConvexPolyhedron& cell_l,
                     const ConvexPolyhedron& cell_m, const RotationGrid& grid,
                     bool refine = false,
                     OffsetMethod method = OffsetMethod::exact_distance) {
  const RotationSearchResult fwd = offset_min(cell_l, cell_m, grid, refine, method);
  const RotationSearchResult bwd = offset_min(cell_m, cell_l, grid, refine, method);
  return {std::max(fwd.value, bwd.value), fwd.value, bwd.value, fwd.rotation,
          bwd.rotation};
}

inline LatticeDistanceResult
scale_from_cells(const ConvexPolyhedron& cell_l, const ConvexPolyhedron& cell_m,
                 const RotationGrid& grid, bool refine = false) {
  const RotationSearchResult fwd = scale_min(cell_l, cell_m, grid, refine);
  const RotationSearchResult bwd = scale_min(cell_m, cell_l, grid, refine);
  return {std::log(std::max(fwd.value, bwd.value)), fwd.value, bwd.value,
          fwd.rotation, bwd.rotation};
}

// Extended Hausdorff distance d_H between the lattices generated by the two
// bases: both Voronoi cells are computed once, each directional offset is
// minimized over the grid, and the larger one wins. Symmetric in (l, m).
inline LatticeDistanceResult
extended_hausdorff(const LatticeBasis& l, const LatticeBasis& m,
                   const RotationGrid& grid, bool refine = false,
                   OffsetMethod method = OffsetMethod::exact_distance) {
  return hausdorff_from_cells(compute_voronoi_cell(l), compute_voronoi_cell(m),
                              grid, refine, method);
}

// Scale-invariant distance d_s = ln(max of the two minimized scale factors).
inline LatticeDistanceResult scale_distance(const LatticeBasis& l,
                                            const LatticeBasis& m,
                                            const RotationGrid& grid,
                                            bool refine = false) {
  return scale_from_cells(compute_voronoi_cell(l), compute_voronoi_cell(m),
                          grid, refine);
}

} // namespace latdist
