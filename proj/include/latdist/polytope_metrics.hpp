#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "latdist/polyhedron.hpp"

namespace latdist {

namespace instrumentation {
// Vertex-face feature tests performed by the static kernels below; lets tests
// assert the advertised O(#vertices * #faces) operation count.
inline thread_local std::uint64_t feature_tests = 0;
} // namespace instrumentation

namespace detail {

inline double point_segment_distance(const Vec3& p, const Vec3& a,
                                     const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

} // namespace detail

// Euclidean distance from p to the solid polyhedron: 0 inside (with a 1e-12
// relative boundary band, so points of a cell test as inside their own cell),
// otherwise the exact distance to the nearest boundary feature.
inline double point_to_polyhedron_distance(const Vec3& p,
                                           const ConvexPolyhedron& q) {
  double scale = p.norm();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& hs : q.face_planes) {
    ++instrumentation::feature_tests;
    scale = std::max(scale, hs.offset);
    worst = std::max(worst, hs.normal.dot(p) - hs.offset);
  }
  const double tol = 1e-12 * (1.0 + scale);
  if (worst <= tol) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t fi = 0; fi < q.faces.size(); ++fi) {
    ++instrumentation::feature_tests;
    const auto& f = q.faces[fi];
    const auto& hs = q.face_planes[fi];
    const double h = hs.normal.dot(p) - hs.offset;
    const Vec3 proj = p - h * hs.normal;
    bool proj_in_face = true;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const Vec3& a = q.vertices[f[k]];
      const Vec3& b = q.vertices[f[(k + 1) % f.size()]];
      if ((b - a).cross(proj - a).dot(hs.normal) < -tol * scale) {
        proj_in_face = false;
        break;
      }
    }
    if (proj_in_face) {
      best = std::min(best, std::abs(h));
    } else {
      for (std::size_t k = 0; k < f.size(); ++k)
        best = std::min(best,
                        detail::point_segment_distance(
                            p, q.vertices[f[k]], q.vertices[f[(k + 1) % f.size()]]));
    }
  }
  return best;
}

// Gauge of q at x: the factor by which q must be scaled to place x on its
// boundary; max over faces of (normal.x)/offset. Values within 1e-12 of 1 snap
// to exactly 1 so that a cell against itself reports scale 1 and distance 0.
inline double polytope_gauge(const ConvexPolyhedron& q, const Vec3& x) {
  double g = 0;
  for (const auto& hs : q.face_planes) {
    ++instrumentation::feature_tests;
    g = std::max(g, hs.normal.dot(x) / hs.offset);
  }
  if (std::abs(g - 1.0) <= 1e-12) return 1.0;
  return g;
}

enum class OffsetMethod {
  exact_distance, // true point-to-polytope distance (the definition)
  face_plane,     // distance to the plane of the face hit by [0,v]
};

namespace detail {

// Offset contribution of a single vertex in the face_plane method: distance
// from v to the supporting plane of the face where the segment [0,v] exits q.
// Underestimates the exact distance when the nearest feature is an edge or
// vertex of that face.
inline double face_plane_clearance(const Vec3& v, const ConvexPolyhedron& q) {
  double t_exit = std::numeric_limits<double>::infinity();
  const HalfSpace* exit_face = nullptr;
  for (const auto& hs : q.face_planes) {
    ++instrumentation::feature_tests;
    const double c = hs.normal.dot(v);
    if (c <= 0) continue;
    const double t = hs.offset / c;
    if (t < t_exit) {
      t_exit = t;
      exit_face = &hs;
    }
  }
  if (!exit_face || t_exit >= 1.0 - 1e-12) return 0.0; // v inside or on q
  return exit_face->normal.dot(v) - exit_face->offset;
}

} // namespace detail

// offset(P,Q) with both polyhedra held fixed: the smallest r with
// P inside the r-offset of Q. The distance-to-Q function is convex, so its
// maximum over P is attained at a vertex.
inline double offset_static(const ConvexPolyhedron& p,
                            const ConvexPolyhedron& q,
                            OffsetMethod method = OffsetMethod::exact_distance) {
  double r = 0;
  for (const Vec3& v : p.vertices)
    r = std::max(r, method == OffsetMethod::exact_distance
                        ? point_to_polyhedron_distance(v, q)
                        : detail::face_plane_clearance(v, q));
  return r;
}

// scale(P,Q) with both polyhedra held fixed: min{s > 0 : P inside s*Q},
// the gauge of Q maximized over P's vertices.
inline double scale_static(const ConvexPolyhedron& p,
                           const ConvexPolyhedron& q) {
  double s = 0;
  for (const Vec3& v : p.vertices) s = std::max(s, polytope_gauge(q, v));
  return s;
}

// Hausdorff distance between the fixed polyhedra: the larger directional
// offset.
inline double hausdorff_static(const ConvexPolyhedron& p,
                               const ConvexPolyhedron& q) {
  return std::max(offset_static(p, q), offset_static(q, p));
}

} // namespace latdist
