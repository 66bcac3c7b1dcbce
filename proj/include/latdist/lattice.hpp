#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "latdist/errors.hpp"

namespace latdist {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Neighbor shell extent used for Voronoi cells; shells of reduced bases at
// this extent carry every cell-defining lattice vector.
inline constexpr int kDefaultNeighborExtent = 3;

// |det| <= kDegeneracyTol * (max vector length)^3 is rejected as degenerate.
inline constexpr double kDegeneracyTol = 1e-12;

namespace detail {

inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

} // namespace detail

// Unit cell edge lengths (a,b,c) and angles (alpha,beta,gamma) in degrees.
struct CellParameters {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double alpha = 90.0;
  double beta = 90.0;
  double gamma = 90.0;
};

// Three basis vectors generating a lattice. Orientation is normalized at
// construction: a left-handed triple has two vectors swapped so det > 0.
class LatticeBasis {
public:
  LatticeBasis(const Vec3& u, const Vec3& v, const Vec3& w) : vecs_{u, v, w} {
    const double len = max_length();
    const double det = matrix().determinant();
    if (std::abs(det) <= kDegeneracyTol * len * len * len)
      throw degenerate_basis_error("basis vectors are linearly dependent");
    if (det < 0) std::swap(vecs_[1], vecs_[2]);
  }

  const Vec3& u() const noexcept { return vecs_[0]; }
  const Vec3& v() const noexcept { return vecs_[1]; }
  const Vec3& w() const noexcept { return vecs_[2]; }
  const Vec3& operator[](int i) const noexcept { return vecs_[i]; }

  // Rows are u, v, w.
  Mat3 matrix() const {
    Mat3 m;
    m.row(0) = vecs_[0];
    m.row(1) = vecs_[1];
    m.row(2) = vecs_[2];
    return m;
  }

  double max_length() const {
    return std::max({vecs_[0].norm(), vecs_[1].norm(), vecs_[2].norm()});
  }

private:
  std::array<Vec3, 3> vecs_;
};

// Nonzero lattice vectors with integer coordinates in [-extent, extent]^3.
struct NeighborSet {
  std::vector<Vec3> points;
  int extent = 0;
};

inline double unit_cell_volume(const LatticeBasis& b) {
  return std::abs(b.matrix().determinant());
}

// Builds a basis from cell parameters with the usual convention: u along x,
// v in the xy-plane.
inline LatticeBasis basis_from_cell_parameters(const CellParameters& p) {
  auto bad = [](const std::string& what) {
    throw non_positive_definite_error("invalid cell parameters: " + what);
  };
  if (!(p.a > 0) || !(p.b > 0) || !(p.c > 0)) bad("edge lengths must be positive");
  for (double ang : {p.alpha, p.beta, p.gamma})
    if (!(ang > 0) || !(ang < 180)) bad("angles must lie in (0, 180) degrees");

  const double deg = std::acos(-1.0) / 180.0;
  const double ca = std::cos(p.alpha * deg);
  const double cb = std::cos(p.beta * deg);
  const double cg = std::cos(p.gamma * deg);
  const double sg = std::sin(p.gamma * deg);

  const Vec3 u(p.a, 0, 0);
  const Vec3 v(p.b * cg, p.b * sg, 0);
  const double wx = cb;
  const double wy = (ca - cb * cg) / sg;
  const double wz2 = 1.0 - wx * wx - wy * wy;
  if (wz2 <= 0) bad("angle combination admits no real basis");
  const Vec3 w(p.c * wx, p.c * wy, p.c * std::sqrt(wz2));
  return LatticeBasis(u, v, w);
}

// Recovers lengths and angles (degrees) from a basis.
inline CellParameters cell_parameters_of(const LatticeBasis& b) {
  auto angle_deg = [](const Vec3& x, const Vec3& y) {
    const double c = x.dot(y) / (x.norm() * y.norm());
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::acos(-1.0);
  };
  CellParameters p;
  p.a = b.u().norm();
  p.b = b.v().norm();
  p.c = b.w().norm();
  p.alpha = angle_deg(b.v(), b.w());
  p.beta = angle_deg(b.u(), b.w());
  p.gamma = angle_deg(b.u(), b.v());
  return p;
}

// Greedy pairwise reduction: repeatedly replace vi by vi - round(vi.vj/vj.vj)*vj
// for the pair giving the largest length decrease. Terminates because squared
// lengths strictly decrease over a discrete set. Half-integer projections round
// to even, so exactly-balanced alternatives are left untouched. Output vectors
// are sorted by length ascending; same lattice as the input.
inline LatticeBasis reduce_basis(const LatticeBasis& b) {
  std::array<Vec3, 3> v = {b.u(), b.v(), b.w()};
  constexpr int kMaxSteps = 512;
  for (int step = 0; step < kMaxSteps; ++step) {
    double best_gain = 0;
    int best_i = -1;
    Vec3 best_vec = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const double m = std::nearbyint(v[i].dot(v[j]) / v[j].squaredNorm());
        if (m == 0) continue;
        const Vec3 cand = v[i] - m * v[j];
        const double gain = v[i].squaredNorm() - cand.squaredNorm();
        if (gain > best_gain) {
          best_gain = gain;
          best_i = i;
          best_vec = cand;
        }
      }
    }
    if (best_i < 0 || best_gain <= 1e-14 * v[best_i].squaredNorm()) break;
    v[best_i] = best_vec;
  }
  std::sort(v.begin(), v.end(), [](const Vec3& a, const Vec3& c) {
    const double la = a.squaredNorm(), lc = c.squaredNorm();
    if (la != lc) return la < lc;
    return detail::lex_less(a, c);
  });
  Mat3 m;
  m.row(0) = v[0];
  m.row(1) = v[1];
  m.row(2) = v[2];
  if (m.determinant() < 0) v[2] = -v[2]; // keep the length ordering
  return LatticeBasis(v[0], v[1], v[2]);
}

// All x*u + y*v + z*w with integer (x,y,z) in [-extent, extent]^3 minus the
// origin; (2*extent+1)^3 - 1 points, closed under negation. Callers that feed
// Voronoi construction must reduce the basis first.
inline NeighborSet neighbor_shell(const LatticeBasis& b, int extent) {
  if (extent < 1) throw error("neighbor_shell: extent must be >= 1");
  NeighborSet shell;
  shell.extent = extent;
  shell.points.reserve(static_cast<std::size_t>(2 * extent + 1) *
                           (2 * extent + 1) * (2 * extent + 1) -
                       1);
  for (int x = -extent; x <= extent; ++x)
    for (int y = -extent; y <= extent; ++y)
      for (int z = -extent; z <= extent; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        shell.points.push_back(x * b.u() + y * b.v() + z * b.w());
      }
  return shell;
}

} // namespace latdist
