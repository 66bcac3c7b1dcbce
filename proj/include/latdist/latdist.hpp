#pragma once

// Umbrella header: metric and scale-invariant similarity distances between
// arbitrary 3D crystal lattices via Voronoi cells and rotation sampling.

#include "latdist/errors.hpp"
#include "latdist/lattice.hpp"
#include "latdist/polyhedron.hpp"
#include "latdist/polytope_metrics.hpp"
#include "latdist/rotation.hpp"
#include "latdist/distance_matrix.hpp"
#include "latdist/io.hpp"
