#pragma once

#include <vector>

#include "surfreg/mesh.hpp"

namespace surfreg {

/// Per-vertex unit normals.
///
/// With faces: the normalized sum of incident triangle normals (the cross
/// products are area-weighted). Without faces: PCA over the k nearest
/// neighbors of each point, taking the smallest-eigenvalue direction; signs
/// are then made consistent by breadth-first propagation seeded at the
/// highest point, oriented toward +z.
///
/// Throws std::invalid_argument when k < 3 on the PCA path, and
/// std::runtime_error ("degenerate normal neighborhood") naming the point
/// index when a vertex has no usable incident area or its neighborhood is
/// collinear.
std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points, int k,
                                   const std::vector<Face>* faces = nullptr);

}  // namespace surfreg
