#pragma once

#include <array>
#include <vector>

#include "surfreg/geometry.hpp"

namespace surfreg {

using Face = std::array<int, 3>;

/// Triangle mesh or bare point cloud (zero faces). Per-vertex normals are
/// optional; when present the array length matches the vertex count.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> normals;

    bool has_normals() const { return !normals.empty(); }
};

struct Bounds {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    double diagonal() const { return (max - min).norm(); }
};

Bounds bounding_box(const std::vector<Vec3>& points);

/// Throws std::invalid_argument on out-of-range face indices, degenerate
/// faces, or a normal array whose length does not match the vertices.
void validate(const Mesh& mesh);

std::vector<Vec3> transformed(const RigidTransform& t, const std::vector<Vec3>& points);

}  // namespace surfreg
