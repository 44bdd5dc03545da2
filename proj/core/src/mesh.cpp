#include "surfreg/mesh.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace surfreg {

Bounds bounding_box(const std::vector<Vec3>& points) {
    if (points.empty()) {
        return {};
    }
    Bounds b;
    b.min = Vec3::Constant(std::numeric_limits<double>::infinity());
    b.max = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const Vec3& p : points) {
        b.min = b.min.cwiseMin(p);
        b.max = b.max.cwiseMax(p);
    }
    return b;
}

void validate(const Mesh& mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int idx : face) {
            if (idx < 0 || idx >= n) {
                throw std::invalid_argument("face " + std::to_string(f) +
                                            " references vertex " + std::to_string(idx) +
                                            " outside [0, " + std::to_string(n) + ")");
            }
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw std::invalid_argument("face " + std::to_string(f) + " is degenerate");
        }
    }
    if (!mesh.normals.empty() && mesh.normals.size() != mesh.vertices.size()) {
        throw std::invalid_argument("normal count does not match vertex count");
    }
}

std::vector<Vec3> transformed(const RigidTransform& t, const std::vector<Vec3>& points) {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const Vec3& p : points) {
        out.push_back(t.apply(p));
    }
    return out;
}

}  // namespace surfreg
