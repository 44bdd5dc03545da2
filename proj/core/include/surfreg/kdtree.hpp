#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "surfreg/geometry.hpp"

namespace surfreg {

/// Closest-point projection of a query onto the target point set.
struct Projection {
    Vec3 point = Vec3::Zero();
    int index = -1;
    std::optional<Vec3> normal;
    double distance = 0.0;
};

/// Static k-d tree over a point set for exact nearest-neighbor lookup.
///
/// Nodes split on the axis of largest extent at the median point; leaves
/// hold up to 8 points. Exact distance ties resolve to the lowest point
/// index, so queries are deterministic for identical input.
class KdTree {
public:
    /// Builds the tree. Normals, when given, must be one unit vector per
    /// point and are attached to every projection returned by project().
    /// Throws std::invalid_argument on an empty point set or a normal
    /// array of mismatched length.
    explicit KdTree(std::vector<Vec3> points, std::vector<Vec3> normals = {});

    /// Index of the nearest point to q (lowest index among exact ties).
    int nearest(const Vec3& q) const;

    Projection project(const Vec3& q) const;

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }
    bool has_normals() const { return !normals_.empty(); }

private:
    struct Node {
        // Leaf when child < 0: [begin, end) indexes order_.
        int axis = -1;
        double split = 0.0;
        int left = -1;
        int right = -1;
        int begin = 0;
        int end = 0;
    };

    int build(int begin, int end);
    void search(int node, const Vec3& q, double& best_d2, int& best_idx) const;

    std::vector<Vec3> points_;
    std::vector<Vec3> normals_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;

    static constexpr int kLeafSize = 8;
};

}  // namespace surfreg
