#include "surfreg/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace surfreg {

KdTree::KdTree(std::vector<Vec3> points, std::vector<Vec3> normals)
    : points_(std::move(points)), normals_(std::move(normals)) {
    if (points_.empty()) {
        throw std::invalid_argument("empty target");
    }
    if (!normals_.empty() && normals_.size() != points_.size()) {
        throw std::invalid_argument("normal count does not match point count");
    }
    for (const Vec3& p : points_) {
        if (!p.allFinite()) {
            throw std::invalid_argument("non-finite target point");
        }
    }
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
        order_[i] = static_cast<int>(i);
    }
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int i = begin; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const int mid = begin + (end - begin) / 2;
    // Ties in the split coordinate order by index so construction is a pure
    // function of the input.
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double ca = points_[a][axis];
                         const double cb = points_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });

    node.axis = axis;
    node.split = points_[order_[mid]][axis];
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree::search(int node_idx, const Vec3& q, double& best_d2, int& best_idx) const {
    const Node& node = nodes_[node_idx];
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[i];
            const double d2 = (points_[idx] - q).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
                best_d2 = d2;
                best_idx = idx;
            }
        }
        return;
    }

    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, q, best_d2, best_idx);
    // <= keeps equidistant candidates reachable so the lowest-index tie rule
    // sees every tied point.
    if (diff * diff <= best_d2) {
        search(far, q, best_d2, best_idx);
    }
}

int KdTree::nearest(const Vec3& q) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_idx = std::numeric_limits<int>::max();
    search(root_, q, best_d2, best_idx);
    return best_idx;
}

Projection KdTree::project(const Vec3& q) const {
    Projection proj;
    proj.index = nearest(q);
    proj.point = points_[proj.index];
    proj.distance = (proj.point - q).norm();
    if (!normals_.empty()) {
        proj.normal = normals_[proj.index];
    }
    return proj;
}

}  // namespace surfreg
