#include "surfreg/normals.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include "surfreg/kdtree.hpp"

namespace surfreg {

namespace {

[[noreturn]] void throw_degenerate(std::size_t index) {
    throw std::runtime_error("degenerate normal neighborhood at point " +
                             std::to_string(index));
}

std::vector<Vec3> normals_from_faces(const std::vector<Vec3>& points,
                                     const std::vector<Face>& faces) {
    std::vector<Vec3> acc(points.size(), Vec3::Zero());
    for (const Face& f : faces) {
        const Vec3 n = (points[f[1]] - points[f[0]]).cross(points[f[2]] - points[f[0]]);
        acc[f[0]] += n;
        acc[f[1]] += n;
        acc[f[2]] += n;
    }
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double len = acc[i].norm();
        if (len < 1e-300) {
            throw_degenerate(i);
        }
        acc[i] /= len;
    }
    return acc;
}

std::vector<Vec3> normals_from_pca(const std::vector<Vec3>& points, int k) {
    if (k < 3) {
        throw std::invalid_argument("normal estimation needs k >= 3 neighbors");
    }
    const int n = static_cast<int>(points.size());
    if (n < k) {
        throw std::invalid_argument("fewer points than requested neighborhood size");
    }

    KdTree tree(points);

    // Neighbor search by brute-force partial sort: n is desk-scale here and
    // the tree is only used for the registration hot path. Keep the k
    // nearest (excluding self) with lowest-index ties.
    std::vector<std::vector<int>> knn(n);
    std::vector<std::pair<double, int>> dist(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            dist[j] = {(points[j] - points[i]).squaredNorm(), j};
        }
        dist[i].first = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        knn[i].reserve(k);
        for (int j = 0; j < k; ++j) {
            knn[i].push_back(dist[j].second);
        }
    }

    std::vector<Vec3> normals(n);
    for (int i = 0; i < n; ++i) {
        Vec3 centroid = points[i];
        for (int j : knn[i]) {
            centroid += points[j];
        }
        centroid /= static_cast<double>(knn[i].size() + 1);

        Mat3 cov = Mat3::Zero();
        const Vec3 di = points[i] - centroid;
        cov += di * di.transpose();
        for (int j : knn[i]) {
            const Vec3 d = points[j] - centroid;
            cov += d * d.transpose();
        }

        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        const Vec3 evals = eig.eigenvalues();  // ascending
        if (evals[1] <= 1e-12 * std::max(evals[2], 1e-300)) {
            throw_degenerate(static_cast<std::size_t>(i));  // collinear neighborhood
        }
        normals[i] = eig.eigenvectors().col(0).normalized();
    }

    // Sign consistency: BFS over the k-NN graph from the highest point of
    // each component, root oriented toward +z.
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j : knn[i]) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    std::vector<int> by_height(n);
    for (int i = 0; i < n; ++i) {
        by_height[i] = i;
    }
    std::sort(by_height.begin(), by_height.end(), [&](int a, int b) {
        return points[a].z() > points[b].z() || (points[a].z() == points[b].z() && a < b);
    });

    std::vector<char> seen(n, 0);
    for (int root : by_height) {
        if (seen[root]) {
            continue;
        }
        if (normals[root].z() < 0.0) {
            normals[root] = -normals[root];
        }
        seen[root] = 1;
        std::queue<int> frontier;
        frontier.push(root);
        while (!frontier.empty()) {
            const int cur = frontier.front();
            frontier.pop();
            for (int nb : adj[cur]) {
                if (seen[nb]) {
                    continue;
                }
                if (normals[cur].dot(normals[nb]) < 0.0) {
                    normals[nb] = -normals[nb];
                }
                seen[nb] = 1;
                frontier.push(nb);
            }
        }
    }
    return normals;
}

}  // namespace

std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points, int k,
                                   const std::vector<Face>* faces) {
    if (faces != nullptr && !faces->empty()) {
        return normals_from_faces(points, *faces);
    }
    return normals_from_pca(points, k);
}

}  // namespace surfreg
