#include "surfreg/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace surfreg {

std::size_t AdjacencyGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& nb : neighbors) {
        total += nb.size();
    }
    return total / 2;
}

Eigen::SparseMatrix<double> AdjacencyGraph::laplacian() const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(node_count) + 2 * edge_count());
    for (int i = 0; i < node_count; ++i) {
        triplets.emplace_back(i, i, static_cast<double>(degree(i)));
        for (int j : neighbors[i]) {
            triplets.emplace_back(i, j, -1.0);
        }
    }
    Eigen::SparseMatrix<double> lap(node_count, node_count);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    return lap;
}

AdjacencyGraph build_laplacian(const Mesh& mesh) {
    validate(mesh);
    const int n = static_cast<int>(mesh.vertices.size());

    std::vector<std::pair<int, int>> edges;
    edges.reserve(3 * mesh.faces.size());
    for (const Face& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e];
            const int b = f[(e + 1) % 3];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.empty()) {
        throw std::invalid_argument("mesh has no edges");
    }

    AdjacencyGraph graph;
    graph.node_count = n;
    graph.neighbors.resize(n);
    for (const auto& [a, b] : edges) {
        graph.neighbors[a].push_back(b);
        graph.neighbors[b].push_back(a);
    }
    for (auto& nb : graph.neighbors) {
        std::sort(nb.begin(), nb.end());
    }
    for (int i = 0; i < n; ++i) {
        if (graph.neighbors[i].empty()) {
            graph.isolated.push_back(i);
        }
    }
    return graph;
}

}  // namespace surfreg
