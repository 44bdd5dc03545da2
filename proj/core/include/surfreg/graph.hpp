#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "surfreg/mesh.hpp"

namespace surfreg {

/// Undirected vertex connectivity with its combinatorial Laplacian
/// L = D - Adj. Neighbor lists are symmetric, self-loop free, and sorted
/// ascending.
struct AdjacencyGraph {
    int node_count = 0;
    std::vector<std::vector<int>> neighbors;
    /// Vertices with no incident edge; their coupling terms are empty.
    std::vector<int> isolated;

    int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
    std::size_t edge_count() const;

    Eigen::SparseMatrix<double> laplacian() const;
};

/// Connectivity from the undirected union of triangle edges. Throws
/// std::invalid_argument when the mesh has no edges or invalid face
/// indices; isolated vertices are allowed and reported in `isolated`.
AdjacencyGraph build_laplacian(const Mesh& mesh);

}  // namespace surfreg
