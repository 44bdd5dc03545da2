#pragma once

#include <vector>

#include "surfreg/block_system.hpp"
#include "surfreg/energy.hpp"
#include "surfreg/graph.hpp"
#include "surfreg/kdtree.hpp"
#include "surfreg/mesh.hpp"
#include "surfreg/rigid.hpp"

namespace surfreg {

struct ArapConfig {
    Weights weights{1.0, 1.0, 1.0, 0.0, 1e-6};
    int max_iters = 100;
    /// Convergence threshold on the largest per-point move in one iteration.
    double stop_tol = 1e-6;
    bool use_point_to_plane = false;
};

/// Builds the 6+6N system for one non-rigid step. Unknown layout:
/// [r, t, r_1 .. r_N, z_1 .. z_N]. Requires w3 > 0 and a graph over exactly
/// the given points; w2 may be zero (the global motion then stays at zero).
BlockSystem assemble_arap(const std::vector<Vec3>& x, const std::vector<Projection>& proj,
                          const AdjacencyGraph& graph, const Weights& w, bool point_to_plane);

/// Non-rigid registration: project, assemble, solve, then adopt z as the next
/// point set. The returned transform only accumulates the per-step global
/// motion for reporting; final_points are the freely deformed points.
RegistrationResult register_arap(const Mesh& source, const KdTree& tree, const ArapConfig& cfg);

/// Convenience overload; builds a target tree, with PCA normals (k = 12) when
/// point-to-plane is requested.
RegistrationResult register_arap(const Mesh& source, const std::vector<Vec3>& target,
                                 const ArapConfig& cfg);

}  // namespace surfreg
