#pragma once

#include <vector>

#include "surfreg/block_system.hpp"
#include "surfreg/energy.hpp"
#include "surfreg/geometry.hpp"
#include "surfreg/kdtree.hpp"
#include "surfreg/mesh.hpp"

namespace surfreg {

struct RigidConfig {
    Weights weights;
    int max_iters = 50;
    /// Convergence threshold on |r| + |t| of the incremental motion.
    double stop_tol = 1e-6;
    bool use_point_to_plane = false;
};

/// Per-iteration record. energies is the quadratic surrogate evaluated at the
/// solved step; e_total_null is the same surrogate at the zero step (previous
/// iterate), so descent can be audited after the fact.
struct IterationReport {
    int iter = 0;
    EnergyBreakdown energies;
    double step_rot_norm = 0.0;
    double step_trans_norm = 0.0;
    double rmsd_to_projection = 0.0;
    double e_total_null = 0.0;
    /// Largest per-point move of this iteration; the non-rigid stop metric.
    double max_displacement = 0.0;
};

struct RegistrationResult {
    RigidTransform transform;
    std::vector<Vec3> final_points;
    std::vector<IterationReport> reports;
    bool converged = false;
};

/// One solved linearized step: incremental motion, the relaxed points z, and
/// the surrogate energies at the solution.
struct RigidStep {
    SmallMotion motion;
    std::vector<Vec3> z;
    EnergyBreakdown energies;
};

/// Builds the 6+3N normal-equations system for one rigid step, with frozen
/// projections proj. Unknown layout: [r, t, z_1 .. z_N]. Requires N >= 3 and
/// w2 > 0; with point_to_plane every projection must carry a normal.
BlockSystem assemble_rigid(const std::vector<Vec3>& x, const std::vector<Projection>& proj,
                           const Weights& w, bool point_to_plane);

/// Projects each x_i onto the target, assembles, and solves one step.
RigidStep step_rigid(const std::vector<Vec3>& x, const KdTree& tree, const RigidConfig& cfg);

/// Full rigid registration loop against a prebuilt target tree. Each step
/// projects the current moved points; the moving points are always the
/// accumulated transform applied to the original source.
RegistrationResult register_rigid(const std::vector<Vec3>& source, const KdTree& tree,
                                  const RigidConfig& cfg);

/// Convenience overload; builds the tree, estimating target normals (PCA,
/// k = 12) when point-to-plane is requested.
RegistrationResult register_rigid(const std::vector<Vec3>& source,
                                  const std::vector<Vec3>& target, const RigidConfig& cfg);

/// Tree for a mesh target. with_normals picks, in order: normals stored on
/// the mesh, face-accumulated vertex normals, PCA estimates (k = 12).
KdTree make_target_tree(const Mesh& target, bool with_normals);

}  // namespace surfreg
