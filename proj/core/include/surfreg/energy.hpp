#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "surfreg/geometry.hpp"
#include "surfreg/graph.hpp"
#include "surfreg/kdtree.hpp"

namespace surfreg {

struct Weights {
    double w1 = 1.0;        ///< closest-point fit
    double w2 = 1.0;        ///< global rigid-motion coupling
    double w3 = 0.0;        ///< local rigidity coupling over graph edges
    double w4 = 0.0;        ///< point-to-plane fit
    double tikhonov = 1e-6; ///< ridge on the rotation unknowns
};

struct EnergyBreakdown {
    double e_fit = 0.0;
    double e_rigid = 0.0;
    double e_arap = 0.0;
    double e_plane = 0.0;
    double e_total = 0.0;
};

/// Everything one quadratic subproblem sees: linearization points x, the
/// candidate points z, global motion, optional per-vertex rotation vectors,
/// and the frozen projections of x onto the target.
struct RegistrationState {
    std::vector<Vec3> x;
    std::vector<Vec3> z;
    SmallMotion motion;
    std::optional<std::vector<Vec3>> local_rotations;
    std::vector<Projection> projections;

    int size() const { return static_cast<int>(x.size()); }
};

/// Term-by-term energy with projections held fixed. `graph` is required
/// exactly when w.w3 > 0 (and then local_rotations must be present).
/// Throws std::invalid_argument on inconsistent array lengths or a missing
/// normal when w.w4 > 0.
EnergyBreakdown eval_energy(const RegistrationState& state, const AdjacencyGraph* graph,
                            const Weights& w);

/// Gradient of the quadratic surrogate actually minimized each iteration:
/// e_total plus the Tikhonov ridge tikhonov * (|r|^2 + sum_i |r_i|^2).
/// Layout matches the solver unknowns: [r, t, (r_1..r_N when local), z_1..z_N],
/// so length is 6+3N without local rotations and 6+6N with them.
Eigen::VectorXd eval_gradient(const RegistrationState& state, const AdjacencyGraph* graph,
                              const Weights& w);

}  // namespace surfreg
