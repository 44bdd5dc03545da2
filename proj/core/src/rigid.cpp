#include "surfreg/rigid.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "surfreg/normals.hpp"

namespace surfreg {

namespace {

constexpr double kOrthogonalityDrift = 1e-9;

/// Rigid mode has no neighborhood term, and the plane term only exists when
/// requested, so the same Weights can drive assembly and energy evaluation.
Weights effective_weights(const RigidConfig& cfg) {
    Weights w = cfg.weights;
    w.w3 = 0.0;
    if (!cfg.use_point_to_plane) {
        w.w4 = 0.0;
    }
    return w;
}

std::vector<Projection> project_all(const std::vector<Vec3>& probes, const KdTree& tree) {
    std::vector<Projection> proj;
    proj.reserve(probes.size());
    for (const Vec3& p : probes) {
        proj.push_back(tree.project(p));
    }
    return proj;
}

struct StepOutcome {
    SmallMotion motion;
    std::vector<Vec3> z;
    EnergyBreakdown energies;
    double e_total_null = 0.0;
    double rmsd = 0.0;
};

/// Projects x onto the target and solves one linearized step.
StepOutcome run_step(const std::vector<Vec3>& x, const KdTree& tree, const Weights& w,
                     bool p2plane) {
    const int n = static_cast<int>(x.size());
    StepOutcome out;

    RegistrationState state;
    state.x = x;
    state.projections = project_all(x, tree);

    BlockSystem sys = assemble_rigid(x, state.projections, w, p2plane);
    const SolveReport solved = sys.solve();

    out.motion.rotation = solved.solution.segment<3>(0);
    out.motion.translation = solved.solution.segment<3>(3);
    out.z.resize(n);
    for (int i = 0; i < n; ++i) {
        out.z[i] = solved.solution.segment<3>(6 + 3 * i);
    }

    state.z = out.z;
    state.motion = out.motion;
    out.energies = eval_energy(state, nullptr, w);

    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        sq += (state.projections[i].point - out.z[i]).squaredNorm();
    }
    out.rmsd = std::sqrt(sq / n);

    // The previous iterate is feasible at zero motion with z = x; the solved
    // step must not be worse.
    state.z = x;
    state.motion = SmallMotion{};
    out.e_total_null = eval_energy(state, nullptr, w).e_total;
    return out;
}

}  // namespace

BlockSystem assemble_rigid(const std::vector<Vec3>& x, const std::vector<Projection>& proj,
                           const Weights& w, bool point_to_plane) {
    const int n = static_cast<int>(x.size());
    if (n < 3) {
        throw std::invalid_argument("underdetermined: rigid registration needs at least 3 points");
    }
    if (proj.size() != x.size()) {
        throw std::invalid_argument("projection count does not match point count");
    }
    if (w.w2 <= 0.0) {
        throw std::invalid_argument("rigid assembly requires w2 > 0");
    }
    if (point_to_plane) {
        for (const Projection& p : proj) {
            if (!p.normal) {
                throw std::invalid_argument("point-to-plane requires target normals");
            }
        }
    }

    BlockSystem sys(6 + 3 * n);
    const Mat3 id = Mat3::Identity();
    const double w4 = point_to_plane ? w.w4 : 0.0;

    for (int i = 0; i < n; ++i) {
        const int zb = 2 + i;
        const Mat3 xi = skew(x[i]);

        // w2 |x_i - X_i r + t - z_i|^2
        sys.add_block(0, 0, w.w2 * xi.transpose() * xi);
        sys.add_block(0, 1, w.w2 * xi);
        sys.add_block(1, 0, -w.w2 * xi);
        sys.add_block(0, zb, -w.w2 * xi);
        sys.add_block(zb, 0, w.w2 * xi);
        sys.add_block(1, 1, w.w2 * id);
        sys.add_block(1, zb, -w.w2 * id);
        sys.add_block(zb, 1, -w.w2 * id);
        sys.add_block(zb, zb, w.w2 * id);
        sys.add_rhs(1, -w.w2 * x[i]);
        sys.add_rhs(zb, w.w2 * x[i]);

        // w1 |z_i - p_i|^2
        if (w.w1 > 0.0) {
            sys.add_block(zb, zb, w.w1 * id);
            sys.add_rhs(zb, w.w1 * proj[i].point);
        }

        // w4 (n_i . (z_i - p_i))^2
        if (w4 > 0.0) {
            const Vec3& nrm = *proj[i].normal;
            const Mat3 nn = nrm * nrm.transpose();
            sys.add_block(zb, zb, w4 * nn);
            sys.add_rhs(zb, w4 * nn * proj[i].point);
        }
    }

    if (w.tikhonov > 0.0) {
        sys.add_block(0, 0, w.tikhonov * id);
        // Without a position term the translation is only determined up to
        // the z null direction; regularize it, which pins t at exactly 0.
        if (w.w1 == 0.0 && w4 == 0.0) {
            sys.add_block(1, 1, w.tikhonov * id);
        }
    }
    return sys;
}

RigidStep step_rigid(const std::vector<Vec3>& x, const KdTree& tree, const RigidConfig& cfg) {
    const Weights w = effective_weights(cfg);
    StepOutcome out = run_step(x, tree, w, cfg.use_point_to_plane);
    return RigidStep{out.motion, std::move(out.z), out.energies};
}

RegistrationResult register_rigid(const std::vector<Vec3>& source, const KdTree& tree,
                                  const RigidConfig& cfg) {
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (cfg.stop_tol <= 0.0) {
        throw std::invalid_argument("stop_tol must be positive");
    }
    const Weights w = effective_weights(cfg);

    RegistrationResult result;
    result.final_points = source;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        StepOutcome out = run_step(result.final_points, tree, w, cfg.use_point_to_plane);

        const RigidTransform delta{rotation_from_small(out.motion.rotation),
                                   out.motion.translation};
        result.transform = compose(delta, result.transform);
        if (result.transform.orthogonality_error() > kOrthogonalityDrift) {
            result.transform.rotation = orthonormalized(result.transform.rotation);
        }

        IterationReport report;
        report.iter = iter;
        report.energies = out.energies;
        report.step_rot_norm = out.motion.rotation.norm();
        report.step_trans_norm = out.motion.translation.norm();
        report.rmsd_to_projection = out.rmsd;
        report.e_total_null = out.e_total_null;

        std::vector<Vec3> moved = transformed(result.transform, source);
        double max_disp = 0.0;
        for (std::size_t i = 0; i < moved.size(); ++i) {
            max_disp = std::max(max_disp, (moved[i] - result.final_points[i]).norm());
        }
        report.max_displacement = max_disp;
        result.final_points = std::move(moved);
        result.reports.push_back(report);

        if (out.motion.norm() < cfg.stop_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

RegistrationResult register_rigid(const std::vector<Vec3>& source,
                                  const std::vector<Vec3>& target, const RigidConfig& cfg) {
    std::vector<Vec3> normals;
    if (cfg.use_point_to_plane) {
        normals = estimate_normals(target, 12);
    }
    return register_rigid(source, KdTree(target, std::move(normals)), cfg);
}

KdTree make_target_tree(const Mesh& target, bool with_normals) {
    if (!with_normals) {
        return KdTree(target.vertices);
    }
    if (target.has_normals()) {
        return KdTree(target.vertices, target.normals);
    }
    const std::vector<Face>* faces = target.faces.empty() ? nullptr : &target.faces;
    return KdTree(target.vertices, estimate_normals(target.vertices, 12, faces));
}

}  // namespace surfreg
