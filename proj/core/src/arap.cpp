#include "surfreg/arap.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "surfreg/normals.hpp"

namespace surfreg {

namespace {

constexpr double kOrthogonalityDrift = 1e-9;

Weights effective_weights(const ArapConfig& cfg) {
    Weights w = cfg.weights;
    if (!cfg.use_point_to_plane) {
        w.w4 = 0.0;
    }
    return w;
}

}  // namespace

BlockSystem assemble_arap(const std::vector<Vec3>& x, const std::vector<Projection>& proj,
                          const AdjacencyGraph& graph, const Weights& w, bool point_to_plane) {
    const int n = static_cast<int>(x.size());
    if (proj.size() != x.size()) {
        throw std::invalid_argument("projection count does not match point count");
    }
    if (graph.node_count != n) {
        throw std::invalid_argument("graph size does not match point count");
    }
    if (w.w3 <= 0.0) {
        throw std::invalid_argument("non-rigid assembly requires w3 > 0");
    }
    if (w.w2 < 0.0) {
        throw std::invalid_argument("w2 must be nonnegative");
    }
    if (point_to_plane) {
        for (const Projection& p : proj) {
            if (!p.normal) {
                throw std::invalid_argument("point-to-plane requires target normals");
            }
        }
    }

    BlockSystem sys(6 + 6 * n);
    const Mat3 id = Mat3::Identity();
    const double w4 = point_to_plane ? w.w4 : 0.0;
    auto rb = [](int i) { return 2 + i; };
    auto zb = [n](int i) { return 2 + n + i; };

    for (int i = 0; i < n; ++i) {
        // w2 |x_i - X_i r + t - z_i|^2
        if (w.w2 > 0.0) {
            const Mat3 xi = skew(x[i]);
            sys.add_block(0, 0, w.w2 * xi.transpose() * xi);
            sys.add_block(0, 1, w.w2 * xi);
            sys.add_block(1, 0, -w.w2 * xi);
            sys.add_block(0, zb(i), -w.w2 * xi);
            sys.add_block(zb(i), 0, w.w2 * xi);
            sys.add_block(1, 1, w.w2 * id);
            sys.add_block(1, zb(i), -w.w2 * id);
            sys.add_block(zb(i), 1, -w.w2 * id);
            sys.add_block(zb(i), zb(i), w.w2 * id);
            sys.add_rhs(1, -w.w2 * x[i]);
            sys.add_rhs(zb(i), w.w2 * x[i]);
        }

        // w1 |z_i - p_i|^2
        if (w.w1 > 0.0) {
            sys.add_block(zb(i), zb(i), w.w1 * id);
            sys.add_rhs(zb(i), w.w1 * proj[i].point);
        }

        // w4 (n_i . (z_i - p_i))^2
        if (w4 > 0.0) {
            const Vec3& nrm = *proj[i].normal;
            const Mat3 nn = nrm * nrm.transpose();
            sys.add_block(zb(i), zb(i), w4 * nn);
            sys.add_rhs(zb(i), w4 * nn * proj[i].point);
        }

        // w3 |d_ik - D_ik r_i - (z_k - z_i)|^2 over the neighborhood of i
        for (int k : graph.neighbors[i]) {
            const Vec3 d = x[k] - x[i];
            const Mat3 dk = skew(d);
            sys.add_block(rb(i), rb(i), w.w3 * dk.transpose() * dk);
            sys.add_block(rb(i), zb(i), w.w3 * dk);
            sys.add_block(zb(i), rb(i), -w.w3 * dk);
            sys.add_block(rb(i), zb(k), -w.w3 * dk);
            sys.add_block(zb(k), rb(i), w.w3 * dk);
            sys.add_block(zb(i), zb(i), w.w3 * id);
            sys.add_block(zb(k), zb(k), w.w3 * id);
            sys.add_block(zb(i), zb(k), -w.w3 * id);
            sys.add_block(zb(k), zb(i), -w.w3 * id);
            sys.add_rhs(zb(i), -w.w3 * d);
            sys.add_rhs(zb(k), w.w3 * d);
        }
    }

    if (w.tikhonov > 0.0) {
        sys.add_block(0, 0, w.tikhonov * id);
        for (int i = 0; i < n; ++i) {
            sys.add_block(rb(i), rb(i), w.tikhonov * id);
        }
        // The global translation decouples when w2 = 0 and drifts along the
        // all-points direction when nothing pins z; both cases solve to t = 0
        // once regularized.
        if (w.w2 == 0.0 || (w.w1 == 0.0 && w4 == 0.0)) {
            sys.add_block(1, 1, w.tikhonov * id);
        }
    }
    return sys;
}

RegistrationResult register_arap(const Mesh& source, const KdTree& tree, const ArapConfig& cfg) {
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (cfg.stop_tol <= 0.0) {
        throw std::invalid_argument("stop_tol must be positive");
    }
    const int n = static_cast<int>(source.vertices.size());
    if (n < 3) {
        throw std::invalid_argument("underdetermined: non-rigid registration needs at least 3 points");
    }
    const Weights w = effective_weights(cfg);
    const AdjacencyGraph graph = build_laplacian(source);

    RegistrationResult result;
    result.final_points = source.vertices;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        RegistrationState state;
        state.x = result.final_points;
        state.projections.reserve(n);
        for (const Vec3& p : state.x) {
            state.projections.push_back(tree.project(p));
        }

        BlockSystem sys = assemble_arap(state.x, state.projections, graph, w,
                                        cfg.use_point_to_plane);
        const SolveReport solved = sys.solve();

        SmallMotion motion;
        motion.rotation = solved.solution.segment<3>(0);
        motion.translation = solved.solution.segment<3>(3);
        std::vector<Vec3> rotations(n);
        std::vector<Vec3> z(n);
        for (int i = 0; i < n; ++i) {
            rotations[i] = solved.solution.segment<3>(6 + 3 * i);
            z[i] = solved.solution.segment<3>(6 + 3 * n + 3 * i);
        }

        state.z = z;
        state.motion = motion;
        state.local_rotations = std::move(rotations);
        const EnergyBreakdown energies = eval_energy(state, &graph, w);

        double sq = 0.0;
        double max_disp = 0.0;
        for (int i = 0; i < n; ++i) {
            sq += (state.projections[i].point - z[i]).squaredNorm();
            max_disp = std::max(max_disp, (z[i] - state.x[i]).norm());
        }

        state.z = state.x;
        state.motion = SmallMotion{};
        state.local_rotations->assign(n, Vec3::Zero());
        const double e_null = eval_energy(state, &graph, w).e_total;

        const RigidTransform delta{rotation_from_small(motion.rotation), motion.translation};
        result.transform = compose(delta, result.transform);
        if (result.transform.orthogonality_error() > kOrthogonalityDrift) {
            result.transform.rotation = orthonormalized(result.transform.rotation);
        }

        IterationReport report;
        report.iter = iter;
        report.energies = energies;
        report.step_rot_norm = motion.rotation.norm();
        report.step_trans_norm = motion.translation.norm();
        report.rmsd_to_projection = std::sqrt(sq / n);
        report.e_total_null = e_null;
        report.max_displacement = max_disp;
        result.reports.push_back(report);

        result.final_points = std::move(z);
        if (max_disp < cfg.stop_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

RegistrationResult register_arap(const Mesh& source, const std::vector<Vec3>& target,
                                 const ArapConfig& cfg) {
    std::vector<Vec3> normals;
    if (cfg.use_point_to_plane) {
        normals = estimate_normals(target, 12);
    }
    return register_arap(source, KdTree(target, std::move(normals)), cfg);
}

}  // namespace surfreg
