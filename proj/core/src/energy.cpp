#include "surfreg/energy.hpp"

#include <stdexcept>

namespace surfreg {

namespace {

void check_state(const RegistrationState& s, const AdjacencyGraph* graph, const Weights& w) {
    const std::size_t n = s.x.size();
    if (n == 0) {
        throw std::invalid_argument("empty registration state");
    }
    if (s.z.size() != n || s.projections.size() != n) {
        throw std::invalid_argument("state array lengths disagree");
    }
    if (w.w3 > 0.0) {
        if (graph == nullptr) {
            throw std::invalid_argument("w3 > 0 requires an adjacency graph");
        }
        if (graph->node_count != static_cast<int>(n)) {
            throw std::invalid_argument("graph size does not match state");
        }
        if (!s.local_rotations || s.local_rotations->size() != n) {
            throw std::invalid_argument("w3 > 0 requires one local rotation per point");
        }
    }
    if (w.w4 > 0.0) {
        for (const Projection& p : s.projections) {
            if (!p.normal) {
                throw std::invalid_argument("w4 > 0 requires projection normals");
            }
        }
    }
}

}  // namespace

EnergyBreakdown eval_energy(const RegistrationState& s, const AdjacencyGraph* graph,
                            const Weights& w) {
    check_state(s, graph, w);
    const int n = s.size();

    EnergyBreakdown e;
    if (w.w1 > 0.0) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += (s.projections[i].point - s.z[i]).squaredNorm();
        }
        e.e_fit = w.w1 * sum;
    }
    if (w.w2 > 0.0) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec3 moved = s.x[i] + s.motion.rotation.cross(s.x[i]) + s.motion.translation;
            sum += (moved - s.z[i]).squaredNorm();
        }
        e.e_rigid = w.w2 * sum;
    }
    if (w.w3 > 0.0) {
        double sum = 0.0;
        const auto& rot = *s.local_rotations;
        for (int i = 0; i < n; ++i) {
            for (int k : graph->neighbors[i]) {
                const Vec3 d = s.x[k] - s.x[i];
                const Vec3 res = d + rot[i].cross(d) - (s.z[k] - s.z[i]);
                sum += res.squaredNorm();
            }
        }
        e.e_arap = w.w3 * sum;
    }
    if (w.w4 > 0.0) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double along = s.projections[i].normal->dot(s.projections[i].point - s.z[i]);
            sum += along * along;
        }
        e.e_plane = w.w4 * sum;
    }
    e.e_total = e.e_fit + e.e_rigid + e.e_arap + e.e_plane;
    return e;
}

Eigen::VectorXd eval_gradient(const RegistrationState& s, const AdjacencyGraph* graph,
                              const Weights& w) {
    check_state(s, graph, w);
    const int n = s.size();
    const bool local = s.local_rotations.has_value();
    const int dim = local ? 6 + 6 * n : 6 + 3 * n;
    const int z_base = local ? 6 + 3 * n : 6;

    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    auto r_slot = [&g]() { return g.segment<3>(0); };
    auto t_slot = [&g]() { return g.segment<3>(3); };
    auto ri_slot = [&](int i) { return g.segment<3>(6 + 3 * i); };
    auto z_slot = [&](int i) { return g.segment<3>(z_base + 3 * i); };

    if (w.w1 > 0.0) {
        for (int i = 0; i < n; ++i) {
            z_slot(i) += 2.0 * w.w1 * (s.z[i] - s.projections[i].point);
        }
    }
    if (w.w2 > 0.0) {
        for (int i = 0; i < n; ++i) {
            const Vec3 res =
                s.x[i] + s.motion.rotation.cross(s.x[i]) + s.motion.translation - s.z[i];
            r_slot() += 2.0 * w.w2 * s.x[i].cross(res);
            t_slot() += 2.0 * w.w2 * res;
            z_slot(i) -= 2.0 * w.w2 * res;
        }
    }
    if (w.w3 > 0.0) {
        const auto& rot = *s.local_rotations;
        for (int i = 0; i < n; ++i) {
            for (int k : graph->neighbors[i]) {
                const Vec3 d = s.x[k] - s.x[i];
                const Vec3 res = d + rot[i].cross(d) - (s.z[k] - s.z[i]);
                ri_slot(i) += 2.0 * w.w3 * d.cross(res);
                z_slot(i) += 2.0 * w.w3 * res;
                z_slot(k) -= 2.0 * w.w3 * res;
            }
        }
    }
    if (w.w4 > 0.0) {
        for (int i = 0; i < n; ++i) {
            const Vec3& normal = *s.projections[i].normal;
            const double along = normal.dot(s.z[i] - s.projections[i].point);
            z_slot(i) += 2.0 * w.w4 * along * normal;
        }
    }
    if (w.tikhonov > 0.0) {
        r_slot() += 2.0 * w.tikhonov * s.motion.rotation;
        if (local) {
            for (int i = 0; i < n; ++i) {
                ri_slot(i) += 2.0 * w.tikhonov * (*s.local_rotations)[i];
            }
        }
    }
    return g;
}

}  // namespace surfreg
