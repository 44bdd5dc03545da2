#pragma once

// Shared fixtures and independent oracles. Everything here deliberately
// avoids the code paths under test: the dense solver is hand-rolled
// elimination rather than Eigen's, the rotation oracle goes through
// quaternions instead of the Rodrigues routine, and the finite-difference
// gradient only ever calls eval_energy.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include <Eigen/Dense>

#include "surfreg/energy.hpp"
#include "surfreg/graph.hpp"
#include "surfreg/mesh.hpp"
#include "surfreg/synth.hpp"

namespace testsupport {

using surfreg::AdjacencyGraph;
using surfreg::Mat3;
using surfreg::Mesh;
using surfreg::RegistrationState;
using surfreg::Vec3;
using surfreg::Weights;

// ---------------------------------------------------------------------------
// Rotation oracle: axis-angle through a unit quaternion.

inline Mat3 quaternion_rotation(const Vec3& r) {
    const double angle = r.norm();
    if (angle == 0.0) {
        return Mat3::Identity();
    }
    const Vec3 axis = r / angle;
    const double s = std::sin(angle / 2.0);
    const double w = std::cos(angle / 2.0);
    const double x = s * axis.x();
    const double y = s * axis.y();
    const double z = s * axis.z();
    Mat3 m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return m;
}

inline double rotation_angle_deg(const Mat3& m) {
    const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c) * 180.0 / 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Dense linear-solve oracle: Gaussian elimination with partial pivoting.

inline Eigen::VectorXd dense_elimination(Eigen::MatrixXd a, Eigen::VectorXd b) {
    const int n = static_cast<int>(a.rows());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int row = col + 1; row < n; ++row) {
            if (std::abs(a(row, col)) > best) {
                best = std::abs(a(row, col));
                pivot = row;
            }
        }
        if (best == 0.0) {
            throw std::runtime_error("oracle: singular matrix");
        }
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            std::swap(b(pivot), b(col));
        }
        for (int row = col + 1; row < n; ++row) {
            const double f = a(row, col) / a(col, col);
            if (f != 0.0) {
                a.row(row).segment(col, n - col) -= f * a.row(col).segment(col, n - col);
                b(row) -= f * b(col);
            }
        }
    }
    Eigen::VectorXd x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = b(row);
        for (int col = row + 1; col < n; ++col) {
            s -= a(row, col) * x(col);
        }
        x(row) = s / a(row, row);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient of the regularized surrogate.

/// The function the solver minimizes each step: the energy total plus the
/// Tikhonov ridge on the rotation unknowns.
inline double regularized_total(const RegistrationState& s, const AdjacencyGraph* graph,
                                const Weights& w) {
    double ridge = s.motion.rotation.squaredNorm();
    if (s.local_rotations) {
        for (const Vec3& r : *s.local_rotations) {
            ridge += r.squaredNorm();
        }
    }
    return surfreg::eval_energy(s, graph, w).e_total + w.tikhonov * ridge;
}

inline int state_dim(const RegistrationState& s) {
    return s.local_rotations ? 6 + 6 * s.size() : 6 + 3 * s.size();
}

/// Mutable access to the idx-th unknown in solver layout:
/// [r, t, (r_1..r_N when local), z_1..z_N].
inline double& state_slot(RegistrationState& s, int idx) {
    if (idx < 3) {
        return s.motion.rotation[idx];
    }
    if (idx < 6) {
        return s.motion.translation[idx - 3];
    }
    int rest = idx - 6;
    if (s.local_rotations) {
        const int n = s.size();
        if (rest < 3 * n) {
            return (*s.local_rotations)[rest / 3][rest % 3];
        }
        rest -= 3 * n;
    }
    return s.z[rest / 3][rest % 3];
}

inline Eigen::VectorXd fd_gradient(const RegistrationState& state, const AdjacencyGraph* graph,
                                   const Weights& w, double h = 1e-6) {
    RegistrationState s = state;
    const int dim = state_dim(s);
    Eigen::VectorXd g(dim);
    for (int idx = 0; idx < dim; ++idx) {
        double& slot = state_slot(s, idx);
        const double saved = slot;
        slot = saved + h;
        const double up = regularized_total(s, graph, w);
        slot = saved - h;
        const double down = regularized_total(s, graph, w);
        slot = saved;
        g(idx) = (up - down) / (2.0 * h);
    }
    return g;
}

/// True when every entry agrees within rel_tol relative with an abs_tol floor.
inline bool gradients_match(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd,
                            double rel_tol = 1e-6, double abs_tol = 1e-9) {
    if (analytic.size() != fd.size()) {
        return false;
    }
    for (int i = 0; i < analytic.size(); ++i) {
        const double diff = std::abs(analytic(i) - fd(i));
        const double scale = std::max(std::abs(analytic(i)), std::abs(fd(i)));
        if (diff > std::max(abs_tol, rel_tol * scale)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random instances.

/// Ring over all nodes plus `chords` random extra edges; always symmetric,
/// no self-loops, no isolated vertices.
inline AdjacencyGraph random_graph(int n, int chords, surfreg::Rng& rng) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        edges.emplace(std::min(i, j), std::max(i, j));
    }
    for (int c = 0; c < chords; ++c) {
        const int a = static_cast<int>(rng.uniform(0.0, n));
        const int b = static_cast<int>(rng.uniform(0.0, n));
        if (a != b) {
            edges.emplace(std::min(a, b), std::max(a, b));
        }
    }
    AdjacencyGraph g;
    g.node_count = n;
    g.neighbors.resize(n);
    for (const auto& [a, b] : edges) {
        g.neighbors[a].push_back(b);
        g.neighbors[b].push_back(a);
    }
    for (auto& nb : g.neighbors) {
        std::sort(nb.begin(), nb.end());
    }
    return g;
}

inline Vec3 random_vec(surfreg::Rng& rng, double scale = 1.0) {
    return Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                rng.uniform(-scale, scale));
}

inline Vec3 random_unit(surfreg::Rng& rng) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    while (v.norm() < 1e-6) {
        v = Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    return v.normalized();
}

inline RegistrationState random_state(int n, bool local, bool with_normals, surfreg::Rng& rng) {
    RegistrationState s;
    s.x.reserve(n);
    s.z.reserve(n);
    s.projections.reserve(n);
    for (int i = 0; i < n; ++i) {
        s.x.push_back(random_vec(rng));
        s.z.push_back(s.x.back() + 0.3 * random_vec(rng));
        surfreg::Projection p;
        p.point = s.x[i] + 0.3 * random_vec(rng);
        p.index = i;
        p.distance = (p.point - s.x[i]).norm();
        if (with_normals) {
            p.normal = random_unit(rng);
        }
        s.projections.push_back(p);
    }
    s.motion.rotation = 0.1 * random_vec(rng);
    s.motion.translation = 0.3 * random_vec(rng);
    if (local) {
        std::vector<Vec3> rots;
        rots.reserve(n);
        for (int i = 0; i < n; ++i) {
            rots.push_back(0.1 * random_vec(rng));
        }
        s.local_rotations = std::move(rots);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Mesh metrics.

inline std::vector<std::pair<int, int>> mesh_edges(const Mesh& mesh) {
    std::set<std::pair<int, int>> edges;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e];
            const int b = f[(e + 1) % 3];
            edges.emplace(std::min(a, b), std::max(a, b));
        }
    }
    return {edges.begin(), edges.end()};
}

/// Mean relative edge-length change of `points` against the mesh's rest
/// geometry.
inline double mean_edge_distortion(const Mesh& rest, const std::vector<Vec3>& points) {
    const auto edges = mesh_edges(rest);
    double sum = 0.0;
    for (const auto& [a, b] : edges) {
        const double l0 = (rest.vertices[a] - rest.vertices[b]).norm();
        const double l1 = (points[a] - points[b]).norm();
        sum += std::abs(l1 - l0) / l0;
    }
    return sum / static_cast<double>(edges.size());
}

// ---------------------------------------------------------------------------
// Subprocess driver for CLI tests.

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

/// Runs through the shell with stderr folded into stdout.
inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (pipe == nullptr) {
        throw std::runtime_error("popen failed for: " + command);
    }
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        result.output.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace testsupport
