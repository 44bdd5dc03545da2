#include "surfreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace surfreg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

/// sin(u)/u, stable through u = 0.
double sinc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

/// (1 - cos(u))/u^2, stable through u = 0.
double versinc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 0.5 - u2 / 24.0 + u2 * u2 / 720.0;
    }
    return (1.0 - std::cos(u)) / (u * u);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (std::uint64_t& word : state_) {
        word = splitmix64(sm);
    }
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Mesh make_sphere(int n_subdiv) {
    if (n_subdiv < 0 || n_subdiv > 6) {
        throw std::invalid_argument("sphere subdivision level must be in [0, 6]");
    }

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                     {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                     {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& v : mesh.vertices) {
        v.normalize();
    }
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int round = 0; round < n_subdiv; ++round) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            if (const auto it = midpoint.find(key); it != midpoint.end()) {
                return it->second;
            }
            const int idx = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };

        std::vector<Face> faces;
        faces.reserve(mesh.faces.size() * 4);
        for (const Face& f : mesh.faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            faces.push_back({f[0], ab, ca});
            faces.push_back({f[1], bc, ab});
            faces.push_back({f[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(faces);
    }
    return mesh;
}

Mesh make_grid(int nx, int ny, double spacing) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("grid needs at least 2 vertices per side");
    }
    Mesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.vertices.emplace_back(i * spacing, j * spacing, 0.0);
        }
    }
    mesh.faces.reserve(2 * static_cast<std::size_t>(nx - 1) * (ny - 1));
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int a = j * nx + i;
            const int b = j * nx + i + 1;
            const int c = (j + 1) * nx + i + 1;
            const int d = (j + 1) * nx + i;
            mesh.faces.push_back({a, b, c});
            mesh.faces.push_back({a, c, d});
        }
    }
    return mesh;
}

RigidTransform random_rigid(std::uint64_t seed, double max_angle_rad, double max_trans) {
    if (max_angle_rad < 0.0 || max_angle_rad > std::numbers::pi) {
        throw std::invalid_argument("max rotation angle must be in [0, pi]");
    }
    Rng rng(seed);
    const double axis_z = rng.uniform(-1.0, 1.0);
    const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double angle = max_angle_rad * rng.uniform();
    const double ring = std::sqrt(std::max(0.0, 1.0 - axis_z * axis_z));
    const Vec3 axis(ring * std::cos(azimuth), ring * std::sin(azimuth), axis_z);

    RigidTransform out;
    out.rotation = rotation_from_small(axis * angle);
    out.translation = Vec3(rng.uniform(-max_trans, max_trans),
                           rng.uniform(-max_trans, max_trans),
                           rng.uniform(-max_trans, max_trans));
    return out;
}

Mesh bend(const Mesh& mesh, double curvature) {
    double extent = 0.0;
    for (const Vec3& v : mesh.vertices) {
        extent = std::max(extent, std::abs(v.x()));
    }
    if (std::abs(curvature) * extent >= std::numbers::pi) {
        throw std::invalid_argument("bend would fold the surface onto itself");
    }

    Mesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const Vec3& v : mesh.vertices) {
        const double u = curvature * v.x();
        out.vertices.emplace_back(v.x() * sinc(u), v.y(),
                                  v.z() + curvature * v.x() * v.x() * versinc(u));
    }
    out.faces = mesh.faces;
    return out;
}

Mesh add_noise(const Mesh& mesh, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) {
        throw std::invalid_argument("noise sigma must be nonnegative");
    }
    Mesh out = mesh;
    if (sigma == 0.0) {
        return out;
    }
    Rng rng(seed);
    for (Vec3& v : out.vertices) {
        v.x() += sigma * rng.normal();
        v.y() += sigma * rng.normal();
        v.z() += sigma * rng.normal();
    }
    return out;
}

Scenario sphere_rigid_scenario(std::uint64_t seed) {
    Scenario s;
    s.name = "sphere-rigid";
    s.source = make_sphere(3);

    // Two defects of the raw icosphere, two fixes. The subdivision lattice
    // nearly maps onto itself under certain rotations, which traps
    // nearest-neighbor matching in self-consistent wrong optima: scatter the
    // vertices over the sphere to kill those coincidences. And an exact
    // sphere is rotationally symmetric, so only the sampling pattern would
    // resist a wrong rotation: a few smooth asymmetric lobes give matching
    // actual geometry to grip across the full 20-degree draw range. The
    // scatter stream is decorrelated from the motion draw below, which seeds
    // with the raw seed.
    Rng scatter(seed ^ 0x9e3779b97f4a7c15ULL);
    for (Vec3& v : s.source.vertices) {
        const Vec3 g(scatter.normal(), scatter.normal(), scatter.normal());
        v = (v + 0.1 * g).normalized();
        const double lobes = std::sin(2.3 * v.x() + 0.9) * std::sin(1.7 * v.y() - 0.4)
                           + std::sin(2.9 * v.z() + 1.6) * std::sin(1.3 * v.x() + 0.7);
        v *= 1.0 + 0.15 * lobes;
    }

    const double diag = bounding_box(s.source.vertices).diagonal();
    const double max_angle = 20.0 * std::numbers::pi / 180.0;
    s.ground_truth = random_rigid(seed, max_angle, 0.3 * diag);

    s.target.faces = s.source.faces;
    s.target.vertices.reserve(s.source.vertices.size());
    for (const Vec3& v : s.source.vertices) {
        s.target.vertices.push_back(s.ground_truth->apply(v));
    }
    return s;
}

Scenario bend_scenario(std::uint64_t seed) {
    (void)seed;
    Scenario s;
    s.name = "bend";
    s.source = make_grid(20, 20, 0.75);
    s.target = bend(s.source, 0.05);
    return s;
}

Scenario incline_scenario(std::uint64_t seed) {
    constexpr int kSide = 41;
    constexpr double kSpacing = 0.25;
    constexpr double kSlope = 0.5;
    constexpr double kWaveAmp = 0.12;
    constexpr double kWaveLen = 2.5;
    // In-plane scatter, as a fraction of one cell. A perfectly regular sheet
    // is useless here: nearest-neighbor matching snaps onto a shifted copy of
    // the lattice in one step and both solver variants stop immediately.
    constexpr double kJitter = 0.3;

    Scenario s;
    s.name = "incline";

    Mesh sheet = make_grid(kSide, kSide, kSpacing);
    // Scatter stream is decorrelated from the offset draw below, which seeds
    // with the raw seed. Draw order per vertex: x, y.
    Rng jitter(seed ^ 0x51ed270b1f2c4d00ULL);
    for (Vec3& v : sheet.vertices) {
        v.x() += kJitter * kSpacing * (2.0 * jitter.uniform() - 1.0);
        v.y() += kJitter * kSpacing * (2.0 * jitter.uniform() - 1.0);
        v.z() = kSlope * v.x()
              + kWaveAmp * std::sin(2.0 * std::numbers::pi * v.x() / kWaveLen);
    }

    // Mostly tangential displacement (a few cells along the mean plane) plus
    // a small offset along the mean-plane normal. Draw order: along-slope,
    // cross-slope, normal.
    Rng rng(seed);
    const double scale = std::sqrt(1.0 + kSlope * kSlope);
    const Vec3 tangent(1.0 / scale, 0.0, kSlope / scale);
    const Vec3 normal(-kSlope / scale, 0.0, 1.0 / scale);
    const Vec3 offset = kSpacing * 4.0 * (1.0 + rng.uniform()) * tangent
                      + Vec3(0.0, kSpacing * 4.0 * (1.0 + rng.uniform()), 0.0)
                      + kSpacing * 0.3 * (0.5 + rng.uniform()) * normal;

    RigidTransform gt;
    gt.translation = -offset;
    s.ground_truth = gt;

    s.source.faces = sheet.faces;
    s.target.faces = sheet.faces;
    for (const Vec3& v : sheet.vertices) {
        s.source.vertices.push_back(v + offset);
        s.target.vertices.push_back(gt.apply(s.source.vertices.back()));
    }
    return s;
}

}  // namespace surfreg
