#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "surfreg/geometry.hpp"
#include "surfreg/mesh.hpp"

namespace surfreg {

/// xoshiro256** seeded through splitmix64. Hand-rolled on purpose: scenario
/// bytes must be reproducible across platforms and standard-library vendors,
/// which std::normal_distribution does not guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller; generates pairs and caches the spare.
    double normal();

private:
    std::array<std::uint64_t, 4> state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Icosphere: n_subdiv rounds of 4-way subdivision of an icosahedron, all
/// vertices normalized to radius 1. Vertex count is 10 * 4^n + 2. n_subdiv
/// must be in [0, 6].
Mesh make_sphere(int n_subdiv);

/// Planar z=0 grid, vertex (i, j) at (i*spacing, j*spacing, 0) with index
/// j*nx + i, two triangles per cell. nx, ny >= 2.
Mesh make_grid(int nx, int ny, double spacing);

/// Uniform random rotation axis and angle in [0, max_angle_rad], translation
/// components uniform in [-max_trans, max_trans]. Draw order: axis z, axis
/// azimuth, angle, t.x, t.y, t.z.
RigidTransform random_rigid(std::uint64_t seed, double max_angle_rad, double max_trans);

/// Cylindrical bend about the y axis: x -> sin(kx)/k, z -> z + (1-cos(kx))/k,
/// evaluated series-safely near k = 0. Isometric along x, so edge lengths are
/// preserved to O(h^2). Requires |curvature| * max|x| < pi (no self-fold).
/// Stored normals are dropped; the bent geometry invalidates them.
Mesh bend(const Mesh& mesh, double curvature);

/// Adds N(0, sigma^2) noise per coordinate. Draw order: vertex 0 x, y, z,
/// then vertex 1, and so on. Faces and normals are copied unchanged.
Mesh add_noise(const Mesh& mesh, double sigma, std::uint64_t seed);

struct Scenario {
    Mesh source;
    Mesh target;
    std::optional<RigidTransform> ground_truth;
    std::string name;
};

/// Lumpy sphere (icosphere n_subdiv 3, 642 vertices, radius modulated by
/// smooth asymmetric lobes) under a random rigid motion of at most 20
/// degrees and 0.3 bounding-box diagonals. target = ground_truth applied to
/// source, bitwise.
Scenario sphere_rigid_scenario(std::uint64_t seed);

/// Flat 20x20 grid source (spacing 0.75), target bent with curvature 0.05.
/// Non-rigid, so no ground-truth transform; the geometry does not depend on
/// the seed.
Scenario bend_scenario(std::uint64_t seed);

/// Inclined, gently corrugated sheet with irregular in-plane sampling;
/// source is the same sheet translated a few cells along its mean plane plus
/// a small offset along the mean-plane normal. The classic setup where the
/// point-to-plane term speeds up convergence.
Scenario incline_scenario(std::uint64_t seed);

}  // namespace surfreg
