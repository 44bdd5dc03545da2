#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "support.hpp"
#include "surfreg/rigid.hpp"
#include "surfreg/synth.hpp"

using surfreg::Mesh;
using surfreg::RigidTransform;
using surfreg::Scenario;
using surfreg::Vec3;

TEST_CASE("icosphere counts and radius") {
    const Mesh ico = surfreg::make_sphere(0);
    CHECK(ico.vertices.size() == 12);
    CHECK(ico.faces.size() == 20);

    const Mesh once = surfreg::make_sphere(1);
    CHECK(once.vertices.size() == 42);
    CHECK(once.faces.size() == 80);

    const Mesh thrice = surfreg::make_sphere(3);
    CHECK(thrice.vertices.size() == 10 * 64 + 2);

    for (const Vec3& v : thrice.vertices) {
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }

    // Same arguments, same bytes.
    const Mesh again = surfreg::make_sphere(3);
    CHECK(again.vertices == thrice.vertices);
    CHECK(again.faces == thrice.faces);

    CHECK_THROWS_AS(surfreg::make_sphere(7), std::invalid_argument);
    CHECK_THROWS_AS(surfreg::make_sphere(-1), std::invalid_argument);
}

TEST_CASE("grid layout") {
    const Mesh tiny = surfreg::make_grid(2, 2, 1.0);
    CHECK(tiny.vertices.size() == 4);
    CHECK(tiny.faces.size() == 2);

    const Mesh nine = surfreg::make_grid(3, 3, 0.5);
    CHECK(nine.vertices.size() == 9);
    CHECK(nine.faces.size() == 8);
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            CHECK(nine.vertices[j * 3 + i] == Vec3(0.5 * i, 0.5 * j, 0.0));
        }
    }

    const Mesh wide = surfreg::make_grid(7, 4, 1.0);
    CHECK(wide.faces.size() == 2 * 6 * 3);
    surfreg::validate(wide);

    CHECK_THROWS_AS(surfreg::make_grid(1, 5, 1.0), std::invalid_argument);
}

TEST_CASE("random rigid draws") {
    const RigidTransform still = surfreg::random_rigid(123, 0.0, 0.0);
    CHECK(still.rotation == surfreg::Mat3::Identity());
    CHECK(still.translation == Vec3::Zero());

    const RigidTransform a = surfreg::random_rigid(42, 0.5, 2.0);
    const RigidTransform b = surfreg::random_rigid(42, 0.5, 2.0);
    CHECK(a.rotation == b.rotation);
    CHECK(a.translation == b.translation);
    CHECK(surfreg::random_rigid(43, 0.5, 2.0).translation != a.translation);

    const double max_angle = 0.7;
    const double max_trans = 1.5;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const RigidTransform t = surfreg::random_rigid(seed, max_angle, max_trans);
        CHECK(t.is_rigid(1e-9));
        const double angle =
            testsupport::rotation_angle_deg(t.rotation) * 3.14159265358979323846 / 180.0;
        CHECK(angle <= max_angle + 1e-9);
        CHECK(t.translation.cwiseAbs().maxCoeff() <= max_trans);
    }

    CHECK_THROWS_AS(surfreg::random_rigid(1, 4.0, 0.0), std::invalid_argument);
}

TEST_CASE("bend is a gentle isometry") {
    const Mesh grid = surfreg::make_grid(5, 5, 1.0);

    const Mesh barely = surfreg::bend(grid, 1e-12);
    for (std::size_t i = 0; i < grid.vertices.size(); ++i) {
        CHECK((barely.vertices[i] - grid.vertices[i]).norm() < 1e-9);
    }

    const Mesh tiny = surfreg::make_grid(2, 2, 1.0);
    const Mesh bent = surfreg::bend(tiny, 0.1);
    for (const auto& [a, b] : testsupport::mesh_edges(tiny)) {
        const double before = (tiny.vertices[a] - tiny.vertices[b]).norm();
        const double after = (bent.vertices[a] - bent.vertices[b]).norm();
        CHECK(std::abs(after - before) / before < 0.01);
    }

    // The origin is a fixed point of the cylinder map at any curvature.
    const Mesh hard = surfreg::bend(grid, 0.7);
    CHECK(hard.vertices[0] == Vec3(0, 0, 0));

    CHECK_THROWS_AS(surfreg::bend(grid, 1.0), std::invalid_argument);
}

TEST_CASE("noise is deterministic and calibrated") {
    const Mesh grid = surfreg::make_grid(200, 170, 0.1);

    const Mesh clean = surfreg::add_noise(grid, 0.0, 99);
    CHECK(clean.vertices == grid.vertices);

    const Mesh a = surfreg::add_noise(grid, 0.7, 99);
    const Mesh b = surfreg::add_noise(grid, 0.7, 99);
    CHECK(a.vertices == b.vertices);
    CHECK(a.faces == grid.faces);
    CHECK(surfreg::add_noise(grid, 0.7, 100).vertices != a.vertices);

    double sum = 0.0;
    double sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.vertices.size(); ++i) {
        const Vec3 d = a.vertices[i] - grid.vertices[i];
        for (int c = 0; c < 3; ++c) {
            sum += d[c];
            sq += d[c] * d[c];
            ++count;
        }
    }
    REQUIRE(count >= 100000);
    const double mean = sum / static_cast<double>(count);
    const double stddev = std::sqrt(sq / static_cast<double>(count) - mean * mean);
    CHECK(std::abs(stddev - 0.7) / 0.7 < 0.02);
}

TEST_CASE("rng stream basics") {
    surfreg::Rng a(7);
    surfreg::Rng b(7);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }

    surfreg::Rng u(11);
    double lo = 1.0;
    double hi = 0.0;
    double mean = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        mean += x;
    }
    mean /= draws;
    CHECK(std::abs(mean - 0.5) < 0.01);
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);

    surfreg::Rng g(13);
    double gsum = 0.0;
    double gsq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = g.normal();
        gsum += x;
        gsq += x * x;
    }
    const double gmean = gsum / draws;
    CHECK(std::abs(gmean) < 0.02);
    CHECK(std::abs(std::sqrt(gsq / draws - gmean * gmean) - 1.0) < 0.02);
}

TEST_CASE("sphere scenario carries an exact ground truth") {
    const Scenario s = surfreg::sphere_rigid_scenario(5);
    CHECK(s.name == "sphere-rigid");
    REQUIRE(s.ground_truth.has_value());
    CHECK(s.ground_truth->is_rigid(1e-9));
    CHECK(s.source.vertices.size() == 642);
    REQUIRE(s.target.vertices.size() == s.source.vertices.size());

    for (std::size_t i = 0; i < s.source.vertices.size(); ++i) {
        CHECK(s.target.vertices[i] == s.ground_truth->apply(s.source.vertices[i]));
    }

    const Scenario again = surfreg::sphere_rigid_scenario(5);
    CHECK(again.source.vertices == s.source.vertices);
    CHECK(again.target.vertices == s.target.vertices);
    CHECK(again.ground_truth->rotation == s.ground_truth->rotation);

    const Scenario other = surfreg::sphere_rigid_scenario(6);
    CHECK(other.ground_truth->translation != s.ground_truth->translation);
}

TEST_CASE("bend scenario is seed-free and non-rigid") {
    const Scenario s = surfreg::bend_scenario(1);
    CHECK(s.name == "bend");
    CHECK(!s.ground_truth.has_value());
    CHECK(s.source.vertices.size() == 400);
    for (const Vec3& v : s.source.vertices) {
        CHECK(v.z() == 0.0);
    }
    bool off_plane = false;
    for (const Vec3& v : s.target.vertices) {
        off_plane = off_plane || v.z() != 0.0;
    }
    CHECK(off_plane);

    const Scenario t = surfreg::bend_scenario(2);
    CHECK(t.source.vertices == s.source.vertices);
    CHECK(t.target.vertices == s.target.vertices);
}

TEST_CASE("incline scenario: offset sheet with a usable ground truth") {
    const Scenario s = surfreg::incline_scenario(12);
    CHECK(s.name == "incline");
    REQUIRE(s.ground_truth.has_value());
    CHECK(s.ground_truth->is_rigid(1e-9));

    // Ground truth maps source onto target; its inverse undoes it.
    const RigidTransform inv = s.ground_truth->inverse();
    double initial = 0.0;
    for (std::size_t i = 0; i < s.source.vertices.size(); ++i) {
        const Vec3 v = s.source.vertices[i];
        CHECK((inv.apply(s.ground_truth->apply(v)) - v).norm() < 1e-12);
        initial += (s.ground_truth->apply(v) - v).squaredNorm();
    }
    CHECK(std::sqrt(initial / static_cast<double>(s.source.vertices.size())) > 0.0);

    for (std::size_t i = 0; i < s.source.vertices.size(); ++i) {
        CHECK(s.target.vertices[i] == s.ground_truth->apply(s.source.vertices[i]));
    }

    const Scenario again = surfreg::incline_scenario(12);
    CHECK(again.source.vertices == s.source.vertices);
    CHECK(again.target.vertices == s.target.vertices);
}

TEST_CASE("point-to-plane converges no slower on the incline") {
    const Scenario s = surfreg::incline_scenario(12);
    const surfreg::KdTree tree = surfreg::make_target_tree(s.target, true);

    surfreg::RigidConfig p2p;
    p2p.max_iters = 200;
    const auto point_run = surfreg::register_rigid(s.source.vertices, tree, p2p);
    REQUIRE(point_run.converged);

    surfreg::RigidConfig plane = p2p;
    plane.use_point_to_plane = true;
    plane.weights.w4 = 1.0;
    const auto plane_run = surfreg::register_rigid(s.source.vertices, tree, plane);
    REQUIRE(plane_run.converged);

    CHECK(plane_run.reports.size() <= point_run.reports.size());
}
