#include <doctest.h>

#include <stdexcept>

#include "support.hpp"
#include "surfreg/arap.hpp"
#include "surfreg/block_system.hpp"
#include "surfreg/rigid.hpp"
#include "surfreg/synth.hpp"

using surfreg::BlockSystem;
using surfreg::Mat3;
using surfreg::SolveReport;
using surfreg::Vec3;
using surfreg::Weights;

TEST_CASE("dimension must be a positive multiple of three") {
    CHECK_THROWS_AS(BlockSystem(0), std::invalid_argument);
    CHECK_THROWS_AS(BlockSystem(-3), std::invalid_argument);
    CHECK_THROWS_AS(BlockSystem(7), std::invalid_argument);
    CHECK(BlockSystem(6 + 3 * 2).dim() == 12);
    CHECK(BlockSystem(6 + 6 * 2).dim() == 18);
}

TEST_CASE("duplicate block insertions sum") {
    BlockSystem sys(6);
    sys.add_block(0, 0, Mat3::Identity());
    sys.add_block(0, 0, Mat3::Identity());
    const Eigen::MatrixXd a = Eigen::MatrixXd(sys.matrix());
    CHECK((a.block<3, 3>(0, 0) - 2.0 * Mat3::Identity()).norm() == 0.0);
    CHECK(a.block<3, 3>(3, 3).norm() == 0.0);
}

TEST_CASE("block indices are range-checked") {
    BlockSystem sys(9);
    CHECK_THROWS_AS(sys.add_block(3, 0, Mat3::Identity()), std::out_of_range);
    CHECK_THROWS_AS(sys.add_block(0, 3, Mat3::Identity()), std::out_of_range);
    CHECK_THROWS_AS(sys.add_block(-1, 0, Mat3::Identity()), std::out_of_range);
    CHECK_THROWS_AS(sys.add_rhs(3, Vec3::Zero()), std::out_of_range);
}

TEST_CASE("identity system returns the rhs") {
    BlockSystem sys(6);
    sys.add_block(0, 0, Mat3::Identity());
    sys.add_block(1, 1, Mat3::Identity());
    sys.add_rhs(0, Vec3(1, 2, 3));
    sys.add_rhs(1, Vec3(4, 5, 6));
    const SolveReport report = sys.solve();
    CHECK(report.method == "direct");
    Eigen::VectorXd expected(6);
    expected << 1, 2, 3, 4, 5, 6;
    CHECK((report.solution - expected).norm() < 1e-12);
    CHECK(report.residual_norm < 1e-8 * expected.norm());
}

TEST_CASE("random SPD system matches the elimination oracle") {
    surfreg::Rng rng(301);
    const int blocks = 10;
    Eigen::MatrixXd g(3 * blocks, 3 * blocks);
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            g(r, c) = rng.uniform(-1.0, 1.0);
        }
    }
    const Eigen::MatrixXd spd =
        g.transpose() * g + Eigen::MatrixXd::Identity(3 * blocks, 3 * blocks);

    BlockSystem sys(3 * blocks);
    for (int br = 0; br < blocks; ++br) {
        for (int bc = 0; bc < blocks; ++bc) {
            sys.add_block(br, bc, spd.block<3, 3>(3 * br, 3 * bc));
        }
        sys.add_rhs(br, testsupport::random_vec(rng, 2.0));
    }

    const SolveReport report = sys.solve();
    const Eigen::VectorXd oracle = testsupport::dense_elimination(spd, sys.rhs());
    CHECK((report.solution - oracle).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(report.residual_norm <= 1e-8 * std::max(1.0, sys.rhs().norm()));
}

TEST_CASE("pure regularizer divides the rhs by the ridge") {
    // What rigid assembly produces from all-zero data: nothing but the
    // Tikhonov diagonal.
    const double tik = 1e-6;
    BlockSystem sys(9);
    for (int b = 0; b < 3; ++b) {
        sys.add_block(b, b, tik * Mat3::Identity());
    }
    surfreg::Rng rng(302);
    Eigen::VectorXd b(9);
    for (int i = 0; i < 9; ++i) {
        b(i) = rng.uniform(-1.0, 1.0);
        sys.add_rhs(i / 3, Vec3::Unit(i % 3) * b(i));
    }
    const SolveReport report = sys.solve();
    CHECK(((report.solution - b / tik).cwiseAbs().array() / (b / tik).cwiseAbs().array())
              .maxCoeff() < 1e-9);
}

TEST_CASE("structurally singular systems are reported") {
    BlockSystem sys(6);
    sys.add_rhs(0, Vec3(1, 0, 0));
    CHECK_THROWS_AS(sys.solve(), surfreg::SingularSystemError);
}

TEST_CASE("assembled registration systems are symmetric") {
    surfreg::Rng rng(303);
    Weights w;
    w.w3 = 0.8;
    w.w4 = 0.5;

    const auto state = testsupport::random_state(8, true, true, rng);
    const auto graph = testsupport::random_graph(8, 4, rng);

    const Eigen::MatrixXd rigid_a = Eigen::MatrixXd(
        surfreg::assemble_rigid(state.x, state.projections, w, true).matrix());
    CHECK((rigid_a - rigid_a.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd arap_a = Eigen::MatrixXd(
        surfreg::assemble_arap(state.x, state.projections, graph, w, true).matrix());
    CHECK((arap_a - arap_a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sparse solve equals the dense oracle on assembled systems") {
    surfreg::Rng rng(304);
    for (const int n : {3, 5}) {
        Weights w;
        w.w3 = 1.0;
        const auto state = testsupport::random_state(n, true, false, rng);
        const auto graph = testsupport::random_graph(n, 2, rng);

        BlockSystem rigid_sys = surfreg::assemble_rigid(state.x, state.projections, w, false);
        const Eigen::VectorXd rigid_oracle = testsupport::dense_elimination(
            Eigen::MatrixXd(rigid_sys.matrix()), rigid_sys.rhs());
        CHECK((rigid_sys.solve().solution - rigid_oracle).cwiseAbs().maxCoeff() < 1e-9);

        BlockSystem arap_sys =
            surfreg::assemble_arap(state.x, state.projections, graph, w, false);
        const Eigen::VectorXd arap_oracle = testsupport::dense_elimination(
            Eigen::MatrixXd(arap_sys.matrix()), arap_sys.rhs());
        CHECK((arap_sys.solve().solution - arap_oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("solving lands on the stationary point of the surrogate") {
    surfreg::Rng rng(305);
    Weights w;
    w.w4 = 1.0;
    auto state = testsupport::random_state(6, false, true, rng);

    BlockSystem sys = surfreg::assemble_rigid(state.x, state.projections, w, true);
    const Eigen::VectorXd x = sys.solve().solution;

    state.motion.rotation = x.segment<3>(0);
    state.motion.translation = x.segment<3>(3);
    for (int i = 0; i < state.size(); ++i) {
        state.z[i] = x.segment<3>(6 + 3 * i);
    }
    const Eigen::VectorXd g = surfreg::eval_gradient(state, nullptr, w);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-8);
}
