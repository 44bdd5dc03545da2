#include "surfreg/block_system.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace surfreg {

namespace {

constexpr int kDirectDimLimit = 50000;
constexpr double kResidualFactor = 1e-8;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

[[noreturn]] void throw_singular(double residual, double bound, const std::string& diagnostic) {
    std::ostringstream msg;
    msg << "singular system: residual " << residual << " exceeds bound " << bound << " ("
        << diagnostic << ")";
    throw SingularSystemError(msg.str());
}

}  // namespace

BlockSystem::BlockSystem(int dim) : dim_(dim) {
    if (dim <= 0 || dim % 3 != 0) {
        throw std::invalid_argument("system dimension must be a positive multiple of 3");
    }
    rhs_ = Eigen::VectorXd::Zero(dim);
}

void BlockSystem::add_block(int block_row, int block_col, const Mat3& m) {
    if (block_row < 0 || block_col < 0 || 3 * block_row + 2 >= dim_ || 3 * block_col + 2 >= dim_) {
        throw std::out_of_range("block index outside system");
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            if (m(a, b) != 0.0) {
                triplets_.emplace_back(3 * block_row + a, 3 * block_col + b, m(a, b));
            }
        }
    }
}

void BlockSystem::add_rhs(int block_row, const Vec3& v) {
    if (block_row < 0 || 3 * block_row + 2 >= dim_) {
        throw std::out_of_range("rhs block index outside system");
    }
    rhs_.segment<3>(3 * block_row) += v;
}

Eigen::SparseMatrix<double> BlockSystem::matrix() const {
    Eigen::SparseMatrix<double> a(dim_, dim_);
    a.setFromTriplets(triplets_.begin(), triplets_.end());
    a.makeCompressed();
    return a;
}

SolveReport BlockSystem::solve() const {
    const Eigen::SparseMatrix<double> a = matrix();
    const double bound = kResidualFactor * std::max(1.0, rhs_.norm());

    SolveReport report;
    std::string diagnostic;
    if (dim_ <= kDirectDimLimit) {
        report.method = "direct";
        const auto t0 = std::chrono::steady_clock::now();
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
        report.factor_time = seconds_since(t0);
        if (ldlt.info() != Eigen::Success) {
            throw SingularSystemError("singular system: factorization failed (structurally "
                                      "singular or indefinite beyond tolerance)");
        }
        const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
        const double d_min = d.minCoeff();
        const double ratio = d_min > 0.0 ? d.maxCoeff() / d_min
                                         : std::numeric_limits<double>::infinity();
        std::ostringstream diag;
        diag << "pivot ratio " << ratio;
        diagnostic = diag.str();
        const auto t1 = std::chrono::steady_clock::now();
        report.solution = ldlt.solve(rhs_);
        report.solve_time = seconds_since(t1);
    } else {
        report.method = "iterative";
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setMaxIterations(20 * dim_);
        // CG's stop rule is relative to ||b||; tighten so the absolute
        // contract below still holds when ||b|| < 1.
        cg.setTolerance(0.1 * bound / std::max(rhs_.norm(), 1e-300));
        const auto t0 = std::chrono::steady_clock::now();
        cg.compute(a);
        report.factor_time = seconds_since(t0);
        const auto t1 = std::chrono::steady_clock::now();
        report.solution = cg.solve(rhs_);
        report.solve_time = seconds_since(t1);
        std::ostringstream diag;
        diag << "cg relative error " << cg.error() << " after " << cg.iterations()
             << " iterations";
        diagnostic = diag.str();
    }

    report.residual_norm = (a * report.solution - rhs_).norm();
    if (!std::isfinite(report.residual_norm) || report.residual_norm > bound) {
        throw_singular(report.residual_norm, bound, diagnostic);
    }
    return report;
}

}  // namespace surfreg
