#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>
#include <vector>

#include "surfreg/geometry.hpp"

namespace surfreg {

/// Thrown when a solve cannot meet the residual contract. The message carries
/// a pivot-ratio diagnostic so callers can tell "singular" from "merely awful".
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

struct SolveReport {
    Eigen::VectorXd solution;
    double residual_norm = 0.0;
    /// "direct" (sparse LDLT) or "iterative" (conjugate gradient).
    std::string method;
    double factor_time = 0.0;
    double solve_time = 0.0;
};

/// Square sparse system accumulated from 3x3 blocks. Duplicate block
/// insertions sum, so assembly code can scatter contributions term by term.
class BlockSystem {
public:
    /// dim must be a positive multiple of 3.
    explicit BlockSystem(int dim);

    int dim() const { return dim_; }
    int block_count() const { return dim_ / 3; }

    /// Accumulates m into the 3x3 slot at (block_row, block_col).
    void add_block(int block_row, int block_col, const Mat3& m);

    /// Accumulates v into the rhs slot at block_row.
    void add_rhs(int block_row, const Vec3& v);

    const Eigen::VectorXd& rhs() const { return rhs_; }

    /// Materializes A from the accumulated triplets.
    Eigen::SparseMatrix<double> matrix() const;

    /// Solves A x = b with ||Ax - b|| <= 1e-8 * max(1, ||b||). Uses a direct
    /// factorization up to dim 50000 and conjugate gradient beyond; throws
    /// SingularSystemError when the contract cannot be met.
    SolveReport solve() const;

private:
    int dim_;
    std::vector<Eigen::Triplet<double>> triplets_;
    Eigen::VectorXd rhs_;
};

}  // namespace surfreg
