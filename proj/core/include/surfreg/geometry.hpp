#pragma once

#include <Eigen/Dense>

namespace surfreg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Cross-product matrix: skew(v) * w == v.cross(w) for every w.
Mat3 skew(const Vec3& v);

/// Exact rotation for a rotation vector (angle = |r|, axis = r / |r|).
/// Series-safe near r = 0; the result is orthogonal with determinant +1.
Mat3 rotation_from_small(const Vec3& r);

/// Nearest rotation matrix in the Frobenius sense (polar projection).
Mat3 orthonormalized(const Mat3& m);

/// One solver step of motion: linearized rotation vector plus translation.
struct SmallMotion {
    Vec3 rotation = Vec3::Zero();
    Vec3 translation = Vec3::Zero();

    double norm() const { return rotation.norm() + translation.norm(); }
};

struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    RigidTransform inverse() const;

    /// max-norm of R^T R - I; zero for an exact rotation.
    double orthogonality_error() const;
    bool is_rigid(double tol = 1e-9) const;
};

/// Applies `inner` first, then `outer`.
RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);

}  // namespace surfreg
