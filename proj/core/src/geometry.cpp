#include "surfreg/geometry.hpp"

#include <cmath>

namespace surfreg {

Mat3 skew(const Vec3& v) {
    Mat3 m;
    // clang-format off
    m <<     0.0, -v.z(),  v.y(),
           v.z(),    0.0, -v.x(),
          -v.y(),  v.x(),    0.0;
    // clang-format on
    return m;
}

Mat3 rotation_from_small(const Vec3& r) {
    const double theta2 = r.squaredNorm();
    const Mat3 k = skew(r);
    double a;  // sin(t)/t
    double b;  // (1 - cos(t))/t^2
    if (theta2 < 1e-8) {
        // Below theta ~ 1e-4 the closed forms lose digits; the truncated
        // series is exact to machine precision there.
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
        const double theta = std::sqrt(theta2);
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    return Mat3::Identity() + a * k + b * (k * k);
}

Mat3 orthonormalized(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
}

double RigidTransform::orthogonality_error() const {
    const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
    return gram.cwiseAbs().maxCoeff();
}

bool RigidTransform::is_rigid(double tol) const {
    return orthogonality_error() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
    RigidTransform out;
    out.rotation = outer.rotation * inner.rotation;
    out.translation = outer.rotation * inner.translation + outer.translation;
    return out;
}

}  // namespace surfreg
