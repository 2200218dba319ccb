#include "servotrack/kinematics.hpp"

#include <cmath>

namespace servotrack {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool Transform::is_rigid(double tol) const {
    const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(rotation.determinant() - 1.0) > tol) return false;
    return translation.allFinite();
}

Eigen::Vector3d Pose::canonicalize_axis_angle(const Eigen::Vector3d& o) {
    double theta = o.norm();
    if (theta < 1e-15) return Eigen::Vector3d::Zero();
    Eigen::Vector3d axis = o / theta;
    // Fold the angle into [0, pi] (2*pi periodic, negative angle flips axis).
    theta = std::fmod(theta, 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;
    if (theta > kPi) {
        theta = 2.0 * kPi - theta;
        axis = -axis;
    }
    if (std::abs(theta - kPi) < 1e-12) {
        // Antipodal pair: fix the representative by axis sign.
        for (int i = 0; i < 3; ++i) {
            if (std::abs(axis[i]) > 1e-12) {
                if (axis[i] < 0.0) axis = -axis;
                break;
            }
        }
    }
    return theta * axis;
}

Transform DHLink::matrix(double q) const {
    const double theta = theta_offset + (joint_kind == JointKind::Revolute ? q : 0.0);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Transform T;
    T.rotation << ct, -st * ca, st * sa,
                  st,  ct * ca, -ct * sa,
                  0.0,      sa,       ca;
    T.translation << a * ct, a * st, d;
    return T;
}

std::size_t DHChain::revolute_count() const {
    std::size_t n = 0;
    for (const auto& link : links)
        if (link.joint_kind == JointKind::Revolute) ++n;
    return n;
}

Transform forward_kinematics(const DHChain& chain, const JointConfig& q) {
    if (static_cast<std::size_t>(q.angles.size()) != chain.revolute_count())
        throw DimensionMismatch("forward_kinematics: joint vector length does not match revolute link count");
    Transform T = chain.base;
    Eigen::Index j = 0;
    for (const auto& link : chain.links) {
        const double qi = link.joint_kind == JointKind::Revolute ? q.angles[j++] : 0.0;
        T = T * link.matrix(qi);
    }
    return T;
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R) {
    const double trace = R.trace();
    const double cos_theta = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    if (theta < 1e-12) return Eigen::Vector3d::Zero();
    if (theta > kPi - 1e-7) {
        // Near pi the antisymmetric part vanishes; recover the axis from
        // the symmetric part R = 2*a*a' - I + O(pi - theta).
        Eigen::Matrix3d S = 0.5 * (R + Eigen::Matrix3d::Identity());
        int k = 0;
        S.diagonal().maxCoeff(&k);
        Eigen::Vector3d axis = S.col(k) / std::sqrt(std::max(S(k, k), 1e-15));
        axis.normalize();
        return Pose::canonicalize_axis_angle(theta * axis);
    }
    Eigen::Vector3d w;
    w << R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1);
    return (theta / (2.0 * std::sin(theta))) * w;
}

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& o) {
    const double theta = o.norm();
    if (theta < 1e-12) {
        Eigen::Matrix3d K;
        K << 0, -o.z(), o.y(), o.z(), 0, -o.x(), -o.y(), o.x(), 0;
        return Eigen::Matrix3d::Identity() + K;  // first-order, exact at 0
    }
    const Eigen::Vector3d a = o / theta;
    Eigen::Matrix3d K;
    K << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
    return Eigen::Matrix3d::Identity() + std::sin(theta) * K + (1.0 - std::cos(theta)) * K * K;
}

Pose pose_from_transform(const Transform& T) {
    return Pose(T.translation, rotation_log(T.rotation));
}

Transform transform_from_pose(const Pose& x) {
    return {rotation_exp(x.orientation), x.position};
}

Transform relative_motion(const DHChain& chain, const JointConfig& q_prev, const JointConfig& q_curr) {
    return forward_kinematics(chain, q_curr) * forward_kinematics(chain, q_prev).inverse();
}

}  // namespace servotrack
