#ifndef SERVOTRACK_KINEMATICS_HPP
#define SERVOTRACK_KINEMATICS_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace servotrack {

/// Rigid transform: x_world = rotation * x_local + translation.
struct Transform {
    Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d translation{Eigen::Vector3d::Zero()};

    static Transform identity() { return {}; }

    Transform operator*(const Transform& other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }

    Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
        return rotation * p + translation;
    }

    Transform inverse() const {
        Eigen::Matrix3d rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }

    /// R'R = I and det R = +1, within tol.
    bool is_rigid(double tol = 1e-9) const;
};

/// End-effector state: position plus scaled axis-angle orientation,
/// canonicalized so the rotation angle lies in [0, pi].
struct Pose {
    Eigen::Vector3d position{Eigen::Vector3d::Zero()};
    Eigen::Vector3d orientation{Eigen::Vector3d::Zero()};

    Pose() = default;
    Pose(const Eigen::Vector3d& p, const Eigen::Vector3d& o)
        : position(p), orientation(canonicalize_axis_angle(o)) {}

    /// Folds a scaled axis-angle vector into angle range [0, pi]; at angle pi
    /// the axis sign is fixed so its first nonzero component is positive.
    static Eigen::Vector3d canonicalize_axis_angle(const Eigen::Vector3d& o);
};

enum class JointKind { Revolute, Fixed };

/// Standard (distal) DH link: A = Rz(theta) Tz(d) Tx(a) Rx(alpha).
struct DHLink {
    double a = 0.0;             // link length [m]
    double alpha = 0.0;         // twist [rad]
    double d = 0.0;             // offset [m]
    double theta_offset = 0.0;  // joint angle offset [rad]
    JointKind joint_kind = JointKind::Revolute;

    Transform matrix(double q) const;
};

struct DHChain {
    std::vector<DHLink> links;
    Transform base;

    std::size_t revolute_count() const;
};

/// Joint angles, one per revolute link.
struct JointConfig {
    Eigen::VectorXd angles;

    JointConfig() = default;
    explicit JointConfig(Eigen::VectorXd q) : angles(std::move(q)) {}
    static JointConfig zero(std::size_t n) { return JointConfig(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))); }
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Transform forward_kinematics(const DHChain& chain, const JointConfig& q);

/// Rotation log map to scaled axis-angle (canonical range).
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R);

/// Rodrigues exponential of a scaled axis-angle vector.
Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& o);

Pose pose_from_transform(const Transform& T);
Transform transform_from_pose(const Pose& x);

/// World-frame end-effector motion between two joint configurations:
/// FK(q_curr) * FK(q_prev)^-1.
Transform relative_motion(const DHChain& chain, const JointConfig& q_prev, const JointConfig& q_curr);

}  // namespace servotrack

#endif
