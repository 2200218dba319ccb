#ifndef SERVOTRACK_CAMERA_HPP
#define SERVOTRACK_CAMERA_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "servotrack/kinematics.hpp"

namespace servotrack {

struct Intrinsics {
    double fx = 320.0;
    double fy = 320.0;
    double cx = 160.0;
    double cy = 120.0;
    int width = 320;
    int height = 240;

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d K;
        K << fx, 0, cx, 0, fy, cy, 0, 0, 1;
        return K;
    }
};

/// 3x4 matrix mapping homogeneous world points to homogeneous pixels.
struct ProjectionMatrix {
    Eigen::Matrix<double, 3, 4> m{Eigen::Matrix<double, 3, 4>::Zero()};
};

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

/// Stereo feature [u_left, u_right, v_left] driving the servo controller.
struct StereoFeature {
    double u_l = 0.0;
    double u_r = 0.0;
    double v_l = 0.0;

    Eigen::Vector3d vec() const { return {u_l, u_r, v_l}; }
};

struct NonPositiveDepth : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pinhole camera: intrinsics plus world -> camera rigid transform.
struct CameraModel {
    Intrinsics intrinsics;
    Transform extrinsic;  // world -> camera

    ProjectionMatrix projection() const;
};

/// Pi = K [R | t], extrinsic maps world to camera frame.
ProjectionMatrix projection_matrix(const Intrinsics& K, const Transform& extrinsic);

PixelPoint project_point(const ProjectionMatrix& Pi, const Eigen::Vector3d& p);

/// Depth of a world point along the camera optical axis (third projective row).
double point_depth(const ProjectionMatrix& Pi, const Eigen::Vector3d& p);

StereoFeature stereo_feature(const Eigen::Vector3d& p, const ProjectionMatrix& Pi_l,
                             const ProjectionMatrix& Pi_r);

/// Analytic d(u_l, u_r, v_l)/d(x, y, z), quotient rule on the linear
/// projective coordinates.
Eigen::Matrix3d image_jacobian(const Eigen::Vector3d& p, const ProjectionMatrix& Pi_l,
                               const ProjectionMatrix& Pi_r);

}  // namespace servotrack

#endif
