#include "servotrack/camera.hpp"

namespace servotrack {

ProjectionMatrix projection_matrix(const Intrinsics& K, const Transform& extrinsic) {
    Eigen::Matrix<double, 3, 4> rt;
    rt.leftCols<3>() = extrinsic.rotation;
    rt.col(3) = extrinsic.translation;
    ProjectionMatrix Pi;
    Pi.m = K.matrix() * rt;
    return Pi;
}

ProjectionMatrix CameraModel::projection() const {
    return projection_matrix(intrinsics, extrinsic);
}

double point_depth(const ProjectionMatrix& Pi, const Eigen::Vector3d& p) {
    return Pi.m.row(2).head<3>().dot(p) + Pi.m(2, 3);
}

PixelPoint project_point(const ProjectionMatrix& Pi, const Eigen::Vector3d& p) {
    const Eigen::Vector4d ph(p.x(), p.y(), p.z(), 1.0);
    const Eigen::Vector3d f = Pi.m * ph;
    if (f.z() <= 0.0)
        throw NonPositiveDepth("project_point: point at non-positive depth");
    return {f.x() / f.z(), f.y() / f.z()};
}

StereoFeature stereo_feature(const Eigen::Vector3d& p, const ProjectionMatrix& Pi_l,
                             const ProjectionMatrix& Pi_r) {
    const PixelPoint left = project_point(Pi_l, p);
    const PixelPoint right = project_point(Pi_r, p);
    return {left.u, right.u, left.v};
}

Eigen::Matrix3d image_jacobian(const Eigen::Vector3d& p, const ProjectionMatrix& Pi_l,
                               const ProjectionMatrix& Pi_r) {
    const Eigen::Vector4d ph(p.x(), p.y(), p.z(), 1.0);

    // d(fi/f3)/dp = (f3 * grad fi - fi * grad f3) / f3^2, with grad fj the
    // first three entries of row j.
    auto rows = [&](const ProjectionMatrix& Pi, int i) -> Eigen::RowVector3d {
        const double f3 = Pi.m.row(2) * ph;
        if (f3 <= 0.0)
            throw NonPositiveDepth("image_jacobian: point at non-positive depth");
        const double fi = Pi.m.row(i) * ph;
        const Eigen::RowVector3d gi = Pi.m.row(i).head<3>();
        const Eigen::RowVector3d g3 = Pi.m.row(2).head<3>();
        return (f3 * gi - fi * g3) / (f3 * f3);
    };

    Eigen::Matrix3d J;
    J.row(0) = rows(Pi_l, 0);  // u_l
    J.row(1) = rows(Pi_r, 0);  // u_r
    J.row(2) = rows(Pi_l, 1);  // v_l
    return J;
}

}  // namespace servotrack
