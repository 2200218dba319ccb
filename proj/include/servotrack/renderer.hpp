#ifndef SERVOTRACK_RENDERER_HPP
#define SERVOTRACK_RENDERER_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/image.hpp"
#include "servotrack/kinematics.hpp"
#include "servotrack/mesh.hpp"

namespace servotrack {

struct ScenePart {
    TriangleMesh mesh;
    Transform offset;  // part frame relative to the end-effector frame
};

/// End-effector assembly as rendered per particle; light direction is fixed
/// in the camera frame so descriptor response does not depend on viewpoint.
struct Scene {
    std::vector<ScenePart> parts;
    Eigen::Vector3d light_dir{Eigen::Vector3d(0.3, -0.5, 0.8).normalized()};  // camera frame, unit
};

/// Scratch buffers reused across rasterize_triangle calls.
struct DepthImage {
    Image shade;
    std::vector<double> inv_depth;  // 0 = empty, larger = nearer

    DepthImage(int w, int h) : shade(w, h, 0.0), inv_depth(static_cast<std::size_t>(w) * h, 0.0) {}
};

/// Screen-space vertex: pixel position, inverse depth and Lambertian shade.
struct ScreenVertex {
    double x;
    double y;
    double inv_z;
    double shade;
};

/// Edge-function fill with the top-left rule; per-pixel 1/z test, nearer
/// fragment wins. Degenerate triangles write nothing.
void rasterize_triangle(DepthImage& target, const std::array<ScreenVertex, 3>& v);

/// Z-buffered Lambertian grayscale render of the scene posed at
/// transform_from_pose(pose), seen through (K, extrinsic). Deterministic.
Image render(const Scene& scene, const Pose& pose, const Intrinsics& K, const Transform& extrinsic);

/// Renders already-placed world-frame meshes (sim backgrounds / clutter join
/// the end-effector scene through this entry point).
void render_meshes(DepthImage& target, const std::vector<std::pair<const TriangleMesh*, Transform>>& items,
                   const Eigen::Vector3d& light_dir_cam, const Intrinsics& K, const Transform& extrinsic,
                   const std::vector<double>& albedos);

}  // namespace servotrack

#endif
