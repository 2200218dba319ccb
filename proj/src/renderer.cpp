#include "servotrack/renderer.hpp"

#include <algorithm>
#include <cmath>

namespace servotrack {

namespace {

constexpr double kNearPlane = 1e-4;  // [m]
constexpr double kAmbient = 0.15;

double lambert_shade(const Eigen::Vector3d& normal_cam, const Eigen::Vector3d& light_dir, double albedo) {
    const double diffuse = std::max(0.0, normal_cam.dot(-light_dir));
    return std::clamp(albedo * (kAmbient + (1.0 - kAmbient) * diffuse), 0.0, 1.0);
}

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

void rasterize_triangle(DepthImage& target, const std::array<ScreenVertex, 3>& v) {
    const int w = target.shade.width;
    const int h = target.shade.height;

    double area = edge(v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y);
    // Accept both windings; mirror the triangle so the area is positive.
    std::array<ScreenVertex, 3> t = v;
    if (area < 0.0) {
        std::swap(t[1], t[2]);
        area = -area;
    }
    if (area == 0.0) return;

    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({t[0].x, t[1].x, t[2].x}) - 0.5)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max({t[0].x, t[1].x, t[2].x}) + 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({t[0].y, t[1].y, t[2].y}) - 0.5)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max({t[0].y, t[1].y, t[2].y}) + 0.5)));
    if (x0 > x1 || y0 > y1) return;

    // Top-left rule: an edge owns its boundary pixels when it is a top edge
    // (horizontal, going left in CCW order) or a left edge (going down).
    auto is_top_left = [](const ScreenVertex& a, const ScreenVertex& b) {
        return (a.y == b.y && b.x < a.x) || (b.y > a.y);
    };
    const std::array<bool, 3> top_left = {
        is_top_left(t[0], t[1]), is_top_left(t[1], t[2]), is_top_left(t[2], t[0])};

    for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5;
            const double e0 = edge(t[0].x, t[0].y, t[1].x, t[1].y, px, py);
            const double e1 = edge(t[1].x, t[1].y, t[2].x, t[2].y, px, py);
            const double e2 = edge(t[2].x, t[2].y, t[0].x, t[0].y, px, py);
            const bool inside = (e0 > 0.0 || (e0 == 0.0 && top_left[0])) &&
                                (e1 > 0.0 || (e1 == 0.0 && top_left[1])) &&
                                (e2 > 0.0 || (e2 == 0.0 && top_left[2]));
            if (!inside) continue;

            const double b0 = e1 / area;  // barycentric of vertex 0 (opposite edge 1-2)
            const double b1 = e2 / area;
            const double b2 = e0 / area;
            const double inv_z = b0 * t[0].inv_z + b1 * t[1].inv_z + b2 * t[2].inv_z;
            double& stored = target.inv_depth[static_cast<std::size_t>(y) * w + x];
            if (inv_z > stored) {
                stored = inv_z;
                target.shade.at(x, y) = std::clamp(b0 * t[0].shade + b1 * t[1].shade + b2 * t[2].shade, 0.0, 1.0);
            }
        }
    }
}

void render_meshes(DepthImage& target, const std::vector<std::pair<const TriangleMesh*, Transform>>& items,
                   const Eigen::Vector3d& light_dir_cam, const Intrinsics& K, const Transform& extrinsic,
                   const std::vector<double>& albedos) {
    for (std::size_t item = 0; item < items.size(); ++item) {
        const TriangleMesh& mesh = *items[item].first;
        const Transform to_cam = extrinsic * items[item].second;  // local -> camera
        const double albedo = item < albedos.size() ? albedos[item] : 1.0;

        std::vector<Eigen::Vector3d> cam_pts(mesh.vertices.size());
        std::vector<double> shades(mesh.vertices.size());
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            cam_pts[i] = to_cam * mesh.vertices[i];
            shades[i] = lambert_shade(to_cam.rotation * mesh.normals[i], light_dir_cam, albedo);
        }

        for (const auto& tri : mesh.triangles) {
            // No near-plane clipping: drop triangles touching the plane.
            if (cam_pts[tri[0]].z() < kNearPlane || cam_pts[tri[1]].z() < kNearPlane ||
                cam_pts[tri[2]].z() < kNearPlane)
                continue;
            std::array<ScreenVertex, 3> sv;
            for (int k = 0; k < 3; ++k) {
                const Eigen::Vector3d& p = cam_pts[tri[k]];
                sv[k] = {K.fx * p.x() / p.z() + K.cx, K.fy * p.y() / p.z() + K.cy, 1.0 / p.z(), shades[tri[k]]};
            }
            rasterize_triangle(target, sv);
        }
    }
}

Image render(const Scene& scene, const Pose& pose, const Intrinsics& K, const Transform& extrinsic) {
    DepthImage target(K.width, K.height);
    const Transform placement = transform_from_pose(pose);

    std::vector<std::pair<const TriangleMesh*, Transform>> items;
    items.reserve(scene.parts.size());
    for (const auto& part : scene.parts)
        items.emplace_back(&part.mesh, placement * part.offset);

    render_meshes(target, items, scene.light_dir, K, extrinsic, {});
    return std::move(target.shade);
}

}  // namespace servotrack
