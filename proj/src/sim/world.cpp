#include "servotrack/sim/world.hpp"

#include <cmath>

#include "servotrack/rng.hpp"

namespace servotrack::sim {

namespace {
constexpr std::uint64_t kObserveStream = 0x6f627365ULL;
constexpr std::uint64_t kClutterStream = 0x636c7574ULL;
}

JointConfig EncoderBias::apply(const JointConfig& true_q, double time) const {
    JointConfig reported = true_q;
    if (offsets.size() > 0) {
        if (offsets.size() != true_q.angles.size())
            throw DimensionMismatch("EncoderBias: offset vector length does not match joint count");
        reported.angles += offsets;
    }
    reported.angles.array() += drift_rate * time;
    return reported;
}

Observation observe(World& world) {
    const std::uint64_t obs_index = world.observation_count++;
    const Pose true_pose = pose_from_transform(world.true_end_effector());

    Observation obs;
    obs.reported_q = world.bias.apply(world.true_q, world.time);
    obs.images.reserve(world.cameras.size());

    for (std::size_t c = 0; c < world.cameras.size(); ++c) {
        const CameraModel& cam = world.cameras[c];
        DepthImage target(cam.intrinsics.width, cam.intrinsics.height);

        auto rng = make_stream(world.rng_seed, kObserveStream, obs_index, c);
        if (world.background_noise) {
            // Low-frequency backdrop: bilinear interpolation of a coarse
            // random grid, stands in for a textured tabletop.
            constexpr int kGrid = 8;
            std::uniform_real_distribution<double> level(0.05, 0.45);
            std::vector<double> grid((kGrid + 1) * (kGrid + 1));
            for (auto& v : grid) v = level(rng);
            const int w = cam.intrinsics.width, h = cam.intrinsics.height;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double gx = static_cast<double>(x) / w * kGrid;
                    const double gy = static_cast<double>(y) / h * kGrid;
                    const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
                    const double fx = gx - ix, fy = gy - iy;
                    const double v00 = grid[iy * (kGrid + 1) + ix];
                    const double v10 = grid[iy * (kGrid + 1) + ix + 1];
                    const double v01 = grid[(iy + 1) * (kGrid + 1) + ix];
                    const double v11 = grid[(iy + 1) * (kGrid + 1) + ix + 1];
                    target.shade.at(x, y) = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
                                            fy * ((1 - fx) * v01 + fx * v11);
                }
            }
        }

        const Transform placement = transform_from_pose(true_pose);
        std::vector<std::pair<const TriangleMesh*, Transform>> items;
        std::vector<double> albedos;
        for (const auto& part : world.scene.parts) {
            items.emplace_back(&part.mesh, placement * part.offset);
            albedos.push_back(1.0);
        }
        for (const auto& obj : world.clutter) {
            items.emplace_back(&obj.mesh, obj.placement);
            albedos.push_back(obj.albedo);
        }
        render_meshes(target, items, world.scene.light_dir, cam.intrinsics, cam.extrinsic, albedos);

        if (world.pixel_noise_sigma > 0.0) {
            std::normal_distribution<double> noise(0.0, world.pixel_noise_sigma);
            for (auto& px : target.shade.pixels)
                px = std::clamp(px + noise(rng), 0.0, 1.0);
        }
        obs.images.push_back(std::move(target.shade));
    }
    return obs;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> arm_position_jacobian(const DHChain& chain,
                                                               const JointConfig& q) {
    const Eigen::Index n = q.angles.size();
    Eigen::Matrix<double, 3, Eigen::Dynamic> J(3, n);
    constexpr double h = 1e-6;
    for (Eigen::Index j = 0; j < n; ++j) {
        JointConfig qp = q, qm = q;
        qp.angles[j] += h;
        qm.angles[j] -= h;
        J.col(j) = (forward_kinematics(chain, qp).translation -
                    forward_kinematics(chain, qm).translation) / (2.0 * h);
    }
    return J;
}

Eigen::VectorXd dls_joint_step(const DHChain& chain, const JointConfig& q,
                               const Eigen::Vector3d& dx, double damping) {
    const auto J = arm_position_jacobian(chain, q);
    const Eigen::Matrix3d JJt = J * J.transpose() + damping * damping * Eigen::Matrix3d::Identity();
    return J.transpose() * JJt.ldlt().solve(dx);
}

namespace {

double segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) {
    const Eigen::Vector3d ab = b - a;
    const double t = std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

}  // namespace

std::vector<ClutterObject> make_clutter(std::uint64_t seed, int count, const Eigen::Vector3d& center,
                                        double spread,
                                        const std::vector<Eigen::Vector3d>& viewpoints) {
    auto rng = make_stream(seed, kClutterStream, 0, 0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> size(0.015, 0.05);
    std::uniform_real_distribution<double> shade(0.2, 0.95);
    std::uniform_real_distribution<double> angle(0.0, 3.0);

    std::vector<ClutterObject> clutter;
    clutter.reserve(count);
    for (int i = 0; i < count; ++i) {
        // Random box, the convex stand-in for an everyday object.
        const double sx = size(rng), sy = size(rng), sz = size(rng);
        TriangleMesh box;
        for (int cz = 0; cz < 2; ++cz)
            for (int cy = 0; cy < 2; ++cy)
                for (int cx = 0; cx < 2; ++cx)
                    box.vertices.emplace_back((cx - 0.5) * sx, (cy - 0.5) * sy, (cz - 0.5) * sz);
        const int faces[12][3] = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},
                                  {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},
                                  {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
        for (const auto& f : faces) box.triangles.push_back({f[0], f[1], f[2]});
        box.normals.assign(8, Eigen::Vector3d::Zero());
        for (const auto& tri : box.triangles) {
            const Eigen::Vector3d fn = (box.vertices[tri[1]] - box.vertices[tri[0]])
                                           .cross(box.vertices[tri[2]] - box.vertices[tri[0]]);
            for (int idx : tri) box.normals[idx] += fn;
        }
        for (auto& n : box.normals) n.normalize();

        ClutterObject obj;
        obj.mesh = std::move(box);
        Eigen::Vector3d axis(unit(rng), unit(rng), unit(rng));
        if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
        obj.placement.rotation = rotation_exp(angle(rng) * axis.normalized());
        // Objects crowd the scene but stay off the table spot being reached
        // and out of the cameras' lines of sight to it.
        const double clearance = std::min(0.07, 0.6 * spread);
        Eigen::Vector3d pos;
        bool clear;
        do {
            pos = center + spread * Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
            clear = (pos - center).norm() >= clearance;
            for (const auto& vp : viewpoints)
                clear = clear && segment_distance(pos, vp, center) >= clearance;
        } while (!clear);
        obj.placement.translation = pos;
        obj.albedo = shade(rng);
        clutter.push_back(std::move(obj));
    }
    return clutter;
}

Eigen::Vector3d triangulate_feature(const StereoFeature& f, const ProjectionMatrix& left,
                                    const ProjectionMatrix& right) {
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    const auto constrain = [&](int row, const ProjectionMatrix& P, int axis, double value) {
        A.row(row) = value * P.m.row(2).head<3>() - P.m.row(axis).head<3>();
        b(row) = P.m(axis, 3) - value * P.m(2, 3);
    };
    constrain(0, left, 0, f.u_l);
    constrain(1, left, 1, f.v_l);
    constrain(2, right, 0, f.u_r);
    return A.colPivHouseholderQr().solve(b);
}

}  // namespace servotrack::sim
