#ifndef SERVOTRACK_SIM_WORLD_HPP
#define SERVOTRACK_SIM_WORLD_HPP

#include <cstdint>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/filter.hpp"
#include "servotrack/image.hpp"
#include "servotrack/kinematics.hpp"
#include "servotrack/renderer.hpp"

namespace servotrack::sim {

/// Constant per-joint encoder offsets plus an optional slow drift; models the
/// discrepancy between reported and true joint angles.
struct EncoderBias {
    Eigen::VectorXd offsets;      // [rad], one per revolute joint
    double drift_rate = 0.0;      // [rad/s], applied uniformly

    JointConfig apply(const JointConfig& true_q, double time) const;
};

struct ClutterObject {
    TriangleMesh mesh;
    Transform placement;  // world frame
    double albedo = 1.0;
};

/// Ground truth the rest of the system never sees directly: the filter side
/// only receives camera images and biased joint readings.
struct World {
    DHChain arm;
    JointConfig true_q;
    EncoderBias bias;
    std::vector<CameraModel> cameras;
    Scene scene;  // end-effector assembly, shared with the filter
    std::vector<ClutterObject> clutter;
    Eigen::Vector3d target_point{Eigen::Vector3d::Zero()};
    std::uint64_t rng_seed = 0;

    double pixel_noise_sigma = 0.0;   // additive intensity noise
    bool background_noise = false;    // low-frequency clutter backdrop
    double time = 0.0;                // [s], advanced by the control loop
    std::uint64_t observation_count = 0;

    Transform true_end_effector() const { return forward_kinematics(arm, true_q); }
};

struct Observation {
    std::vector<Image> images;  // one per camera, true arm pose
    JointConfig reported_q;     // biased reading, what the filter sees
};

Observation observe(World& world);

/// Position-only arm Jacobian at q, central differences on FK.
Eigen::Matrix<double, 3, Eigen::Dynamic> arm_position_jacobian(const DHChain& chain,
                                                               const JointConfig& q);

/// Damped least-squares joint step realizing the cartesian displacement dx.
Eigen::VectorXd dls_joint_step(const DHChain& chain, const JointConfig& q,
                               const Eigen::Vector3d& dx, double damping = 1e-3);

/// Procedural convex clutter: count objects scattered near `center`, shapes
/// and shades drawn from the given seed. Placements keep clear of `center`
/// itself and of the line of sight from each viewpoint to it.
std::vector<ClutterObject> make_clutter(std::uint64_t seed, int count, const Eigen::Vector3d& center,
                                        double spread,
                                        const std::vector<Eigen::Vector3d>& viewpoints = {});

/// Recovers the world point whose stereo feature is `f`: exact 3x3 solve of
/// the projective constraints u_l, u_r, v_l.
Eigen::Vector3d triangulate_feature(const StereoFeature& f, const ProjectionMatrix& left,
                                    const ProjectionMatrix& right);

}  // namespace servotrack::sim

#endif
