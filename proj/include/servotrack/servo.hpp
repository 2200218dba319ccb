#ifndef SERVOTRACK_SERVO_HPP
#define SERVOTRACK_SERVO_HPP

#include <stdexcept>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/filter.hpp"
#include "servotrack/sim/world.hpp"

namespace servotrack {

struct ServoConfig {
    double gain = 1.0;            // proportional gain [1/s]
    double max_speed = 0.02;      // cartesian speed cap [m/s]
    double convergence_px = 1.0;  // terminate when ||e||_2 drops below
    int max_iters = 500;
    double dt = 0.1;              // control period [s]
};

struct ServoState {
    StereoFeature u_e;
    StereoFeature u_g;
    Eigen::Vector3d e{Eigen::Vector3d::Zero()};
    int iteration = 0;
};

struct SingularJacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reaching error u_g - u_e, componentwise.
Eigen::Vector3d compute_error(const StereoFeature& u_g, const StereoFeature& u_e);

/// Proportional law v = gain * J^-1 * e, clamped to max_speed. Throws
/// SingularJacobian when J's condition number exceeds 1e8.
Eigen::Vector3d control_velocity(const Eigen::Matrix3d& J, const Eigen::Vector3d& e,
                                 const ServoConfig& cfg);

struct ServoTraceRow {
    int iteration = 0;
    Eigen::Vector3d e{Eigen::Vector3d::Zero()};
    double e_norm = 0.0;
    StereoFeature u_e;
    Pose eap_left;
    Pose eap_right;
    Eigen::Vector3d velocity{Eigen::Vector3d::Zero()};
};

struct ServoResult {
    std::vector<ServoTraceRow> trace;
    bool converged = false;
    double final_error = 0.0;
    int iterations = 0;
    int reinit_count = 0;  // filter restarts forced by weight underflow
};

/// Closed-loop reach: filter step per camera -> EAP -> stereo projection ->
/// error -> velocity -> joint-space integration through the biased arm.
/// `filters` holds one tracker per camera (or a single fused tracker); empty
/// selects oracle feedback from the true pose. Not converging is reported in
/// the result, never thrown.
ServoResult servo_loop(sim::World& world, std::vector<Filter>& filters, const StereoFeature& u_g,
                       const ServoConfig& cfg);

}  // namespace servotrack

#endif
