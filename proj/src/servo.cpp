#include "servotrack/servo.hpp"

namespace servotrack {

Eigen::Vector3d compute_error(const StereoFeature& u_g, const StereoFeature& u_e) {
    return u_g.vec() - u_e.vec();
}

Eigen::Vector3d control_velocity(const Eigen::Matrix3d& J, const Eigen::Vector3d& e,
                                 const ServoConfig& cfg) {
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(2);
    if (smin <= 0.0 || svd.singularValues()(0) / smin > 1e8)
        throw SingularJacobian("control_velocity: image Jacobian is ill-conditioned");

    Eigen::Vector3d v = cfg.gain * svd.solve(e);
    const double speed = v.norm();
    if (speed > cfg.max_speed) v *= cfg.max_speed / speed;
    return v;
}

ServoResult servo_loop(sim::World& world, std::vector<Filter>& filters, const StereoFeature& u_g,
                       const ServoConfig& cfg) {
    if (world.cameras.size() != 2)
        throw std::invalid_argument("servo_loop: a stereo rig (2 cameras) is required");
    const ProjectionMatrix Pi_l = world.cameras[0].projection();
    const ProjectionMatrix Pi_r = world.cameras[1].projection();
    const bool oracle = filters.empty();
    const bool fused = filters.size() == 1;
    if (!oracle && !fused && filters.size() != world.cameras.size())
        throw std::invalid_argument("servo_loop: need one filter per camera or one fused filter");

    ServoResult result;
    JointConfig prev_reported = world.bias.apply(world.true_q, world.time);

    for (int iter = 0; iter <= cfg.max_iters; ++iter) {
        sim::Observation obs = observe(world);

        Pose eap_l, eap_r;
        if (oracle) {
            eap_l = eap_r = pose_from_transform(world.true_end_effector());
        } else if (fused) {
            const StepResult r = filters[0].step(prev_reported, obs.reported_q, obs.images);
            if (r.reinitialized) ++result.reinit_count;
            eap_l = eap_r = r.eap;
        } else {
            for (std::size_t c = 0; c < filters.size(); ++c) {
                const StepResult r = filters[c].step(prev_reported, obs.reported_q, {obs.images[c]});
                if (r.reinitialized) ++result.reinit_count;
                (c == 0 ? eap_l : eap_r) = r.eap;
            }
        }
        prev_reported = obs.reported_q;

        ServoTraceRow row;
        row.iteration = iter;
        row.eap_left = eap_l;
        row.eap_right = eap_r;
        const PixelPoint left = project_point(Pi_l, eap_l.position);
        const PixelPoint right = project_point(Pi_r, eap_r.position);
        row.u_e = {left.u, right.u, left.v};
        row.e = compute_error(u_g, row.u_e);
        row.e_norm = row.e.norm();

        if (row.e_norm < cfg.convergence_px) {
            result.trace.push_back(row);
            result.converged = true;
            result.final_error = row.e_norm;
            result.iterations = iter;
            return result;
        }
        if (iter == cfg.max_iters) {
            result.trace.push_back(row);
            break;
        }

        const Eigen::Vector3d ref_point = 0.5 * (eap_l.position + eap_r.position);
        Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
        try {
            const Eigen::Matrix3d J = image_jacobian(ref_point, Pi_l, Pi_r);
            velocity = control_velocity(J, row.e, cfg);
        } catch (const SingularJacobian&) {
            // Degenerate viewing geometry: hold position this cycle.
        } catch (const NonPositiveDepth&) {
            // Estimate wandered behind a camera; hold and let the filter recover.
        }
        row.velocity = velocity;
        result.trace.push_back(row);

        const Eigen::VectorXd dq =
            sim::dls_joint_step(world.arm, world.bias.apply(world.true_q, world.time), velocity * cfg.dt);
        world.true_q.angles += dq;
        world.time += cfg.dt;
    }

    result.converged = false;
    result.final_error = result.trace.back().e_norm;
    result.iterations = cfg.max_iters;
    return result;
}

}  // namespace servotrack
