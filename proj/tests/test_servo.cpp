#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "servotrack/config.hpp"
#include "servotrack/servo.hpp"
#include "servotrack/sim/scenario.hpp"

using namespace servotrack;

namespace {

std::string asset(const char* name) {
    return std::string(SERVOTRACK_ASSET_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("reaching error is the componentwise goal difference") {
    const StereoFeature u_g{125.0, 89.0, 135.0};
    CHECK(compute_error(u_g, u_g).norm() == 0.0);

    const StereoFeature u_e{120.0, 85.0, 135.0};
    const Eigen::Vector3d e = compute_error(u_g, u_e);
    CHECK(e.x() == doctest::Approx(5.0));
    CHECK(e.y() == doctest::Approx(4.0));
    CHECK(e.z() == doctest::Approx(0.0));

    CHECK(Eigen::Vector3d(0.6, 0.6, 0.5).norm() < 1.0);  // the sub-pixel termination case
}

TEST_CASE("control velocity inverts the image Jacobian") {
    ServoConfig cfg;
    cfg.gain = 1.0;
    cfg.max_speed = 1e9;  // no clamp in these checks

    SUBCASE("zero error commands zero velocity") {
        const Eigen::Matrix3d J = 100.0 * Eigen::Matrix3d::Identity();
        CHECK(control_velocity(J, Eigen::Vector3d::Zero(), cfg).norm() == 0.0);
    }
    SUBCASE("diagonal Jacobian divides componentwise") {
        Eigen::Matrix3d J = Eigen::Vector3d(200.0, 150.0, 100.0).asDiagonal();
        const Eigen::Vector3d v = control_velocity(J, Eigen::Vector3d(2.0, 3.0, 1.0), cfg);
        CHECK(v.x() == doctest::Approx(0.01));
        CHECK(v.y() == doctest::Approx(0.02));
        CHECK(v.z() == doctest::Approx(0.01));
    }
    SUBCASE("multiply-back on random well-conditioned Jacobians") {
        std::mt19937_64 rng(87);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::Matrix3d J = 100.0 * Eigen::Matrix3d::Identity();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) J(i, j) += 20.0 * u(rng);
            const Eigen::Vector3d e(u(rng), u(rng), u(rng));
            const Eigen::Vector3d v = control_velocity(J, e, cfg);
            CHECK((J * (v / cfg.gain) - e).norm() < 1e-9);
        }
    }
    SUBCASE("the law is homogeneous in the error below the clamp") {
        Eigen::Matrix3d J = Eigen::Vector3d(300.0, 250.0, 320.0).asDiagonal();
        const Eigen::Vector3d e(1.0, -2.0, 0.5);
        const Eigen::Vector3d v1 = control_velocity(J, e, cfg);
        const Eigen::Vector3d v2 = control_velocity(J, 2.0 * e, cfg);
        CHECK((v2 - 2.0 * v1).norm() < 1e-12);
    }
    SUBCASE("the speed clamp caps the magnitude without turning the direction") {
        cfg.max_speed = 0.005;
        Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
        const Eigen::Vector3d v = control_velocity(J, Eigen::Vector3d(1.0, 0.0, 0.0), cfg);
        CHECK(v.norm() == doctest::Approx(0.005));
        CHECK(v.x() > 0.0);
    }
    SUBCASE("singular geometry is rejected") {
        Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
        J(0, 0) = 1.0;
        CHECK_THROWS_AS(control_velocity(J, Eigen::Vector3d(1, 1, 1), cfg), SingularJacobian);
    }
}

TEST_CASE("oracle-feedback servo converges monotonically without bias") {
    const AppConfig cfg = load_config(asset("default.cfg"));
    sim::World world = sim::build_world(cfg, cfg.task1, 1234, /*zero_bias=*/true);

    const StereoFeature u_g = stereo_feature(world.target_point, world.cameras[0].projection(),
                                             world.cameras[1].projection());
    ServoConfig servo_cfg = cfg.servo;
    servo_cfg.max_speed = 0.02;

    std::vector<Filter> no_filters;  // oracle mode
    const ServoResult result = servo_loop(world, no_filters, u_g, servo_cfg);
    CHECK(result.converged);
    CHECK(result.final_error < 1.0);
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        CHECK(result.trace[i].e_norm <= result.trace[i - 1].e_norm + 1e-6);
}

TEST_CASE("starting at the goal converges at iteration zero") {
    const AppConfig cfg = load_config(asset("default.cfg"));
    sim::World world = sim::build_world(cfg, cfg.task1, 77, true);

    // Aim exactly at the current end-effector position.
    const Eigen::Vector3d ee = world.true_end_effector().translation;
    const StereoFeature u_g =
        stereo_feature(ee, world.cameras[0].projection(), world.cameras[1].projection());
    std::vector<Filter> no_filters;
    const ServoResult result = servo_loop(world, no_filters, u_g, cfg.servo);
    CHECK(result.converged);
    CHECK(result.iterations == 0);
}

TEST_CASE("servo trace rows stay internally consistent") {
    const AppConfig cfg = load_config(asset("default.cfg"));
    sim::World world = sim::build_world(cfg, cfg.task1, 4321, true);
    const StereoFeature u_g = stereo_feature(world.target_point, world.cameras[0].projection(),
                                             world.cameras[1].projection());
    std::vector<Filter> no_filters;
    const ServoResult result = servo_loop(world, no_filters, u_g, cfg.servo);
    for (const auto& row : result.trace) {
        CHECK((row.e - compute_error(u_g, row.u_e)).norm() < 1e-12);
        CHECK(row.e_norm == doctest::Approx(row.e.norm()).epsilon(1e-12));
        const PixelPoint left = project_point(world.cameras[0].projection(), row.eap_left.position);
        CHECK(left.u == doctest::Approx(row.u_e.u_l).epsilon(1e-9));
        CHECK(left.v == doctest::Approx(row.u_e.v_l).epsilon(1e-9));
    }
}
