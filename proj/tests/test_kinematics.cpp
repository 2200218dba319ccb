#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "servotrack/kinematics.hpp"

using namespace servotrack;

namespace {

DHChain three_link_chain() {
    DHChain chain;
    chain.links = {
        {0.1, 0.3, 0.05, 0.1, JointKind::Revolute},
        {0.2, -0.5, 0.0, -0.2, JointKind::Revolute},
        {0.15, 1.1, 0.07, 0.0, JointKind::Revolute},
    };
    return chain;
}

}  // namespace

TEST_CASE("forward kinematics of a trivial single link is the identity") {
    DHChain chain;
    chain.links = {{0.0, 0.0, 0.0, 0.0, JointKind::Revolute}};
    const Transform T = forward_kinematics(chain, JointConfig::zero(1));
    CHECK(T.rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
    CHECK(T.translation.norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("forward kinematics of one link matches the hand-multiplied DH matrix") {
    DHChain chain;
    chain.links = {{0.1, 0.0, 0.0, 0.0, JointKind::Revolute}};
    JointConfig q(Eigen::VectorXd::Constant(1, M_PI / 2.0));
    const Transform T = forward_kinematics(chain, q);
    // Rz(pi/2) then translate 0.1 along the rotated x axis.
    CHECK(T.translation.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(T.translation.y() == doctest::Approx(0.1));
    CHECK(T.rotation(0, 1) == doctest::Approx(-1.0));
    CHECK(T.rotation(1, 0) == doctest::Approx(1.0));
    CHECK(T.rotation(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("forward kinematics equals the matrix-product oracle on random configs") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    DHChain chain = three_link_chain();
    chain.base = oracles::random_rigid(rng);
    // A fixed link exercises the joint-skipping path.
    chain.links.push_back({0.02, 0.4, 0.01, 0.7, JointKind::Fixed});

    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        JointConfig q(Eigen::Vector3d(angle(rng), angle(rng), angle(rng)));
        const Transform T = forward_kinematics(chain, q);
        const Eigen::Matrix4d M = oracles::fk_matrix4(chain, q);
        worst = std::max(worst, (T.rotation - M.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff());
        worst = std::max(worst, (T.translation - M.topRightCorner<3, 1>()).cwiseAbs().maxCoeff());
        CHECK(T.is_rigid(1e-9));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("forward kinematics rejects a wrong-length joint vector") {
    CHECK_THROWS_AS(forward_kinematics(three_link_chain(), JointConfig::zero(2)),
                    DimensionMismatch);
}

TEST_CASE("pose round-trips through its transform away from the angle ceiling") {
    SUBCASE("identity") {
        const Pose x = pose_from_transform(Transform::identity());
        CHECK(x.position.norm() == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(x.orientation.norm() == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("quarter turn about z") {
        Transform T;
        T.rotation = rotation_exp(Eigen::Vector3d(0, 0, M_PI / 2.0));
        T.translation = Eigen::Vector3d(1, 0, 0);
        const Pose x = pose_from_transform(T);
        CHECK(x.position.isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));
        CHECK(x.orientation.isApprox(Eigen::Vector3d(0, 0, M_PI / 2.0), 1e-12));
    }
    SUBCASE("random rigid transforms") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 200; ++i) {
            Transform T = oracles::random_rigid(rng);
            // The log map is ill-conditioned at the pi ceiling; stay clear of it.
            while (std::acos(std::clamp((T.rotation.trace() - 1.0) / 2.0, -1.0, 1.0)) >
                   M_PI - 0.05)
                T = oracles::random_rigid(rng);
            const Transform back = transform_from_pose(pose_from_transform(T));
            CHECK((back.rotation - T.rotation).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((back.translation - T.translation).norm() < 1e-9);
        }
    }
}

TEST_CASE("axis-angle canonicalization folds into [0, pi] with a fixed sign at pi") {
    const Eigen::Vector3d folded =
        Pose::canonicalize_axis_angle(Eigen::Vector3d(0, 0, 1.5 * M_PI));
    CHECK(folded.norm() <= M_PI + 1e-12);
    CHECK(folded.z() == doctest::Approx(-0.5 * M_PI));

    // Both axis signs at exactly pi map to the same canonical vector.
    const Eigen::Vector3d a = Pose::canonicalize_axis_angle(Eigen::Vector3d(0, M_PI, 0));
    const Eigen::Vector3d b = Pose::canonicalize_axis_angle(Eigen::Vector3d(0, -M_PI, 0));
    CHECK(a.isApprox(b, 1e-12));
    CHECK(a.y() > 0.0);
}

TEST_CASE("rotation log and exp invert each other") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Matrix3d R = oracles::random_rotation(rng);
        CHECK((rotation_exp(rotation_log(R)) - R).cwiseAbs().maxCoeff() < 1e-9);
    }
    // Near-pi branch.
    const Eigen::Vector3d o(0.0, 0.0, M_PI - 1e-8);
    CHECK((rotation_exp(rotation_log(rotation_exp(o))) - rotation_exp(o)).cwiseAbs().maxCoeff() <
          1e-6);
}

TEST_CASE("relative motion is the world-frame delta") {
    const DHChain chain = three_link_chain();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);
    auto random_q = [&] {
        return JointConfig(Eigen::Vector3d(angle(rng), angle(rng), angle(rng)));
    };

    SUBCASE("no motion gives the identity") {
        const JointConfig q = random_q();
        const Transform d = relative_motion(chain, q, q);
        CHECK((d.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(d.translation.norm() < 1e-12);
    }
    SUBCASE("single-joint move equals the direct composition") {
        const JointConfig q0 = JointConfig::zero(3);
        JointConfig q1 = q0;
        q1.angles[1] = 0.4;
        const Transform d = relative_motion(chain, q0, q1);
        const Transform expect =
            forward_kinematics(chain, q1) * forward_kinematics(chain, q0).inverse();
        CHECK((d.rotation - expect.rotation).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((d.translation - expect.translation).norm() < 1e-12);
    }
    SUBCASE("composition law over random joint triples") {
        for (int i = 0; i < 50; ++i) {
            const JointConfig q0 = random_q(), q1 = random_q(), q2 = random_q();
            const Transform lhs = relative_motion(chain, q1, q2) * relative_motion(chain, q0, q1);
            const Transform rhs = relative_motion(chain, q0, q2);
            CHECK((lhs.rotation - rhs.rotation).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((lhs.translation - rhs.translation).norm() < 1e-9);
        }
    }
}

TEST_CASE("delta transform moves the FK pose onto the new configuration") {
    // The filter relies on delta * FK(q_prev) == FK(q_curr).
    const DHChain chain = three_link_chain();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const JointConfig q0(Eigen::Vector3d(angle(rng), angle(rng), angle(rng)));
        const JointConfig q1(Eigen::Vector3d(angle(rng), angle(rng), angle(rng)));
        const Transform moved = relative_motion(chain, q0, q1) * forward_kinematics(chain, q0);
        const Transform direct = forward_kinematics(chain, q1);
        CHECK((moved.rotation - direct.rotation).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((moved.translation - direct.translation).norm() < 1e-9);
    }
}
