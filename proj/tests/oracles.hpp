#ifndef SERVOTRACK_TESTS_ORACLES_HPP
#define SERVOTRACK_TESTS_ORACLES_HPP

// Reference implementations kept deliberately naive and separate from the
// library code; tests compare the optimized paths against these.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/hog.hpp"
#include "servotrack/image.hpp"
#include "servotrack/kinematics.hpp"

namespace oracles {

// --- kinematics ------------------------------------------------------------

// Raw 4x4 homogeneous DH matrix, written out element by element from the
// standard-convention product Rz(theta) Tz(d) Tx(a) Rx(alpha).
inline Eigen::Matrix4d dh_matrix4(double a, double alpha, double d, double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Eigen::Matrix4d m;
    m << ct, -st * ca,  st * sa, a * ct,
         st,  ct * ca, -ct * sa, a * st,
          0,       sa,       ca,      d,
          0,        0,        0,      1;
    return m;
}

// Chain FK as a plain 4x4 product: base * A_1 * ... * A_n.
inline Eigen::Matrix4d fk_matrix4(const servotrack::DHChain& chain,
                                  const servotrack::JointConfig& q) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = chain.base.rotation;
    m.topRightCorner<3, 1>() = chain.base.translation;
    Eigen::Index j = 0;
    for (const auto& link : chain.links) {
        const double qi =
            link.joint_kind == servotrack::JointKind::Revolute ? q.angles[j++] : 0.0;
        m = m * dh_matrix4(link.a, link.alpha, link.d, link.theta_offset + qi);
    }
    return m;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond quat(n(rng), n(rng), n(rng), n(rng));
    quat.normalize();
    return quat.toRotationMatrix();
}

inline servotrack::Transform random_rigid(std::mt19937_64& rng, double translation_scale = 1.0) {
    std::uniform_real_distribution<double> u(-translation_scale, translation_scale);
    servotrack::Transform T;
    T.rotation = random_rotation(rng);
    T.translation = Eigen::Vector3d(u(rng), u(rng), u(rng));
    return T;
}

// --- camera ----------------------------------------------------------------

// Two-step projection: camera-frame transform, then intrinsics, then divide.
inline servotrack::PixelPoint project_two_step(const servotrack::Intrinsics& K,
                                               const servotrack::Transform& extrinsic,
                                               const Eigen::Vector3d& p) {
    const Eigen::Vector3d pc = extrinsic.rotation * p + extrinsic.translation;
    return {K.fx * pc.x() / pc.z() + K.cx, K.fy * pc.y() / pc.z() + K.cy};
}

// Central finite differences on the stereo feature.
inline Eigen::Matrix3d jacobian_fd(const Eigen::Vector3d& p,
                                   const servotrack::ProjectionMatrix& Pi_l,
                                   const servotrack::ProjectionMatrix& Pi_r, double h = 1e-6) {
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d hi = p, lo = p;
        hi[j] += h;
        lo[j] -= h;
        const Eigen::Vector3d fhi = servotrack::stereo_feature(hi, Pi_l, Pi_r).vec();
        const Eigen::Vector3d flo = servotrack::stereo_feature(lo, Pi_l, Pi_r).vec();
        J.col(j) = (fhi - flo) / (2.0 * h);
    }
    return J;
}

// --- hog -------------------------------------------------------------------

// Double-loop HOG: for every block, revisit every pixel of every member cell.
// O(pixels * blocks); shares no code with the library implementation.
inline servotrack::Descriptor naive_hog(const servotrack::Image& img,
                                        const servotrack::HOGParams& p) {
    const double period = p.signed_orientation ? 2.0 * M_PI : M_PI;
    const int cells_x = img.width / p.cell_size;
    const int cells_y = img.height / p.cell_size;
    const int blocks_x = (cells_x - p.block_size) / p.block_stride + 1;
    const int blocks_y = (cells_y - p.block_size) / p.block_stride + 1;

    auto pixel = [&](int x, int y) { return img.at(x, y); };
    auto cell_hist = [&](int cx, int cy) {
        std::vector<double> h(p.n_bins, 0.0);
        for (int y = cy * p.cell_size; y < (cy + 1) * p.cell_size; ++y) {
            for (int x = cx * p.cell_size; x < (cx + 1) * p.cell_size; ++x) {
                const int xl = x > 0 ? x - 1 : 0, xr = x < img.width - 1 ? x + 1 : img.width - 1;
                const int yu = y > 0 ? y - 1 : 0, yd = y < img.height - 1 ? y + 1 : img.height - 1;
                const double gx = pixel(xr, y) - pixel(xl, y);
                const double gy = pixel(x, yd) - pixel(x, yu);
                const double mag = std::sqrt(gx * gx + gy * gy);
                if (mag == 0.0) continue;
                double ori = std::fmod(std::atan2(gy, gx) + 2.0 * M_PI, period);
                if (ori >= period) ori -= period;
                const double pos = ori / (period / p.n_bins) - 0.5;
                const int lower = static_cast<int>(std::floor(pos));
                const double frac = pos - lower;
                const int b0 = ((lower % p.n_bins) + p.n_bins) % p.n_bins;
                h[b0] += mag * (1.0 - frac);
                h[(b0 + 1) % p.n_bins] += mag * frac;
            }
        }
        return h;
    };

    servotrack::Descriptor d;
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            std::vector<double> block;
            for (int icy = 0; icy < p.block_size; ++icy)
                for (int icx = 0; icx < p.block_size; ++icx) {
                    const auto h = cell_hist(bx * p.block_stride + icx, by * p.block_stride + icy);
                    block.insert(block.end(), h.begin(), h.end());
                }
            double n2 = 0.0;
            for (double v : block) n2 += v * v;
            const double inv1 = 1.0 / std::sqrt(n2 + p.epsilon * p.epsilon);
            for (double& v : block) v = std::min(v * inv1, p.clip);
            n2 = 0.0;
            for (double v : block) n2 += v * v;
            const double inv2 = 1.0 / std::sqrt(n2 + p.epsilon * p.epsilon);
            for (double v : block) d.values.push_back(v * inv2);
        }
    }
    return d;
}

inline servotrack::Image random_image(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    servotrack::Image img(w, h);
    for (double& px : img.pixels) px = u(rng);
    return img;
}

}  // namespace oracles

#endif
