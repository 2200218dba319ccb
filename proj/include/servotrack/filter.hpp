#ifndef SERVOTRACK_FILTER_HPP
#define SERVOTRACK_FILTER_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/hog.hpp"
#include "servotrack/kinematics.hpp"
#include "servotrack/renderer.hpp"
#include "servotrack/rng.hpp"

namespace servotrack {

struct Particle {
    Pose state;
    double weight = 0.0;
};

struct ParticleSet {
    std::vector<Particle> particles;
    std::uint64_t rng_seed = 0;

    std::size_t size() const { return particles.size(); }
};

/// Process-noise magnitudes of the transition density.
struct NoiseParams {
    double sigma_p = 0.005;        // position [m]
    double sigma_theta = 3.0;      // rotation angle [deg]
    double sigma_alpha = 1.5;      // axis cap aperture [deg]
};

struct FilterConfig {
    int n_particles = 100;
    double n_thr = 10.0;           // resampling trigger on effective sample size
    double sigma_lik = 0.0;        // likelihood scale; <= 0 requests auto-calibration
    NoiseParams noise;
    HOGParams hog;
    bool fuse_cameras = false;     // true: one filter multiplies per-camera likelihoods
    unsigned threads = 0;          // 0 = hardware concurrency
};

struct AllWeightsZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateOrientation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All particles at the direct-kinematics pose, uniform weights.
ParticleSet initialize(const DHChain& chain, const JointConfig& q0, const FilterConfig& cfg,
                       std::uint64_t seed = 0);

/// One draw of the spherical-cap orientation disturbance: an axis tilt of
/// |N(0, sigma_alpha)| at uniform azimuth, plus N(0, sigma_theta) on the
/// rotation angle. Angles in radians.
struct OrientationNoiseSample {
    double cap_angle = 0.0;   // >= 0
    double azimuth = 0.0;     // [0, 2*pi)
    double angle_delta = 0.0; // signed
};

OrientationNoiseSample sample_orientation_noise(std::mt19937_64& rng, double sigma_theta,
                                                double sigma_alpha);

/// Tilts the axis of `o` by the sampled cap angle and perturbs its rotation
/// angle; result re-canonicalized.
Eigen::Vector3d apply_orientation_noise(const Eigen::Vector3d& o, const OrientationNoiseSample& s);

/// Propagates every particle by the world-frame delta and adds process noise.
/// Per-particle RNG streams derive from (set seed, step_index, particle), so
/// the result does not depend on evaluation order.
ParticleSet predict(const ParticleSet& set, const Transform& delta, const NoiseParams& noise,
                    std::uint64_t step_index);

/// exp(-distance/sigma) in (0, 1].
double likelihood(const Descriptor& y, const Descriptor& y_hat, double sigma);

/// Bootstrap weight update: w_i <- w_i * likelihood_i, then normalize.
/// Throws AllWeightsZero when the unnormalized sum underflows.
ParticleSet update_weights(const ParticleSet& set, const Descriptor& camera_descriptor,
                           const std::vector<Descriptor>& rendered_descriptors, double sigma);

/// Same update from precomputed per-particle likelihood values.
ParticleSet update_weights_from_likelihoods(const ParticleSet& set, const std::vector<double>& lik);

/// [sum w_i^2]^-1, in [1, N] for normalized weights.
double effective_sample_size(const ParticleSet& set);

/// Low-variance resampling: one uniform offset, stride 1/N over the CDF.
/// All weights reset to 1/N.
ParticleSet systematic_resample(const ParticleSet& set, std::mt19937_64& rng);

/// Expected-a-posteriori pose: weighted position mean and sign-aligned
/// weighted quaternion mean of orientations.
Pose eap_estimate(const ParticleSet& set);

struct StepResult {
    Pose eap;
    double ess = 0.0;
    bool resampled = false;
    bool reinitialized = false;  // weight underflow forced a restart from kinematics
};

/// Full render-and-compare tracker for one (or a fused set of) camera(s).
/// Owns the particle set; step() implements predict -> render -> HOG ->
/// weight -> ESS-gated resample -> EAP over the reported joint trajectory.
class Filter {
public:
    Filter(DHChain chain, const Scene* scene, std::vector<CameraModel> cameras, FilterConfig cfg,
           const JointConfig& q0, std::uint64_t seed);

    StepResult step(const JointConfig& q_prev, const JointConfig& q_curr,
                    const std::vector<Image>& camera_images);

    const ParticleSet& particles() const { return set_; }
    double sigma() const { return sigma_; }
    std::uint64_t step_count() const { return step_index_; }

    /// Collapses the cloud back onto the direct-kinematics pose.
    void reinitialize(const JointConfig& q);

private:
    DHChain chain_;
    const Scene* scene_;
    std::vector<CameraModel> cameras_;
    FilterConfig cfg_;
    ParticleSet set_;
    double sigma_ = 1.0;
    std::uint64_t step_index_ = 0;

    double calibrate_sigma(const Pose& init_pose) const;
};

}  // namespace servotrack

#endif
