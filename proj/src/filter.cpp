#include "servotrack/filter.hpp"

#include <cmath>
#include <numeric>

#include "servotrack/parallel.hpp"

namespace servotrack {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

// Stream tags keep the predict / resample draws on disjoint substreams.
constexpr std::uint64_t kPredictStream = 0x70726564ULL;
constexpr std::uint64_t kResampleStream = 0x72657361ULL;

ParticleSet normalized(ParticleSet set, double sum) {
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw AllWeightsZero("update_weights: unnormalized weight sum is zero or non-finite");
    for (auto& p : set.particles) p.weight /= sum;
    return set;
}

}  // namespace

ParticleSet initialize(const DHChain& chain, const JointConfig& q0, const FilterConfig& cfg,
                       std::uint64_t seed) {
    if (cfg.n_particles < 2)
        throw std::invalid_argument("initialize: need at least 2 particles");
    const Pose x0 = pose_from_transform(forward_kinematics(chain, q0));
    ParticleSet set;
    set.rng_seed = seed;
    set.particles.assign(static_cast<std::size_t>(cfg.n_particles),
                         Particle{x0, 1.0 / cfg.n_particles});
    return set;
}

OrientationNoiseSample sample_orientation_noise(std::mt19937_64& rng, double sigma_theta,
                                                double sigma_alpha) {
    std::normal_distribution<double> n_theta(0.0, sigma_theta);
    std::normal_distribution<double> n_alpha(0.0, sigma_alpha);
    std::uniform_real_distribution<double> azimuth(0.0, 2.0 * kPi);
    OrientationNoiseSample s;
    s.cap_angle = std::abs(n_alpha(rng));
    s.azimuth = azimuth(rng);
    s.angle_delta = n_theta(rng);
    return s;
}

Eigen::Vector3d apply_orientation_noise(const Eigen::Vector3d& o, const OrientationNoiseSample& s) {
    const double theta = o.norm();
    // Zero rotation has no axis; any reference direction serves.
    const Eigen::Vector3d axis = theta > 1e-12 ? Eigen::Vector3d(o / theta) : Eigen::Vector3d::UnitZ();

    Eigen::Vector3d e1 = axis.cross(std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                                             : Eigen::Vector3d::UnitX());
    e1.normalize();
    const Eigen::Vector3d e2 = axis.cross(e1);

    const Eigen::Vector3d tilted = std::cos(s.cap_angle) * axis +
                                   std::sin(s.cap_angle) * (std::cos(s.azimuth) * e1 +
                                                            std::sin(s.azimuth) * e2);
    return Pose::canonicalize_axis_angle((theta + s.angle_delta) * tilted);
}

ParticleSet predict(const ParticleSet& set, const Transform& delta, const NoiseParams& noise,
                    std::uint64_t step_index) {
    ParticleSet out = set;
    const double sigma_theta = noise.sigma_theta * kDegToRad;
    const double sigma_alpha = noise.sigma_alpha * kDegToRad;
    for (std::size_t i = 0; i < out.particles.size(); ++i) {
        auto& p = out.particles[i];
        const Pose moved = pose_from_transform(delta * transform_from_pose(p.state));

        auto rng = make_stream(set.rng_seed, kPredictStream, step_index, i);
        std::normal_distribution<double> n_pos(0.0, noise.sigma_p);
        Eigen::Vector3d jitter;
        for (int k = 0; k < 3; ++k) jitter[k] = n_pos(rng);
        const auto rot_noise = sample_orientation_noise(rng, sigma_theta, sigma_alpha);

        p.state = Pose(moved.position + jitter,
                       apply_orientation_noise(moved.orientation, rot_noise));
    }
    return out;
}

double likelihood(const Descriptor& y, const Descriptor& y_hat, double sigma) {
    if (sigma <= 0.0)
        throw std::invalid_argument("likelihood: sigma must be positive");
    return std::exp(-descriptor_distance(y, y_hat) / sigma);
}

ParticleSet update_weights_from_likelihoods(const ParticleSet& set, const std::vector<double>& lik) {
    if (lik.size() != set.size())
        throw DescriptorLengthMismatch("update_weights: one likelihood per particle required");
    ParticleSet out = set;
    double sum = 0.0;
    for (std::size_t i = 0; i < out.particles.size(); ++i) {
        out.particles[i].weight *= lik[i];
        sum += out.particles[i].weight;
    }
    return normalized(std::move(out), sum);
}

ParticleSet update_weights(const ParticleSet& set, const Descriptor& camera_descriptor,
                           const std::vector<Descriptor>& rendered_descriptors, double sigma) {
    if (rendered_descriptors.size() != set.size())
        throw DescriptorLengthMismatch("update_weights: one rendered descriptor per particle required");
    std::vector<double> lik(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        lik[i] = likelihood(camera_descriptor, rendered_descriptors[i], sigma);
    return update_weights_from_likelihoods(set, lik);
}

double effective_sample_size(const ParticleSet& set) {
    double sum_sq = 0.0;
    for (const auto& p : set.particles) sum_sq += p.weight * p.weight;
    return 1.0 / sum_sq;
}

ParticleSet systematic_resample(const ParticleSet& set, std::mt19937_64& rng) {
    const std::size_t n = set.size();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double offset = unif(rng) / static_cast<double>(n);

    ParticleSet out;
    out.rng_seed = set.rng_seed;
    out.particles.reserve(n);
    double cdf = set.particles[0].weight;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = offset + static_cast<double>(i) / static_cast<double>(n);
        while (u > cdf && j + 1 < n) cdf += set.particles[++j].weight;
        out.particles.push_back({set.particles[j].state, 1.0 / static_cast<double>(n)});
    }
    return out;
}

Pose eap_estimate(const ParticleSet& set) {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    std::size_t best = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        position += set.particles[i].weight * set.particles[i].state.position;
        if (set.particles[i].weight > set.particles[best].weight) best = i;
    }

    auto to_quat = [](const Eigen::Vector3d& o) {
        const double theta = o.norm();
        if (theta < 1e-15) return Eigen::Quaterniond::Identity();
        return Eigen::Quaterniond(Eigen::AngleAxisd(theta, o / theta));
    };

    const Eigen::Quaterniond ref = to_quat(set.particles[best].state.orientation);
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (const auto& p : set.particles) {
        Eigen::Quaterniond q = to_quat(p.state.orientation);
        if (q.coeffs().dot(ref.coeffs()) < 0.0) q.coeffs() = -q.coeffs();
        acc += p.weight * q.coeffs();
    }
    const double norm = acc.norm();
    if (norm < 1e-9)
        throw DegenerateOrientation("eap_estimate: weighted quaternion sum has vanishing norm");
    const Eigen::Quaterniond mean(acc[3] / norm, acc[0] / norm, acc[1] / norm, acc[2] / norm);
    const Eigen::AngleAxisd aa(mean);
    return Pose(position, aa.angle() * aa.axis());
}

Filter::Filter(DHChain chain, const Scene* scene, std::vector<CameraModel> cameras, FilterConfig cfg,
               const JointConfig& q0, std::uint64_t seed)
    : chain_(std::move(chain)), scene_(scene), cameras_(std::move(cameras)), cfg_(cfg) {
    set_ = initialize(chain_, q0, cfg_, seed);
    sigma_ = cfg_.sigma_lik > 0.0 ? cfg_.sigma_lik : calibrate_sigma(set_.particles.front().state);
}

double Filter::calibrate_sigma(const Pose& init_pose) const {
    // Scale chosen so a 1 cm lateral displacement of the end-effector costs
    // a factor of e^8 in the likelihood; a softer scale lets the particle
    // cloud diffuse faster than the weights can pull it back.
    constexpr double kLogRatioAt1cm = 8.0;
    double total = 0.0;
    for (const auto& cam : cameras_) {
        const Eigen::Vector3d right_axis = cam.extrinsic.rotation.row(0).transpose();
        const Pose displaced(init_pose.position + 0.01 * right_axis, init_pose.orientation);
        const Descriptor at = compute_hog(render(*scene_, init_pose, cam.intrinsics, cam.extrinsic), cfg_.hog);
        const Descriptor off = compute_hog(render(*scene_, displaced, cam.intrinsics, cam.extrinsic), cfg_.hog);
        total += descriptor_distance(at, off);
    }
    return std::max(total / static_cast<double>(cameras_.size()) / kLogRatioAt1cm, 1e-6);
}

void Filter::reinitialize(const JointConfig& q) {
    const std::uint64_t seed = set_.rng_seed;
    set_ = initialize(chain_, q, cfg_, seed);
}

StepResult Filter::step(const JointConfig& q_prev, const JointConfig& q_curr,
                        const std::vector<Image>& camera_images) {
    if (camera_images.size() != cameras_.size())
        throw std::invalid_argument("Filter::step: one image per camera required");

    ++step_index_;
    const Transform delta = relative_motion(chain_, q_prev, q_curr);
    set_ = predict(set_, delta, cfg_.noise, step_index_);

    std::vector<Descriptor> observed(cameras_.size());
    for (std::size_t c = 0; c < cameras_.size(); ++c)
        observed[c] = compute_hog(camera_images[c], cfg_.hog);

    // Per-particle render + HOG + likelihood; each slot written once.
    std::vector<double> lik(set_.size());
    const unsigned threads = effective_thread_count(cfg_.threads);
    parallel_for(set_.size(), threads, [&](std::size_t i) {
        double log_lik = 0.0;
        for (std::size_t c = 0; c < cameras_.size(); ++c) {
            const Image rendered = render(*scene_, set_.particles[i].state,
                                          cameras_[c].intrinsics, cameras_[c].extrinsic);
            const Descriptor y_hat = compute_hog(rendered, cfg_.hog);
            log_lik -= descriptor_distance(observed[c], y_hat) / sigma_;
        }
        lik[i] = std::exp(log_lik);
    });

    StepResult result;
    try {
        set_ = update_weights_from_likelihoods(set_, lik);
    } catch (const AllWeightsZero&) {
        reinitialize(q_curr);
        result.reinitialized = true;
    }

    result.ess = effective_sample_size(set_);
    if (!result.reinitialized && result.ess < cfg_.n_thr) {
        auto rng = make_stream(set_.rng_seed, kResampleStream, step_index_, 0);
        set_ = systematic_resample(set_, rng);
        result.resampled = true;
    }
    result.eap = eap_estimate(set_);
    return result;
}

}  // namespace servotrack
