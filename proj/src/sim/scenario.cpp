#include "servotrack/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "servotrack/io.hpp"
#include "servotrack/rng.hpp"

namespace servotrack::sim {

namespace {

constexpr std::uint64_t kTrialStream = 0x74726961ULL;

std::vector<Filter> make_filters(const AppConfig& cfg, const World& world, const JointConfig& q0,
                                 std::uint64_t trial_seed, unsigned threads) {
    FilterConfig fc = cfg.filter;
    fc.threads = threads;
    std::vector<Filter> filters;
    if (fc.fuse_cameras) {
        filters.emplace_back(world.arm, &world.scene, world.cameras, fc, q0, mix64(trial_seed));
    } else {
        for (std::size_t c = 0; c < world.cameras.size(); ++c)
            filters.emplace_back(world.arm, &world.scene,
                                 std::vector<CameraModel>{world.cameras[c]}, fc, q0,
                                 mix64(trial_seed + 0x11 * (c + 1)));
    }
    return filters;
}

void warmup_filters(World& world, std::vector<Filter>& filters, int steps) {
    for (int s = 0; s < steps; ++s) {
        Observation obs = observe(world);
        for (std::size_t f = 0; f < filters.size(); ++f) {
            const std::vector<Image> imgs = filters.size() == 1
                                                ? obs.images
                                                : std::vector<Image>{obs.images[f]};
            filters[f].step(obs.reported_q, obs.reported_q, imgs);
        }
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

World build_world(const AppConfig& cfg, const TaskConfig& task, std::uint64_t trial_seed,
                  bool zero_bias) {
    World world;
    world.arm = cfg.arm;
    world.true_q = cfg.arm_q0;
    world.bias.offsets = zero_bias ? Eigen::VectorXd::Zero(cfg.bias.size()) : cfg.bias;
    world.bias.drift_rate = zero_bias ? 0.0 : cfg.drift_rate;
    world.cameras = cfg.cameras;
    world.scene = cfg.scene;
    world.target_point = cfg.target_point;
    world.rng_seed = trial_seed;
    world.pixel_noise_sigma = task.pixel_noise_sigma;
    world.background_noise = task.background_noise;
    if (task.clutter_count > 0) {
        std::vector<Eigen::Vector3d> viewpoints;
        for (const auto& cam : world.cameras)
            viewpoints.push_back(-cam.extrinsic.rotation.transpose() * cam.extrinsic.translation);
        world.clutter = make_clutter(trial_seed, task.clutter_count, cfg.target_point,
                                     task.clutter_spread, viewpoints);
    }
    return world;
}

TrialResult run_trial(const AppConfig& cfg, const TaskConfig& task, double speed_cap, int trial,
                      const RunOptions& opt) {
    const std::uint64_t trial_seed = mix64(opt.seed ^ mix64(kTrialStream + trial));
    World world = build_world(cfg, task, trial_seed, opt.zero_bias);

    // Randomized start: joint jitter plus a short open-loop approach toward a
    // coarsely localized target (stands in for the approach phase).
    auto rng = make_stream(trial_seed, kTrialStream, 0, static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> jitter(-task.start_jitter, task.start_jitter);
    for (Eigen::Index j = 0; j < world.true_q.angles.size(); ++j)
        world.true_q.angles[j] += jitter(rng);

    std::normal_distribution<double> coarse(0.0, cfg.target_jitter);
    Eigen::Vector3d perceived_target = cfg.target_point;
    for (int k = 0; k < 3; ++k) perceived_target[k] += coarse(rng);
    for (int s = 0; s < 4; ++s) {
        const Eigen::Vector3d to_target =
            perceived_target - forward_kinematics(world.arm, world.true_q).translation;
        // Stop the approach short of the goal so the servo has work to do.
        world.true_q.angles += dls_joint_step(world.arm, world.true_q, 0.15 * to_target);
    }

    const ProjectionMatrix Pi_l = world.cameras[0].projection();
    const ProjectionMatrix Pi_r = world.cameras[1].projection();
    const StereoFeature u_g = stereo_feature(world.target_point, Pi_l, Pi_r);

    ServoConfig servo_cfg = cfg.servo;
    servo_cfg.max_speed = speed_cap;
    if (opt.max_iters_override >= 0) servo_cfg.max_iters = opt.max_iters_override;

    std::vector<Filter> filters;
    if (!opt.oracle_feedback) {
        const JointConfig reported0 = world.bias.apply(world.true_q, world.time);
        filters = make_filters(cfg, world, reported0, trial_seed, opt.threads);
        warmup_filters(world, filters, cfg.warmup_steps);
    }

    TrialResult result;
    result.trial = trial;
    result.speed = speed_cap;
    result.servo = servo_loop(world, filters, u_g, servo_cfg);
    result.success = result.servo.converged;
    result.final_error_px = result.servo.final_error;
    result.iterations = result.servo.iterations;
    result.reinit_count = result.servo.reinit_count;

    const Eigen::Vector3d true_pos = world.true_end_effector().translation;
    const Eigen::Vector3d fk_pos =
        forward_kinematics(world.arm, world.bias.apply(world.true_q, world.time)).translation;
    result.fk_position_error = (fk_pos - true_pos).norm();
    if (opt.oracle_feedback) {
        result.eap_position_error = 0.0;
    } else if (filters.size() == 1) {
        result.eap_position_error =
            (result.servo.trace.back().eap_left.position - true_pos).norm();
    } else {
        // Each per-camera filter constrains its own image plane; the stereo
        // position estimate is the triangulation of the projected estimates.
        const Eigen::Vector3d eap_pos =
            triangulate_feature(result.servo.trace.back().u_e, Pi_l, Pi_r);
        result.eap_position_error = (eap_pos - true_pos).norm();
    }
    return result;
}

namespace {

ScenarioResult run_task(const AppConfig& cfg, const TaskConfig& task, const RunOptions& opt) {
    ScenarioResult result;
    for (std::size_t s = 0; s < task.speeds.size(); ++s)
        for (int t = 0; t < task.trials; ++t)
            result.trials.push_back(
                run_trial(cfg, task, task.speeds[s], static_cast<int>(s) * 1000 + t, opt));
    return result;
}

}  // namespace

ScenarioResult run_task1(const AppConfig& cfg, const RunOptions& opt) {
    return run_task(cfg, cfg.task1, opt);
}

ScenarioResult run_task2(const AppConfig& cfg, const RunOptions& opt) {
    return run_task(cfg, cfg.task2, opt);
}

std::vector<SpeedAggregate> ScenarioResult::aggregates() const {
    std::vector<double> speeds;
    for (const auto& t : trials)
        if (std::find(speeds.begin(), speeds.end(), t.speed) == speeds.end())
            speeds.push_back(t.speed);

    std::vector<SpeedAggregate> out;
    for (double speed : speeds) {
        SpeedAggregate agg;
        agg.speed = speed;
        std::vector<double> errors;
        for (const auto& t : trials) {
            if (t.speed != speed) continue;
            ++agg.trials;
            if (t.success) ++agg.successes;
            errors.push_back(t.final_error_px);
        }
        agg.mean_final_error = mean_of(errors);
        agg.std_final_error = std_of(errors, agg.mean_final_error);
        out.push_back(agg);
    }
    return out;
}

void emit_report(const ScenarioResult& result, const AppConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream out(fs::path(out_dir) / "trials.csv");
        out << "row,trial,speed,success,final_error_px,iterations,reinits,eap_pos_err_m,fk_pos_err_m\n";
        for (const auto& t : result.trials) {
            out << "trial," << t.trial << ',' << format_double(t.speed) << ',' << (t.success ? 1 : 0)
                << ',' << format_double(t.final_error_px) << ',' << t.iterations << ','
                << t.reinit_count << ',' << format_double(t.eap_position_error) << ','
                << format_double(t.fk_position_error) << '\n';
        }
        for (const auto& agg : result.aggregates()) {
            out << "aggregate," << agg.successes << ',' << format_double(agg.speed) << ','
                << agg.trials << ',' << format_double(agg.mean_final_error) << ",,,"
                << format_double(agg.std_final_error) << ",\n";
        }
    }

    for (const auto& t : result.trials) {
        std::ofstream out(fs::path(out_dir) / ("trace_" + std::to_string(t.trial) + ".csv"));
        out << "iteration,e_ul,e_ur,e_vl,e_norm,u_l,u_r,v_l,"
               "eap_px,eap_py,eap_pz,eap_ox,eap_oy,eap_oz,vx,vy,vz\n";
        for (const auto& row : t.servo.trace) {
            out << row.iteration << ',' << format_double(row.e.x()) << ',' << format_double(row.e.y())
                << ',' << format_double(row.e.z()) << ',' << format_double(row.e_norm) << ','
                << format_double(row.u_e.u_l) << ',' << format_double(row.u_e.u_r) << ','
                << format_double(row.u_e.v_l) << ',' << format_double(row.eap_left.position.x())
                << ',' << format_double(row.eap_left.position.y()) << ','
                << format_double(row.eap_left.position.z()) << ','
                << format_double(row.eap_left.orientation.x()) << ','
                << format_double(row.eap_left.orientation.y()) << ','
                << format_double(row.eap_left.orientation.z()) << ','
                << format_double(row.velocity.x()) << ',' << format_double(row.velocity.y()) << ','
                << format_double(row.velocity.z()) << '\n';
        }
    }

    // Pixel-space trajectory plots, one canvas per camera.
    const ProjectionMatrix Pi_r = cfg.cameras[1].projection();
    for (int cam = 0; cam < 2; ++cam) {
        const Intrinsics& K = cfg.cameras[cam].intrinsics;
        std::vector<std::uint8_t> canvas(static_cast<std::size_t>(K.width) * K.height * 3, 255);
        auto put = [&](double u, double v, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
            const int x = static_cast<int>(std::lround(u));
            const int y = static_cast<int>(std::lround(v));
            if (x < 0 || x >= K.width || y < 0 || y >= K.height) return;
            const std::size_t idx = (static_cast<std::size_t>(y) * K.width + x) * 3;
            canvas[idx] = r;
            canvas[idx + 1] = g;
            canvas[idx + 2] = b;
        };
        for (std::size_t ti = 0; ti < result.trials.size(); ++ti) {
            const std::uint8_t shade = static_cast<std::uint8_t>(40 + (ti * 53) % 180);
            for (const auto& row : result.trials[ti].servo.trace) {
                if (cam == 0) {
                    put(row.u_e.u_l, row.u_e.v_l, shade, shade / 2, 200);
                } else {
                    try {
                        const PixelPoint p = project_point(Pi_r, row.eap_right.position);
                        put(p.u, p.v, shade, shade / 2, 200);
                    } catch (const NonPositiveDepth&) {
                    }
                }
            }
        }
        // Goal cross in red.
        try {
            const PixelPoint goal = project_point(cfg.cameras[cam].projection(), cfg.target_point);
            for (int d = -4; d <= 4; ++d) {
                put(goal.u + d, goal.v, 220, 20, 20);
                put(goal.u, goal.v + d, 220, 20, 20);
            }
        } catch (const NonPositiveDepth&) {
        }
        write_png_rgb((fs::path(out_dir) / (cam == 0 ? "traj_left.png" : "traj_right.png")).string(),
                      K.width, K.height, canvas);
    }
}

std::vector<SpeedAggregate> aggregates_from_csv(const std::string& path) {
    std::vector<SpeedAggregate> out;
    for (const auto& row : read_csv(path)) {
        if (row.empty() || row[0] != "aggregate") continue;
        SpeedAggregate agg;
        agg.successes = std::stoi(row[1]);
        agg.speed = std::stod(row[2]);
        agg.trials = std::stoi(row[3]);
        agg.mean_final_error = std::stod(row[4]);
        agg.std_final_error = std::stod(row[7]);
        out.push_back(agg);
    }
    return out;
}

std::vector<TrackStepStats> run_track(const AppConfig& cfg, std::uint64_t seed, int steps,
                                      unsigned threads, const std::string& trace_path,
                                      const std::string& descriptor_dump_path) {
    World world = build_world(cfg, cfg.task1, mix64(seed), false);
    const JointConfig reported0 = world.bias.apply(world.true_q, world.time);
    std::vector<Filter> filters = make_filters(cfg, world, reported0, mix64(seed), threads);

    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        trace << "step,filter,particle,weight,px,py,pz,ox,oy,oz\n";
    }

    const Eigen::Vector3d true_pos = world.true_end_effector().translation;
    std::vector<TrackStepStats> stats;
    for (int s = 0; s < steps; ++s) {
        Observation obs = observe(world);
        TrackStepStats row;
        row.step = s;
        std::vector<Pose> eaps;
        for (std::size_t f = 0; f < filters.size(); ++f) {
            const std::vector<Image> imgs = filters.size() == 1
                                                ? obs.images
                                                : std::vector<Image>{obs.images[f]};
            const StepResult r = filters[f].step(obs.reported_q, obs.reported_q, imgs);
            eaps.push_back(r.eap);
            row.ess += r.ess;
            if (trace.is_open()) {
                const auto& set = filters[f].particles();
                for (std::size_t i = 0; i < set.size(); ++i) {
                    const auto& p = set.particles[i];
                    trace << s << ',' << f << ',' << i << ',' << format_double(p.weight) << ','
                          << format_double(p.state.position.x()) << ','
                          << format_double(p.state.position.y()) << ','
                          << format_double(p.state.position.z()) << ','
                          << format_double(p.state.orientation.x()) << ','
                          << format_double(p.state.orientation.y()) << ','
                          << format_double(p.state.orientation.z()) << '\n';
                }
            }
        }
        row.ess /= static_cast<double>(filters.size());
        if (eaps.size() == 1) {
            row.eap_position_error = (eaps[0].position - true_pos).norm();
        } else {
            const PixelPoint l = project_point(world.cameras[0].projection(), eaps[0].position);
            const PixelPoint r = project_point(world.cameras[1].projection(), eaps[1].position);
            row.eap_position_error =
                (triangulate_feature({l.u, r.u, l.v}, world.cameras[0].projection(),
                                     world.cameras[1].projection()) -
                 true_pos).norm();
        }
        row.fk_position_error =
            (forward_kinematics(world.arm, obs.reported_q).translation - true_pos).norm();
        stats.push_back(row);
    }

    if (!descriptor_dump_path.empty()) {
        // Camera-image descriptors of the final observation, one row per camera.
        std::ofstream dump(descriptor_dump_path);
        Observation obs = observe(world);
        for (std::size_t c = 0; c < obs.images.size(); ++c) {
            const Descriptor d = compute_hog(obs.images[c], cfg.filter.hog);
            dump << c;
            for (double v : d.values) dump << ',' << format_double(v);
            dump << '\n';
        }
    }
    return stats;
}

}  // namespace servotrack::sim
