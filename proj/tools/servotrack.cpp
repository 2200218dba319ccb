#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

#include "servotrack/config.hpp"
#include "servotrack/io.hpp"
#include "servotrack/parallel.hpp"
#include "servotrack/rng.hpp"
#include "servotrack/sim/scenario.hpp"

#ifndef SERVOTRACK_ASSET_DIR
#define SERVOTRACK_ASSET_DIR "assets"
#endif

namespace {

using namespace servotrack;

int cmd_track(const std::string& config_path, std::uint64_t seed, int steps, unsigned threads,
              const std::string& trace, const std::string& dump_descriptors) {
    const AppConfig cfg = load_config(config_path);
    const auto stats = sim::run_track(cfg, seed, steps, threads, trace, dump_descriptors);
    std::printf("step,eap_pos_err_m,fk_pos_err_m,ess\n");
    for (const auto& s : stats)
        std::printf("%d,%.6f,%.6f,%.2f\n", s.step, s.eap_position_error, s.fk_position_error, s.ess);
    return 0;
}

int cmd_servo(const std::string& config_path, int task, std::uint64_t seed, unsigned threads,
              const std::string& out_dir, bool oracle, bool zero_bias, int max_iters) {
    const AppConfig cfg = load_config(config_path);
    sim::RunOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    opt.oracle_feedback = oracle;
    opt.zero_bias = zero_bias;
    opt.max_iters_override = max_iters;

    const auto t0 = std::chrono::steady_clock::now();
    const sim::ScenarioResult result = task == 1 ? sim::run_task1(cfg, opt) : sim::run_task2(cfg, opt);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    sim::emit_report(result, cfg, out_dir);
    for (const auto& agg : result.aggregates())
        std::printf("speed %.3f m/s: %d/%d converged, final error %.3f +/- %.3f px\n", agg.speed,
                    agg.successes, agg.trials, agg.mean_final_error, agg.std_final_error);
    std::printf("total wall time: %.1f s; report written to %s\n", seconds, out_dir.c_str());

    for (const auto& agg : result.aggregates())
        if (agg.successes < agg.trials) return 2;
    return 0;
}

int cmd_bench(const std::string& config_path, const std::vector<int>& particle_counts,
              std::uint64_t seed, unsigned threads) {
    AppConfig cfg = load_config(config_path);
    sim::World world = sim::build_world(cfg, cfg.task1, mix64(seed), false);
    const JointConfig q0 = world.bias.apply(world.true_q, world.time);
    const sim::Observation obs = sim::observe(world);

    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t) {
        return std::chrono::duration<double, std::milli>(clock::now() - t).count();
    };

    std::printf("threads: %u, cameras: %zu, image: %dx%d\n", effective_thread_count(threads),
                world.cameras.size(), world.cameras[0].intrinsics.width,
                world.cameras[0].intrinsics.height);
    std::printf("particles,predict_ms,render_ms,hog_ms,weight_ms,resample_ms,step_ms\n");

    for (int n : particle_counts) {
        FilterConfig fc = cfg.filter;
        fc.n_particles = n;
        fc.threads = threads;

        ParticleSet set = initialize(world.arm, q0, fc, seed);
        const Transform delta = Transform::identity();

        auto t = clock::now();
        set = predict(set, delta, fc.noise, 1);
        const double predict_ms = ms_since(t);

        // Render and HOG timed over all particles and cameras, the parallel
        // section of a step.
        std::vector<Image> rendered(set.size() * world.cameras.size());
        t = clock::now();
        parallel_for(set.size(), effective_thread_count(threads), [&](std::size_t i) {
            for (std::size_t c = 0; c < world.cameras.size(); ++c)
                rendered[i * world.cameras.size() + c] =
                    render(world.scene, set.particles[i].state, world.cameras[c].intrinsics,
                           world.cameras[c].extrinsic);
        });
        const double render_ms = ms_since(t);

        std::vector<Descriptor> observed(world.cameras.size());
        for (std::size_t c = 0; c < world.cameras.size(); ++c)
            observed[c] = compute_hog(obs.images[c], fc.hog);
        std::vector<double> distances(set.size(), 0.0);
        t = clock::now();
        parallel_for(set.size(), effective_thread_count(threads), [&](std::size_t i) {
            for (std::size_t c = 0; c < world.cameras.size(); ++c) {
                const Descriptor d = compute_hog(rendered[i * world.cameras.size() + c], fc.hog);
                distances[i] += descriptor_distance(observed[c], d);
            }
        });
        const double hog_ms = ms_since(t);

        std::vector<double> lik(set.size());
        t = clock::now();
        for (std::size_t i = 0; i < set.size(); ++i) lik[i] = std::exp(-distances[i]);
        set = update_weights_from_likelihoods(set, lik);
        const double weight_ms = ms_since(t);

        t = clock::now();
        auto rng = make_stream(seed, 0x72657361ULL, 1, 0);
        set = systematic_resample(set, rng);
        (void)eap_estimate(set);
        const double resample_ms = ms_since(t);

        // Full step through the real path for the end-to-end number.
        Filter filter(world.arm, &world.scene, world.cameras, fc, q0, seed);
        t = clock::now();
        filter.step(q0, q0, obs.images);
        const double step_ms = ms_since(t);

        std::printf("%d,%.1f,%.1f,%.1f,%.2f,%.2f,%.1f\n", n, predict_ms, render_ms, hog_ms,
                    weight_ms, resample_ms, step_ms);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markerless end-effector tracking and visual servoing simulator"};
    app.require_subcommand(1);

    std::string config_path = std::string(SERVOTRACK_ASSET_DIR) + "/default.cfg";
    std::uint64_t seed = 0;
    unsigned threads = 0;

    auto* track = app.add_subcommand("track", "Static-pose tracking run, error per step");
    int steps = 30;
    std::string trace_path, dump_path;
    track->add_option("--config", config_path, "Config file");
    track->add_option("--seed", seed, "RNG seed");
    track->add_option("--steps", steps, "Filter steps to run");
    track->add_option("--threads", threads, "Worker threads (0 = hardware)");
    track->add_option("--trace", trace_path, "Per-step particle dump CSV");
    track->add_option("--dump-descriptors", dump_path, "Camera descriptor dump CSV");

    auto* servo = app.add_subcommand("servo", "Closed-loop reaching scenario");
    int task = 1;
    std::string out_dir = "out";
    bool oracle = false, zero_bias = false;
    int max_iters = -1;
    servo->add_option("--task", task, "Scenario: 1 (clean) or 2 (clutter)")->check(CLI::Range(1, 2));
    servo->add_option("--config", config_path, "Config file");
    servo->add_option("--seed", seed, "RNG seed");
    servo->add_option("--threads", threads, "Worker threads (0 = hardware)");
    servo->add_option("--out", out_dir, "Report directory");
    servo->add_flag("--oracle", oracle, "Bypass the filter, feed true pose to the controller");
    servo->add_flag("--zero-bias", zero_bias, "Disable encoder bias");
    servo->add_option("--max-iters", max_iters, "Override servo iteration cap");

    auto* bench = app.add_subcommand("bench", "Per-stage filter step timing");
    std::vector<int> particle_counts{100};
    bench->add_option("--particles", particle_counts, "Particle counts to time")->delimiter(',');
    bench->add_option("--config", config_path, "Config file");
    bench->add_option("--seed", seed, "RNG seed");
    bench->add_option("--threads", threads, "Worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed())
            return cmd_track(config_path, seed, steps, threads, trace_path, dump_path);
        if (servo->parsed())
            return cmd_servo(config_path, task, seed, threads, out_dir, oracle, zero_bias, max_iters);
        return cmd_bench(config_path, particle_counts, seed, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
