#ifndef SERVOTRACK_SIM_SCENARIO_HPP
#define SERVOTRACK_SIM_SCENARIO_HPP

#include <optional>
#include <string>

#include "servotrack/config.hpp"
#include "servotrack/servo.hpp"
#include "servotrack/sim/world.hpp"

namespace servotrack::sim {

struct TrialResult {
    int trial = 0;
    double speed = 0.0;            // [m/s] cap used
    bool success = false;
    double final_error_px = 0.0;   // ||e||_2 at termination
    int iterations = 0;
    int reinit_count = 0;
    double eap_position_error = 0.0;  // [m], final EAP vs true pose
    double fk_position_error = 0.0;   // [m], biased FK vs true pose
    ServoResult servo;
};

struct SpeedAggregate {
    double speed = 0.0;
    int successes = 0;
    int trials = 0;
    double mean_final_error = 0.0;
    double std_final_error = 0.0;
};

struct ScenarioResult {
    std::vector<TrialResult> trials;

    std::vector<SpeedAggregate> aggregates() const;
};

struct RunOptions {
    std::uint64_t seed = 0;
    bool oracle_feedback = false;  // bypass the filter, feed true pose to the projection
    bool zero_bias = false;
    unsigned threads = 0;          // per-filter worker count, 0 = hardware
    int max_iters_override = -1;   // < 0 keeps the config value
};

World build_world(const AppConfig& cfg, const TaskConfig& task, std::uint64_t trial_seed,
                  bool zero_bias);

TrialResult run_trial(const AppConfig& cfg, const TaskConfig& task, double speed_cap, int trial,
                      const RunOptions& opt);

/// Reaching from randomized starts at each configured speed cap.
ScenarioResult run_task1(const AppConfig& cfg, const RunOptions& opt);

/// Same loop with clutter and pixel noise enabled.
ScenarioResult run_task2(const AppConfig& cfg, const RunOptions& opt);

/// trials.csv (data rows + per-speed aggregate rows), trace_<trial>.csv and
/// traj_<cam>.png under out_dir.
void emit_report(const ScenarioResult& result, const AppConfig& cfg, const std::string& out_dir);

/// Parses a trials.csv back into per-speed aggregates (report verification).
std::vector<SpeedAggregate> aggregates_from_csv(const std::string& path);

/// Static-pose tracking run: per-step EAP and direct-kinematics errors.
struct TrackStepStats {
    int step = 0;
    double eap_position_error = 0.0;
    double fk_position_error = 0.0;
    double ess = 0.0;
};

std::vector<TrackStepStats> run_track(const AppConfig& cfg, std::uint64_t seed, int steps,
                                      unsigned threads, const std::string& trace_path = "",
                                      const std::string& descriptor_dump_path = "");

}  // namespace servotrack::sim

#endif
