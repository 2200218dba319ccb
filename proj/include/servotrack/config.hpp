#ifndef SERVOTRACK_CONFIG_HPP
#define SERVOTRACK_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "servotrack/camera.hpp"
#include "servotrack/filter.hpp"
#include "servotrack/kinematics.hpp"
#include "servotrack/servo.hpp"

namespace servotrack {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned key-value text: "[section]" headers, "key = tokens" entries,
/// '#' comments. Repeated keys accumulate in order.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    Eigen::VectorXd get_vector(const std::string& section, const std::string& key) const;

    bool has_section(const std::string& section) const;

private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
    std::string origin_;
};

/// Chain definition: base transform plus per-link DH rows.
DHChain load_chain(const std::string& path);
DHChain parse_chain(const std::string& text, const std::string& origin = "<string>");

/// Per-task scenario knobs.
struct TaskConfig {
    std::vector<double> speeds{0.005, 0.02};
    int trials = 10;
    double start_jitter = 0.05;      // [rad] per joint, uniform
    int clutter_count = 0;
    double clutter_spread = 0.12;    // [m]
    double pixel_noise_sigma = 0.0;
    bool background_noise = false;
};

/// Everything needed to build the world, the trackers and the controller.
struct AppConfig {
    DHChain arm;
    JointConfig arm_q0;
    Eigen::VectorXd bias;            // [rad]
    double drift_rate = 0.0;
    Eigen::Vector3d target_point{Eigen::Vector3d::Zero()};
    double target_jitter = 0.01;     // [m], coarse-localization error
    std::vector<CameraModel> cameras;
    Scene scene;
    FilterConfig filter;
    ServoConfig servo;
    int warmup_steps = 15;
    TaskConfig task1;
    TaskConfig task2;
};

/// Loads the main config file; mesh and chain paths resolve relative to it.
AppConfig load_config(const std::string& path);

}  // namespace servotrack

#endif
