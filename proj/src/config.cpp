#include "servotrack/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "servotrack/mesh.hpp"

namespace servotrack {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + ": cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            kv.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        kv.sections_[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    return parse_text(read_file(path, "config"), path);
}

bool KeyValueFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return false;
    for (const auto& [k, v] : it->second)
        if (k == key) return true;
    return false;
}

std::string KeyValueFile::get(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it != sections_.end())
        for (const auto& [k, v] : it->second)
            if (k == key) return v;
    throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "]");
}

std::string KeyValueFile::get_or(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    const auto it = sections_.find(section);
    if (it != sections_.end())
        for (const auto& [k, v] : it->second)
            if (k == key) out.push_back(v);
    return out;
}

double KeyValueFile::get_double(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    return std::stod(get(section, key));
}

int KeyValueFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    return std::stoi(get(section, key));
}

bool KeyValueFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": boolean expected for '" + key + "', got '" + v + "'");
}

Eigen::VectorXd KeyValueFile::get_vector(const std::string& section, const std::string& key) const {
    std::istringstream ss(get(section, key));
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    Eigen::VectorXd out(static_cast<Eigen::Index>(vals.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = vals[i];
    return out;
}

DHChain parse_chain(const std::string& text, const std::string& origin) {
    const KeyValueFile kv = KeyValueFile::parse_text(text, origin);
    DHChain chain;

    if (kv.has("base", "orientation")) {
        const Eigen::VectorXd o = kv.get_vector("base", "orientation");
        if (o.size() != 3) throw ConfigError(origin + ": base orientation needs 3 components");
        chain.base.rotation = rotation_exp(o.head<3>());
    }
    if (kv.has("base", "translation")) {
        const Eigen::VectorXd t = kv.get_vector("base", "translation");
        if (t.size() != 3) throw ConfigError(origin + ": base translation needs 3 components");
        chain.base.translation = t.head<3>();
    }

    for (const std::string& row : kv.get_all("links", "link")) {
        std::istringstream ss(row);
        DHLink link;
        std::string kind;
        if (!(ss >> link.a >> link.alpha >> link.d >> link.theta_offset >> kind))
            throw ConfigError(origin + ": link rows are 'a alpha d theta_offset revolute|fixed'");
        if (kind == "revolute") link.joint_kind = JointKind::Revolute;
        else if (kind == "fixed") link.joint_kind = JointKind::Fixed;
        else throw ConfigError(origin + ": unknown joint kind '" + kind + "'");
        chain.links.push_back(link);
    }
    if (chain.links.empty())
        throw ConfigError(origin + ": chain needs at least one link");
    return chain;
}

DHChain load_chain(const std::string& path) {
    return parse_chain(read_file(path, "chain"), path);
}

namespace {

Transform parse_offset_transform(const KeyValueFile& kv, const std::string& section) {
    Transform T;
    if (kv.has(section, "offset_orientation")) {
        const Eigen::VectorXd o = kv.get_vector(section, "offset_orientation");
        if (o.size() != 3) throw ConfigError(section + ": offset_orientation needs 3 components");
        T.rotation = rotation_exp(o.head<3>());
    }
    if (kv.has(section, "offset_translation")) {
        const Eigen::VectorXd t = kv.get_vector(section, "offset_translation");
        if (t.size() != 3) throw ConfigError(section + ": offset_translation needs 3 components");
        T.translation = t.head<3>();
    }
    return T;
}

CameraModel load_camera(const KeyValueFile& kv, const std::string& section,
                        const std::filesystem::path& base_dir) {
    CameraModel cam;
    cam.intrinsics.fx = kv.get_double(section, "fx", 320.0);
    cam.intrinsics.fy = kv.get_double(section, "fy", 320.0);
    cam.intrinsics.cx = kv.get_double(section, "cx", 160.0);
    cam.intrinsics.cy = kv.get_double(section, "cy", 120.0);
    cam.intrinsics.width = kv.get_int(section, "width", 320);
    cam.intrinsics.height = kv.get_int(section, "height", 240);

    Transform cam_to_world;  // camera frame as placed in the world
    if (kv.has(section, "mount_chain")) {
        const DHChain mount = load_chain((base_dir / kv.get(section, "mount_chain")).string());
        Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mount.revolute_count()));
        if (kv.has(section, "mount_q")) q = kv.get_vector(section, "mount_q");
        cam_to_world = forward_kinematics(mount, JointConfig(q)) * parse_offset_transform(kv, section);
    } else {
        cam_to_world = parse_offset_transform(kv, section);
    }
    cam.extrinsic = cam_to_world.inverse();
    return cam;
}

}  // namespace

AppConfig load_config(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse_file(path);
    const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();
    AppConfig cfg;

    cfg.arm = load_chain((base_dir / kv.get("world", "arm_chain")).string());
    cfg.arm_q0 = JointConfig(kv.get_vector("world", "arm_q0"));
    if (kv.has("world", "bias_deg"))
        cfg.bias = kv.get_vector("world", "bias_deg") * (3.14159265358979323846 / 180.0);
    else
        cfg.bias = Eigen::VectorXd::Zero(cfg.arm_q0.angles.size());
    cfg.drift_rate = kv.get_double("world", "drift_rate", 0.0);
    const Eigen::VectorXd tp = kv.get_vector("world", "target_point");
    if (tp.size() != 3) throw ConfigError("world.target_point needs 3 components");
    cfg.target_point = tp.head<3>();
    cfg.target_jitter = kv.get_double("world", "target_jitter_m", 0.01);

    for (const std::string& section : {"camera.left", "camera.right"}) {
        if (!kv.has_section(section))
            throw ConfigError("config: missing section [" + std::string(section) + "]");
        cfg.cameras.push_back(load_camera(kv, section, base_dir));
    }

    if (kv.has("scene", "light_dir")) {
        const Eigen::VectorXd l = kv.get_vector("scene", "light_dir");
        if (l.size() != 3) throw ConfigError("scene.light_dir needs 3 components");
        cfg.scene.light_dir = l.head<3>().normalized();
    }
    for (const std::string& row : kv.get_all("scene", "part")) {
        std::istringstream ss(row);
        std::string mesh_path;
        Eigen::Vector3d p, o;
        if (!(ss >> mesh_path >> p.x() >> p.y() >> p.z() >> o.x() >> o.y() >> o.z()))
            throw ConfigError("scene.part rows are '<mesh.obj> px py pz ox oy oz'");
        ScenePart part;
        part.mesh = load_mesh((base_dir / mesh_path).string());
        part.offset = transform_from_pose(Pose(p, o));
        cfg.scene.parts.push_back(std::move(part));
    }
    if (cfg.scene.parts.empty())
        throw ConfigError("config: [scene] needs at least one part");

    cfg.filter.n_particles = kv.get_int("filter", "particles", 100);
    cfg.filter.n_thr = kv.get_double("filter", "n_thr", 10.0);
    cfg.filter.sigma_lik = kv.get_double("filter", "sigma_lik", 0.0);
    cfg.filter.noise.sigma_p = kv.get_double("filter", "sigma_p", 0.005);
    cfg.filter.noise.sigma_theta = kv.get_double("filter", "sigma_theta_deg", 3.0);
    cfg.filter.noise.sigma_alpha = kv.get_double("filter", "sigma_alpha_deg", 1.5);
    cfg.filter.fuse_cameras = kv.get_bool("filter", "fuse_cameras", false);
    cfg.warmup_steps = kv.get_int("filter", "warmup_steps", 15);

    cfg.filter.hog.cell_size = kv.get_int("hog", "cell_size", 8);
    cfg.filter.hog.block_size = kv.get_int("hog", "block_size", 2);
    cfg.filter.hog.block_stride = kv.get_int("hog", "block_stride", 1);
    cfg.filter.hog.n_bins = kv.get_int("hog", "n_bins", 9);
    cfg.filter.hog.signed_orientation = kv.get_bool("hog", "signed", false);
    cfg.filter.hog.clip = kv.get_double("hog", "clip", 0.2);
    cfg.filter.hog.epsilon = kv.get_double("hog", "epsilon", 1e-6);

    cfg.servo.gain = kv.get_double("servo", "gain", 1.0);
    cfg.servo.convergence_px = kv.get_double("servo", "convergence_px", 1.0);
    cfg.servo.max_iters = kv.get_int("servo", "max_iters", 500);
    cfg.servo.dt = kv.get_double("servo", "dt", 0.1);
    cfg.servo.max_speed = kv.get_double("servo", "max_speed", 0.02);

    auto load_task = [&](const std::string& section, TaskConfig& task) {
        if (!kv.has_section(section)) return;
        if (kv.has(section, "speeds")) {
            const Eigen::VectorXd s = kv.get_vector(section, "speeds");
            task.speeds.assign(s.data(), s.data() + s.size());
        }
        task.trials = kv.get_int(section, "trials", task.trials);
        task.start_jitter = kv.get_double(section, "start_jitter_rad", task.start_jitter);
        task.clutter_count = kv.get_int(section, "clutter_count", task.clutter_count);
        task.clutter_spread = kv.get_double(section, "clutter_spread", task.clutter_spread);
        task.pixel_noise_sigma = kv.get_double(section, "pixel_noise_sigma", task.pixel_noise_sigma);
        task.background_noise = kv.get_bool(section, "background_noise", task.background_noise);
    };
    cfg.task2.speeds = {0.01};
    cfg.task2.clutter_count = 10;
    cfg.task2.pixel_noise_sigma = 0.01;
    cfg.task2.background_noise = true;
    load_task("task1", cfg.task1);
    load_task("task2", cfg.task2);

    return cfg;
}

}  // namespace servotrack
