#include "tnr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tnr/errors.hpp"
#include "tnr/feature_io.hpp"

namespace tnr {

// ---------------------------------------------------------------------------
// Configuration

namespace {

const char* to_string(WorldKind k) { return k == WorldKind::corridor ? "corridor" : "open_field"; }

WorldKind world_kind_from_string(const std::string& s) {
    if (s == "open_field") return WorldKind::open_field;
    if (s == "corridor") return WorldKind::corridor;
    throw ConfigError("unknown world kind '" + s + "'");
}

Platform platform_from_string(const std::string& s) {
    if (s == "ground") return Platform::ground;
    if (s == "uav") return Platform::uav;
    throw ConfigError("unknown platform '" + s + "'");
}

const char* to_string(ResamplingStyle r) {
    return r == ResamplingStyle::low_variance ? "low_variance" : "discard_reinit";
}

ResamplingStyle resampling_from_string(const std::string& s) {
    if (s == "discard_reinit") return ResamplingStyle::discard_reinit;
    if (s == "low_variance") return ResamplingStyle::low_variance;
    throw ConfigError("unknown resampling style '" + s + "'");
}

json noise_to_json(const NoiseModel& n) {
    return {{"pixel_sigma", n.pixel_sigma},           {"descriptor_sigma", n.descriptor_sigma},
            {"dropout_prob", n.dropout_prob},         {"distractor_count", n.distractor_count},
            {"odom_scale_sigma", n.odom_scale_sigma}, {"seed", n.seed}};
}

NoiseModel noise_from_json(const json& j, const NoiseModel& d) {
    NoiseModel n;
    n.pixel_sigma = value_or(j, "pixel_sigma", d.pixel_sigma);
    n.descriptor_sigma = value_or(j, "descriptor_sigma", d.descriptor_sigma);
    n.dropout_prob = value_or(j, "dropout_prob", d.dropout_prob);
    n.distractor_count = value_or(j, "distractor_count", d.distractor_count);
    n.odom_scale_sigma = value_or(j, "odom_scale_sigma", d.odom_scale_sigma);
    n.seed = value_or(j, "seed", d.seed);
    n.validate();
    return n;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

}  // namespace

json SimConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["platform"] = tnr::to_string(platform);
    j["camera"] = tnr::to_json(camera);
    j["camera_height"] = camera_height;
    j["descriptor_dim"] = descriptor_dim;
    j["global_dim"] = global_dim;
    j["world"] = {{"kind", to_string(world.kind)},
                  {"landmark_count", world.landmark_count},
                  {"margin", world.margin},
                  {"clearance", world.clearance},
                  {"z_min", world.z_min},
                  {"z_max", world.z_max},
                  {"corridor_half_width", world.corridor_half_width},
                  {"corridor_density", world.corridor_density}};
    j["teach_noise"] = noise_to_json(teach_noise);
    j["repeat_noise"] = noise_to_json(repeat_noise);
    j["capture"] = tnr::to_json(capture);
    j["histogram"] = tnr::to_json(histogram);
    j["vpr"] = {{"candidate_count", vpr.candidate_count},
                {"filtering_enabled", vpr.filtering_enabled},
                {"neighborhood_window", optional_to_json(vpr.neighborhood_window)}};
    j["belief"] = {{"particle_count", belief.particle_count},
                   {"motion_noise_sigma", belief.motion_noise_sigma},
                   {"discard_fraction", belief.discard_fraction},
                   {"certainty_window", optional_to_json(belief.certainty_window)},
                   {"window_spacings", belief.window_spacings},
                   {"certainty_enter_nav", belief.certainty_enter_nav},
                   {"certainty_exit_nav", belief.certainty_exit_nav},
                   {"skip_filtering_threshold", belief.skip_filtering_threshold},
                   {"weight_floor", belief.weight_floor},
                   {"estimate_top", belief.estimate_top},
                   {"resampling", to_string(belief.resampling)}};
    j["control"] = {{"kp_yaw", control.kp_yaw},
                    {"kp_vertical", control.kp_vertical},
                    {"v_max", control.v_max},
                    {"curvature_gain", control.curvature_gain},
                    {"shift_blend", control.shift_blend},
                    {"end_epsilon", control.end_epsilon},
                    {"stale_age", control.stale_age},
                    {"degrade_factor", control.degrade_factor}};
    j["control_period"] = control_period;
    j["vpr_period"] = vpr_period;
    j["teach_speed"] = teach_speed;
    j["teach_lookahead"] = teach_lookahead;
    j["max_time_factor"] = max_time_factor;
    return j;
}

SimConfig SimConfig::from_json(const json& j) { return from_json(j, SimConfig{}); }

SimConfig SimConfig::from_json(const json& j, const SimConfig& d) {
    SimConfig c = d;
    c.seed = value_or(j, "seed", d.seed);
    if (j.contains("platform")) c.platform = platform_from_string(j.at("platform").get<std::string>());
    if (j.contains("camera")) c.camera = camera_from_json(j.at("camera"));
    c.camera_height = value_or(j, "camera_height", d.camera_height);
    c.descriptor_dim = value_or(j, "descriptor_dim", d.descriptor_dim);
    c.global_dim = value_or(j, "global_dim", d.global_dim);
    const json w = value_or(j, "world", json::object());
    if (w.contains("kind")) c.world.kind = world_kind_from_string(w.at("kind").get<std::string>());
    c.world.landmark_count = value_or(w, "landmark_count", d.world.landmark_count);
    c.world.margin = value_or(w, "margin", d.world.margin);
    c.world.clearance = value_or(w, "clearance", d.world.clearance);
    c.world.z_min = value_or(w, "z_min", d.world.z_min);
    c.world.z_max = value_or(w, "z_max", d.world.z_max);
    c.world.corridor_half_width = value_or(w, "corridor_half_width", d.world.corridor_half_width);
    c.world.corridor_density = value_or(w, "corridor_density", d.world.corridor_density);
    c.teach_noise = noise_from_json(value_or(j, "teach_noise", json::object()), d.teach_noise);
    c.repeat_noise = noise_from_json(value_or(j, "repeat_noise", json::object()), d.repeat_noise);
    c.capture = capture_config_from_json(value_or(j, "capture", json::object()), d.capture);
    c.histogram = histogram_config_from_json(value_or(j, "histogram", json::object()), d.histogram);
    const json v = value_or(j, "vpr", json::object());
    c.vpr.candidate_count = value_or(v, "candidate_count", d.vpr.candidate_count);
    c.vpr.filtering_enabled = value_or(v, "filtering_enabled", d.vpr.filtering_enabled);
    if (v.contains("neighborhood_window"))
        c.vpr.neighborhood_window =
            v.at("neighborhood_window").is_null() ? std::nullopt : std::optional<double>(v.at("neighborhood_window").get<double>());
    const json b = value_or(j, "belief", json::object());
    c.belief.particle_count = value_or(b, "particle_count", d.belief.particle_count);
    c.belief.motion_noise_sigma = value_or(b, "motion_noise_sigma", d.belief.motion_noise_sigma);
    c.belief.discard_fraction = value_or(b, "discard_fraction", d.belief.discard_fraction);
    if (b.contains("certainty_window"))
        c.belief.certainty_window =
            b.at("certainty_window").is_null() ? std::nullopt : std::optional<double>(b.at("certainty_window").get<double>());
    c.belief.window_spacings = value_or(b, "window_spacings", d.belief.window_spacings);
    c.belief.certainty_enter_nav = value_or(b, "certainty_enter_nav", d.belief.certainty_enter_nav);
    c.belief.certainty_exit_nav = value_or(b, "certainty_exit_nav", d.belief.certainty_exit_nav);
    c.belief.skip_filtering_threshold = value_or(b, "skip_filtering_threshold", d.belief.skip_filtering_threshold);
    c.belief.weight_floor = value_or(b, "weight_floor", d.belief.weight_floor);
    c.belief.estimate_top = value_or(b, "estimate_top", d.belief.estimate_top);
    if (b.contains("resampling")) c.belief.resampling = resampling_from_string(b.at("resampling").get<std::string>());
    const json k = value_or(j, "control", json::object());
    c.control.kp_yaw = value_or(k, "kp_yaw", d.control.kp_yaw);
    c.control.kp_vertical = value_or(k, "kp_vertical", d.control.kp_vertical);
    c.control.v_max = value_or(k, "v_max", d.control.v_max);
    c.control.curvature_gain = value_or(k, "curvature_gain", d.control.curvature_gain);
    c.control.shift_blend = value_or(k, "shift_blend", d.control.shift_blend);
    c.control.end_epsilon = value_or(k, "end_epsilon", d.control.end_epsilon);
    c.control.stale_age = value_or(k, "stale_age", d.control.stale_age);
    c.control.degrade_factor = value_or(k, "degrade_factor", d.control.degrade_factor);
    c.control_period = value_or(j, "control_period", d.control_period);
    c.vpr_period = value_or(j, "vpr_period", d.vpr_period);
    c.teach_speed = value_or(j, "teach_speed", d.teach_speed);
    c.teach_lookahead = value_or(j, "teach_lookahead", d.teach_lookahead);
    c.max_time_factor = value_or(j, "max_time_factor", d.max_time_factor);
    c.validate();
    return c;
}

void SimConfig::validate() const {
    teach_noise.validate();
    repeat_noise.validate();
    capture.validate();
    histogram.validate();
    vpr.validate();
    belief.validate();
    control.validate();
    if (!(control_period > 0.0)) throw ConfigError("control_period must be positive");
    if (!(vpr_period >= control_period)) throw ConfigError("vpr_period must be >= control_period");
    if (!(teach_speed > 0.0) || !(teach_lookahead > 0.0)) throw ConfigError("teach speed/lookahead must be positive");
    if (descriptor_dim <= 0 || global_dim <= 0) throw ConfigError("descriptor dimensions must be positive");
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    try {
        return SimConfig::from_json(json::parse(bytes.begin(), bytes.end()));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), e.byte, e.what());
    } catch (const json::exception& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

void save_sim_config(const SimConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << config.to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Routes and worlds

namespace {

/// Polyline through `corners` with every interior corner replaced by a circular arc
/// of `radius`, sampled every `step` metres.
std::vector<Eigen::Vector3d> rounded_polyline(const std::vector<Eigen::Vector3d>& corners, double radius,
                                              double step = 0.05) {
    std::vector<Eigen::Vector3d> out{corners.front()};
    for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
        const Eigen::Vector3d a = (corners[i] - corners[i - 1]).normalized();
        const Eigen::Vector3d b = (corners[i + 1] - corners[i]).normalized();
        const double turn = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        const double cut = radius * std::tan(std::abs(turn) / 2.0);
        const Eigen::Vector3d start = corners[i] - cut * a;
        const Eigen::Vector3d left(-a.y(), a.x(), 0.0);
        const Eigen::Vector3d centre = start + (turn > 0.0 ? radius : -radius) * left;
        const double heading0 = std::atan2(a.y(), a.x());
        const int n = std::max(1, static_cast<int>(std::ceil(radius * std::abs(turn) / step)));
        for (int k = 0; k <= n; ++k) {
            const double h = heading0 + turn * k / n;
            const double sign = turn > 0.0 ? 1.0 : -1.0;
            // Point on the circle whose tangent has heading h.
            Eigen::Vector3d p = centre + radius * Eigen::Vector3d(sign * std::sin(h), -sign * std::cos(h), 0.0);
            p.z() = start.z();
            out.push_back(p);
        }
    }
    out.push_back(corners.back());
    return out;
}

}  // namespace

std::vector<Eigen::Vector3d> two_turn_route() {
    return rounded_polyline({{0.0, 0.0, 0.0}, {9.0, 0.0, 0.0}, {9.0, 6.3, 0.0}, {15.0, 6.3, 0.0}}, 1.5);
}

std::vector<Eigen::Vector3d> uav_ramp_route(double rise) {
    return {{0.0, 0.0, 0.5}, {3.0, 0.0, 0.5}, {9.0, 0.0, 0.5 + rise}, {10.0, 0.0, 0.5 + rise},
            {10.0, 3.0, 0.5 + rise}};
}

std::vector<Eigen::Vector3d> load_waypoints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open waypoint file " + path.string());
    std::vector<Eigen::Vector3d> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> v;
        double x;
        while (ss >> x) v.push_back(x);
        if (!ss.eof()) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number");
        if (v.empty()) continue;
        if (v.size() < 2 || v.size() > 3)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'x y [z]'");
        out.emplace_back(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
    }
    if (out.size() < 2) throw ConfigError(path.string() + ": need at least two waypoints");
    return out;
}

PathGeometry route_geometry(const std::vector<Eigen::Vector3d>& waypoints) {
    std::vector<Pose> poses;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        const std::size_t a = i + 1 < waypoints.size() ? i : i - 1;
        const Eigen::Vector3d d = waypoints[a + 1] - waypoints[a];
        poses.emplace_back(waypoints[i], std::atan2(d.y(), d.x()));
    }
    return PathGeometry(std::move(poses));
}

SimWorld build_world(const SimConfig& config, const std::vector<Eigen::Vector3d>& route) {
    const PathGeometry geometry = route_geometry(route);
    const std::uint64_t seed = mix_seed(config.seed, 0x3017d);
    if (config.world.kind == WorldKind::corridor)
        return SimWorld::corridor(seed, geometry, config.world.corridor_half_width, config.world.corridor_density,
                                  config.world.z_min, config.world.z_max, config.descriptor_dim, config.global_dim);
    Eigen::Vector3d lo = route.front();
    Eigen::Vector3d hi = route.front();
    for (const Eigen::Vector3d& p : route) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    lo.head<2>().array() -= config.world.margin;
    hi.head<2>().array() += config.world.margin;
    lo.z() = config.world.z_min;
    hi.z() = config.world.z_max;
    return SimWorld::open_field(seed, config.world.landmark_count, lo, hi, geometry, config.world.clearance,
                                config.descriptor_dim, config.global_dim);
}

// ---------------------------------------------------------------------------
// Teaching

namespace {

Pose camera_pose_at(const Eigen::Vector3d& route_point, double yaw, double camera_height) {
    return Pose(route_point + Eigen::Vector3d(0.0, 0.0, camera_height), yaw);
}

/// Progress along the route, searched forward from the previous progress so that
/// self-approaching routes never jump ahead.
double route_progress(const PathGeometry& route, const Eigen::Vector3d& p, double previous, double camera_height) {
    double best_s = previous;
    double best_d = std::numeric_limits<double>::infinity();
    const double end = std::min(route.total_length(), previous + 2.0);
    for (double s = previous; s <= end + 1e-9; s += 0.01) {
        Eigen::Vector3d q = route.arc_position(s).pose.position;
        q.z() += camera_height;
        const double d = (q - p).head<2>().norm();
        if (d < best_d) {
            best_d = d;
            best_s = s;
        }
    }
    return best_s;
}

}  // namespace

TeachResult run_teach(const SimConfig& config, const SimWorld& world, const std::vector<Eigen::Vector3d>& route) {
    config.validate();
    const PathGeometry geometry = route_geometry(route);
    const double dt = config.control_period;
    RobotState state{camera_pose_at(route.front(), geometry.waypoints().front().yaw, config.camera_height),
                     config.platform};
    KeyframeCapture capture(config.capture);
    Odometry odometry(config.teach_noise, config.platform);
    std::uint64_t frame = 0;
    auto render = [&] { return render_features(world, state.pose, config.camera, config.teach_noise, frame); };

    std::vector<Keyframe> keyframes;
    std::vector<Pose> trajectory{state.pose};
    if (auto kf = capture.tick({0.0, 0.0, config.teach_speed}, render)) keyframes.push_back(std::move(*kf));

    double progress = 0.0;
    const double max_ticks = 10.0 * geometry.total_length() / (config.teach_speed * dt) + 100.0;
    TeachResult result;
    for (std::size_t tick = 1; tick < static_cast<std::size_t>(max_ticks); ++tick) {
        progress = route_progress(geometry, state.pose.position, progress, config.camera_height);
        const double remaining = geometry.total_length() - progress;
        if (remaining < 0.5 * config.teach_speed * dt) break;

        // Pure pursuit towards a look-ahead point; the look-ahead shrinks near the end.
        const double look = std::min(config.teach_lookahead, remaining);
        Eigen::Vector3d target = geometry.arc_position(progress + look).pose.position;
        target.z() += config.camera_height;
        const Eigen::Vector3d delta = target - state.pose.position;
        const double local_x = delta.x() * std::cos(state.pose.yaw) + delta.y() * std::sin(state.pose.yaw);
        const double local_y = -delta.x() * std::sin(state.pose.yaw) + delta.y() * std::cos(state.pose.yaw);
        const double dist2 = local_x * local_x + local_y * local_y;
        const double curvature = dist2 > 1e-12 ? 2.0 * local_y / dist2 : 0.0;
        VelocityCommand cmd;
        cmd.forward = std::min(config.teach_speed / (1.0 + 0.5 * std::abs(curvature)), remaining / dt);
        cmd.yaw_rate = cmd.forward * curvature;
        if (config.platform == Platform::uav) {
            const double horizon = std::max(look, 1e-3) / std::max(cmd.forward, 1e-3);
            cmd.vertical = delta.z() / horizon;
        }

        state = step_kinematics(state, cmd, dt);
        ++frame;
        trajectory.push_back(state.pose);
        const double driven = odometry.measure(cmd.forward * dt, cmd, dt);
        if (auto kf = capture.tick({driven, cmd.yaw_rate * dt, cmd.forward}, render)) keyframes.push_back(std::move(*kf));
        result.ticks = tick;
    }
    if (auto kf = capture.finish(render)) keyframes.push_back(std::move(*kf));

    result.map = finalize_map(std::move(keyframes), config.capture.store_shifts, config.histogram, config.camera,
                              config.capture, capture.driven());
    result.map.taught_trajectory = PathGeometry(std::move(trajectory));
    return result;
}

// ---------------------------------------------------------------------------
// Repeating

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::normal: return "normal";
        case ScenarioKind::shifted_start: return "shifted_start";
        case ScenarioKind::start_middle: return "start_middle";
        case ScenarioKind::degraded: return "degraded";
    }
    return "normal";
}

ScenarioKind scenario_from_string(const std::string& name) {
    for (ScenarioKind k : {ScenarioKind::normal, ScenarioKind::shifted_start, ScenarioKind::start_middle,
                           ScenarioKind::degraded})
        if (name == to_string(k)) return k;
    throw ConfigError("unknown scenario '" + name + "'");
}

std::optional<std::pair<double, double>> first_turn_exit_window(const PathGeometry& taught, double enter_curvature,
                                                                double exit_curvature) {
    const double length = taught.total_length();
    const double step = 0.05;
    std::optional<double> turn_start;
    std::optional<double> exit;
    for (double s = 0.0; s <= length; s += step) {
        const double k = std::abs(taught.curvature(s));
        if (!turn_start) {
            if (k > enter_curvature) turn_start = s;
        } else if (!exit) {
            if (k < exit_curvature) exit = s;
        } else if (k > enter_curvature) {
            return std::make_pair(*exit, s);
        }
    }
    if (exit) return std::make_pair(*exit, length);
    return std::nullopt;
}

namespace {

std::uint64_t belief_seed(const SimConfig& config, std::uint64_t salt) { return mix_seed(config.seed, 0xbe11ef, salt); }

VprConfig vpr_config_for(const SimConfig& config, const Belief& belief) {
    VprConfig v = config.vpr;
    v.histogram = config.histogram;
    // Stage one is only skipped while navigation is certain enough.
    if (belief.skip_filtering) v.filtering_enabled = false;
    if (belief.mode == BeliefMode::initialization) v.filtering_enabled = true;
    return v;
}

}  // namespace

RepeatReport run_repeat(const SimConfig& config, const SimWorld& world, const TaughtPath& map, const Scenario& scenario) {
    config.validate();
    map.validate();
    if (map.taught_trajectory.empty()) throw ConfigError("simulated repeat needs the taught trajectory in the map");
    const PathGeometry& taught = map.taught_trajectory;
    const NoiseModel noise = scenario.kind == ScenarioKind::degraded && config.repeat_noise.noiseless()
                                 ? NoiseModel::night(config.repeat_noise.seed)
                                 : config.repeat_noise;

    Pose start = taught.waypoints().front();
    if (scenario.kind == ScenarioKind::shifted_start) start = start.offset(scenario.lateral_offset, 0.0);
    if (scenario.kind == ScenarioKind::start_middle)
        start = taught.arc_position(std::clamp(scenario.start_fraction, 0.0, 1.0) * taught.total_length()).pose;

    RobotState state{start, config.platform};
    PathBelief belief(map, config.belief, belief_seed(config, static_cast<std::uint64_t>(scenario.kind)));
    RepeatController controller(config.control, config.camera, config.platform, map.total_length);
    Odometry odometry(noise, config.platform);
    const double dt = config.control_period;
    const auto vpr_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.vpr_period / dt)));
    const auto max_ticks = static_cast<std::size_t>(
        std::ceil((config.max_time_factor * map.total_length / config.control.v_max + 60.0) / dt));
    const auto turn_window = first_turn_exit_window(taught);

    RepeatReport report;
    report.first_turn_exit = turn_window ? std::optional<double>(turn_window->first) : std::nullopt;
    double dev_sum = 0.0;
    double alt_sq = 0.0;
    std::size_t nav_ticks = 0;
    double max_after_turn = 0.0;
    bool seen_after_turn = false;

    for (std::size_t tick = 0; tick < max_ticks; ++tick) {
        const FeatureSet query = render_features(world, state.pose, config.camera, noise, tick);
        TickLog row;
        row.tick = tick;
        row.time = static_cast<double>(tick) * dt;
        row.pose = state.pose;
        if (tick % vpr_every == 0) {
            const VprResult vpr = recognize(query, map, vpr_config_for(config, belief.belief()), belief.estimate());
            belief.update(vpr, map);
            row.vpr_update = true;
        }
        const double est = belief.estimate();
        const Keyframe& keyframe = map.keyframes[map.closest_keyframe(est)];
        const ShiftEstimate shift = estimate_shift(query, keyframe.features, config.histogram);
        const ControlOutput out = controller.tick(est, shift, keyframe, belief.belief().mode);

        const NearestOnPath nearest = taught.nearest(state.pose.position, true);
        row.true_arc = nearest.arc_length;
        row.deviation = nearest.distance;
        row.altitude_error = state.pose.position.z() - nearest.point.z();
        row.estimate = est;
        row.certainty = belief.belief().certainty;
        row.mode = belief.belief().mode;
        row.command = out.command;
        report.log.push_back(row);

        if (row.mode == BeliefMode::navigation && !report.navigation_tick) {
            report.navigation_tick = tick;
            report.localization_error_at_start = std::abs(est - row.true_arc);
        }
        if (report.navigation_tick) {
            dev_sum += row.deviation;
            report.max_deviation = std::max(report.max_deviation, row.deviation);
            alt_sq += row.altitude_error * row.altitude_error;
            ++nav_ticks;
            if (turn_window && row.true_arc >= turn_window->first && row.true_arc < turn_window->second) {
                max_after_turn = std::max(max_after_turn, row.deviation);
                seen_after_turn = true;
            }
        }
        if (out.done) {
            report.completed = true;
            break;
        }
        const RobotState next = step_kinematics(state, out.command, dt);
        const double traveled = odometry.measure(out.command.forward * dt, out.command, dt);
        state = next;
        belief.predict(traveled);
    }
    if (nav_ticks > 0) {
        report.mean_deviation = dev_sum / static_cast<double>(nav_ticks);
        report.altitude_rms = std::sqrt(alt_sq / static_cast<double>(nav_ticks));
    }
    if (seen_after_turn) report.deviation_after_first_turn = max_after_turn;
    report.final_arc = taught.nearest(state.pose.position, true).arc_length;
    return report;
}

json RepeatReport::summary() const {
    auto opt = [](const auto& v) { return v ? json(*v) : json(); };
    return {{"completed", completed},
            {"ticks", log.size()},
            {"mean_deviation_m", mean_deviation},
            {"max_deviation_m", max_deviation},
            {"first_turn_exit_m", opt(first_turn_exit)},
            {"deviation_after_first_turn_m", opt(deviation_after_first_turn)},
            {"localization_error_at_start_m", opt(localization_error_at_start)},
            {"navigation_tick", opt(navigation_tick)},
            {"altitude_rms_m", altitude_rms},
            {"final_arc_m", final_arc}};
}

std::string RepeatReport::log_csv() const {
    std::string out =
        "tick,time,x,y,z,yaw,true_arc,estimate,certainty,forward,yaw_rate,vertical,mode,deviation,vpr_update\n";
    char buf[512];
    for (const TickLog& r : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.3f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%.9g,%d\n", r.tick,
                      r.time, r.pose.position.x(), r.pose.position.y(), r.pose.position.z(), r.pose.yaw, r.true_arc,
                      r.estimate, r.certainty, r.command.forward, r.command.yaw_rate, r.command.vertical,
                      tnr::to_string(r.mode), r.deviation, r.vpr_update ? 1 : 0);
        out += buf;
    }
    return out;
}

std::vector<double> localize_stationary(const SimConfig& config, const SimWorld& world, const TaughtPath& map,
                                        double s0, std::size_t updates, std::uint64_t seed) {
    const Pose pose = map.taught_trajectory.arc_position(s0).pose;
    PathBelief belief(map, config.belief, mix_seed(seed, 0x1d0c));
    VprConfig vpr = config.vpr;
    vpr.histogram = config.histogram;
    vpr.filtering_enabled = true;
    std::vector<double> estimates;
    for (std::size_t u = 0; u < updates; ++u) {
        const FeatureSet query = render_features(world, pose, config.camera, config.repeat_noise, mix_seed(seed, u));
        belief.update(recognize(query, map, vpr), map);
        belief.predict(0.0);
        estimates.push_back(belief.estimate());
    }
    return estimates;
}

DatasetScene dataset_scene(std::uint64_t seed, std::size_t positions, WorldKind kind, int descriptor_dim,
                           int global_dim) {
    const double length = positions > 1 ? static_cast<double>(positions - 1) : 1.0;
    const double height = 0.5;
    // Gentle S-bend so that positions see varied parts of the scene.
    std::vector<Pose> poses;
    for (double x = 0.0; x <= length + 1e-9; x += 0.25) {
        const double y = 1.5 * std::sin(2.0 * 3.14159265358979323846 * x / std::max(length, 1.0));
        const double dy = 1.5 * 2.0 * 3.14159265358979323846 / std::max(length, 1.0) *
                          std::cos(2.0 * 3.14159265358979323846 * x / std::max(length, 1.0));
        poses.emplace_back(x, y, height, std::atan2(dy, 1.0));
    }
    DatasetScene scene;
    scene.trajectory = PathGeometry(std::move(poses));
    const std::uint64_t world_seed = mix_seed(seed, 0xda7a);
    if (kind == WorldKind::corridor) {
        scene.world = SimWorld::corridor(world_seed, scene.trajectory, 2.0, 6.0, -0.5, 2.5, descriptor_dim, global_dim);
    } else {
        const Eigen::Vector3d lo(-30.0, -32.0, -0.5);
        const Eigen::Vector3d hi(length + 30.0, 32.0, 4.0);
        const auto count = static_cast<std::size_t>(0.6 * (hi.x() - lo.x()) * (hi.y() - lo.y()));
        scene.world = SimWorld::open_field(world_seed, count, lo, hi, scene.trajectory, 3.0, descriptor_dim, global_dim);
    }
    return scene;
}

}  // namespace tnr
