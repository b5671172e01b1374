#include "tnr/teach_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tnr/errors.hpp"
#include "tnr/feature_io.hpp"
#include "tnr/json_io.hpp"

namespace tnr {

void CaptureConfig::validate() const {
    if (!(d_turn > 0.0) || !(d_turn <= d_straight))
        throw ConfigError("capture config requires 0 < d_turn <= d_straight");
    if (!(heading_threshold > 0.0)) throw ConfigError("heading_threshold must be positive");
}

double TaughtPath::mean_spacing() const {
    if (keyframes.size() < 2) return 0.0;
    return (keyframes.back().arc_length - keyframes.front().arc_length) /
           static_cast<double>(keyframes.size() - 1);
}

std::size_t TaughtPath::closest_keyframe(double s) const {
    if (keyframes.empty()) throw UnusablePathError("empty map");
    std::size_t best = 0;
    double best_d = std::abs(keyframes[0].arc_length - s);
    for (std::size_t i = 1; i < keyframes.size(); ++i) {
        const double d = std::abs(keyframes[i].arc_length - s);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::pair<std::size_t, std::size_t> TaughtPath::bracket(double s) const {
    if (keyframes.empty()) throw UnusablePathError("empty map");
    if (s <= keyframes.front().arc_length) return {0, 0};
    if (s >= keyframes.back().arc_length) return {keyframes.size() - 1, keyframes.size() - 1};
    const auto it = std::upper_bound(keyframes.begin(), keyframes.end(), s,
                                     [](double v, const Keyframe& k) { return v < k.arc_length; });
    const std::size_t hi = static_cast<std::size_t>(it - keyframes.begin());
    return {hi - 1, hi};
}

void TaughtPath::validate() const {
    if (keyframes.size() < 2)
        throw UnusablePathError("a navigable path needs at least 2 keyframes, got " +
                                std::to_string(keyframes.size()));
    for (std::size_t i = 1; i < keyframes.size(); ++i)
        if (!(keyframes[i].arc_length > keyframes[i - 1].arc_length))
            throw UnusablePathError("keyframe arc-lengths not strictly increasing at index " + std::to_string(i));
    if (keyframes.front().stored_shift) throw UnusablePathError("first keyframe carries a stored shift");
    if (total_length < keyframes.back().arc_length)
        throw UnusablePathError("total length shorter than the last keyframe arc-length");
}

KeyframeCapture::KeyframeCapture(const CaptureConfig& config) : config_(config) { config_.validate(); }

Keyframe KeyframeCapture::emit(const FeatureSet& features) {
    Keyframe kf;
    kf.arc_length = driven_;
    kf.features = features;
    kf.taught_forward_speed = last_speed_;
    kf.taught_curvature = since_distance_ > 0.0 ? since_heading_ / since_distance_ : 0.0;
    since_distance_ = 0.0;
    since_heading_ = 0.0;
    return kf;
}

std::optional<Keyframe> KeyframeCapture::tick(const OdometryStep& step, const std::function<FeatureSet()>& render) {
    if (step.distance < 0.0) throw ConfigError("odometry must be monotone");
    driven_ += step.distance;
    since_distance_ += step.distance;
    since_heading_ += step.heading_change;
    last_speed_ = step.speed;
    if (!started_) {
        started_ = true;
        return emit(render());
    }
    const bool straight_due = since_distance_ >= config_.d_straight;
    const bool turn_due = since_distance_ >= config_.d_turn && std::abs(since_heading_) >= config_.heading_threshold;
    if (straight_due || turn_due) return emit(render());
    return std::nullopt;
}

std::optional<Keyframe> KeyframeCapture::tick(const OdometryStep& step, const FeatureSet& features) {
    return tick(step, [&features] { return features; });
}

std::optional<Keyframe> KeyframeCapture::finish(const std::function<FeatureSet()>& render) {
    if (!started_ || since_distance_ <= 0.0) return std::nullopt;
    return emit(render());
}

TaughtPath finalize_map(std::vector<Keyframe> keyframes, bool store_shifts, const HistogramConfig& config,
                        const CameraModel& camera, const CaptureConfig& capture,
                        std::optional<double> total_length) {
    if (keyframes.size() < 2)
        throw UnusablePathError("a navigable path needs at least 2 keyframes, got " +
                                std::to_string(keyframes.size()));
    TaughtPath path;
    path.capture = capture;
    path.capture.store_shifts = store_shifts;
    path.histogram = config;
    path.camera = camera;
    path.total_length = total_length.value_or(keyframes.back().arc_length);
    path.keyframes = std::move(keyframes);
    path.keyframes.front().stored_shift.reset();
    for (std::size_t i = 1; i < path.keyframes.size(); ++i) {
        Keyframe& kf = path.keyframes[i];
        if (store_shifts)
            kf.stored_shift = estimate_shift(path.keyframes[i - 1].features, kf.features, config).shift();
        else
            kf.stored_shift.reset();
    }
    path.validate();
    return path;
}

namespace {

std::string keyframe_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "kf_%06zu.trfv", i);
    return std::string("keyframes/") + buf;
}

}  // namespace

void save_map(const TaughtPath& path, const std::filesystem::path& directory) {
    path.validate();
    std::filesystem::create_directories(directory / "keyframes");
    json manifest;
    manifest["format"] = "tnr-map";
    manifest["version"] = kMapFormatVersion;
    manifest["camera"] = to_json(path.camera);
    manifest["capture"] = to_json(path.capture);
    manifest["histogram"] = to_json(path.histogram);
    manifest["store_shifts"] = path.capture.store_shifts;
    manifest["total_length"] = path.total_length;
    json rows = json::array();
    for (std::size_t i = 0; i < path.keyframes.size(); ++i) {
        const Keyframe& kf = path.keyframes[i];
        const std::string file = keyframe_file_name(i);
        write_feature_file(directory / file, kf.features);
        json row = {{"arc_length", kf.arc_length},
                    {"taught_forward_speed", kf.taught_forward_speed},
                    {"taught_curvature", kf.taught_curvature},
                    {"features", file}};
        row["stored_shift"] = kf.stored_shift ? json::array({kf.stored_shift->x(), kf.stored_shift->y()}) : json();
        rows.push_back(std::move(row));
    }
    manifest["keyframes"] = std::move(rows);
    if (!path.taught_trajectory.empty()) {
        json traj = json::array();
        for (const Pose& p : path.taught_trajectory.waypoints()) traj.push_back(to_json(p));
        manifest["taught_trajectory"] = std::move(traj);
    }
    std::ofstream out(directory / "manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + (directory / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

TaughtPath load_map(const std::filesystem::path& directory) {
    const std::filesystem::path manifest_path = directory / "manifest.json";
    const std::string source = manifest_path.string();
    const std::vector<std::uint8_t> bytes = read_file_bytes(manifest_path);
    json manifest;
    try {
        manifest = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(source, e.byte, e.what());
    }

    TaughtPath path;
    try {
        if (manifest.at("format").get<std::string>() != "tnr-map") throw ParseError(source, 0, "not a tnr map");
        const int version = manifest.at("version").get<int>();
        if (version != kMapFormatVersion)
            throw ParseError(source, 0, "unsupported map version " + std::to_string(version));
        path.camera = camera_from_json(manifest.at("camera"));
        path.capture = capture_config_from_json(manifest.at("capture"));
        path.capture.store_shifts = manifest.at("store_shifts").get<bool>();
        path.histogram = histogram_config_from_json(manifest.at("histogram"));
        path.total_length = manifest.at("total_length").get<double>();
        for (const json& row : manifest.at("keyframes")) {
            Keyframe kf;
            kf.arc_length = row.at("arc_length").get<double>();
            kf.taught_forward_speed = row.at("taught_forward_speed").get<double>();
            kf.taught_curvature = row.at("taught_curvature").get<double>();
            const json& shift = row.at("stored_shift");
            if (!shift.is_null()) kf.stored_shift = Eigen::Vector2d(shift.at(0).get<double>(), shift.at(1).get<double>());
            kf.features = read_feature_file(directory / row.at("features").get<std::string>()).set;
            path.keyframes.push_back(std::move(kf));
        }
        if (manifest.contains("taught_trajectory")) {
            std::vector<Pose> poses;
            for (const json& p : manifest.at("taught_trajectory")) poses.push_back(pose_from_json(p));
            path.taught_trajectory = PathGeometry(std::move(poses));
        }
    } catch (const json::exception& e) {
        throw ParseError(source, 0, std::string("invalid manifest: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(source, 0, std::string("invalid manifest: ") + e.what());
    }
    try {
        path.validate();
    } catch (const UnusablePathError& e) {
        throw ParseError(source, 0, e.what());
    }
    return path;
}

}  // namespace tnr
