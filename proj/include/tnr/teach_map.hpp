#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "tnr/features.hpp"
#include "tnr/geometry.hpp"
#include "tnr/shift_histogram.hpp"

namespace tnr {

struct Keyframe {
    double arc_length = 0.0;  // odometry distance driven when the image was captured
    FeatureSet features;
    std::optional<Eigen::Vector2d> stored_shift;  // shift from the previous keyframe to this one
    double taught_forward_speed = 0.0;
    double taught_curvature = 0.0;
};

struct CaptureConfig {
    double d_straight = 1.0;
    double d_turn = 0.3;
    double heading_threshold = 10.0 * 3.14159265358979323846 / 180.0;
    bool store_shifts = false;

    void validate() const;
};

struct TaughtPath {
    std::vector<Keyframe> keyframes;
    double total_length = 0.0;
    CaptureConfig capture;
    HistogramConfig histogram;
    CameraModel camera = CameraModel::default_camera();
    /// Ground-truth poses recorded while teaching (simulation only; empty for real maps).
    PathGeometry taught_trajectory;

    std::size_t size() const { return keyframes.size(); }
    double mean_spacing() const;
    /// Index of the keyframe whose arc-length is closest to s (lower index on ties).
    std::size_t closest_keyframe(double s) const;
    /// Keyframes i, i+1 with arc(i) <= s <= arc(i+1), clamped to the ends.
    std::pair<std::size_t, std::size_t> bracket(double s) const;

    /// Throws UnusablePathError when the path has < 2 keyframes, non-increasing arc-lengths,
    /// a stored shift on the first keyframe, or total_length below the last keyframe.
    void validate() const;
};

struct OdometryStep {
    double distance = 0.0;       // driven since the previous tick, >= 0
    double heading_change = 0.0; // radians since the previous tick
    double speed = 0.0;          // current forward speed, m/s
};

/// Adaptive keyframe trigger: captures after d_straight metres, or after d_turn metres
/// once the heading has changed by at least heading_threshold.
class KeyframeCapture {
public:
    explicit KeyframeCapture(const CaptureConfig& config);

    /// Advances the odometry accumulators and returns a keyframe when the trigger fires.
    /// The first tick always captures (arc-length 0). `render` is only called on capture.
    std::optional<Keyframe> tick(const OdometryStep& step, const std::function<FeatureSet()>& render);
    std::optional<Keyframe> tick(const OdometryStep& step, const FeatureSet& features);

    /// Captures the path end if anything was driven since the last keyframe.
    std::optional<Keyframe> finish(const std::function<FeatureSet()>& render);

    double driven() const { return driven_; }

private:
    Keyframe emit(const FeatureSet& features);

    CaptureConfig config_;
    bool started_ = false;
    double driven_ = 0.0;
    double since_distance_ = 0.0;
    double since_heading_ = 0.0;
    double last_speed_ = 0.0;
};

/// Builds the navigable path; computes stored shifts estimate_shift(k[i-1], k[i]) when
/// `store_shifts` is set. Throws UnusablePathError for fewer than two keyframes.
TaughtPath finalize_map(std::vector<Keyframe> keyframes, bool store_shifts, const HistogramConfig& config,
                        const CameraModel& camera, const CaptureConfig& capture = {},
                        std::optional<double> total_length = std::nullopt);

/// Map directory: manifest.json plus one TRFV feature file per keyframe.
inline constexpr int kMapFormatVersion = 1;
void save_map(const TaughtPath& path, const std::filesystem::path& directory);
TaughtPath load_map(const std::filesystem::path& directory);

}  // namespace tnr
