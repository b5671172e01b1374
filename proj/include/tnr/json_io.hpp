#pragma once

// nlohmann/json adapters for the configuration and geometry types that appear in
// manifests and run configs.

#include <json.hpp>

#include "tnr/geometry.hpp"
#include "tnr/shift_histogram.hpp"
#include "tnr/teach_map.hpp"

namespace tnr {

using json = nlohmann::json;

json to_json(const CameraModel& camera);
CameraModel camera_from_json(const json& j);

json to_json(const HistogramConfig& config);
HistogramConfig histogram_config_from_json(const json& j, const HistogramConfig& defaults = {});

json to_json(const CaptureConfig& config);
CaptureConfig capture_config_from_json(const json& j, const CaptureConfig& defaults = {});

json to_json(const Pose& pose);  // [x, y, z, yaw]
Pose pose_from_json(const json& j);

/// Reads `key` when present, otherwise keeps `fallback`.
template <class T>
T value_or(const json& j, const char* key, const T& fallback) {
    if (!j.is_object()) return fallback;
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

}  // namespace tnr
