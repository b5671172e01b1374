#include "tnr/json_io.hpp"

namespace tnr {

json to_json(const CameraModel& camera) {
    return {{"focal_length_px", camera.focal_length_px()},
            {"principal_point", {camera.principal_point().x(), camera.principal_point().y()}},
            {"image_size", {camera.image_size().x(), camera.image_size().y()}},
            {"near_plane", camera.near_plane()}};
}

CameraModel camera_from_json(const json& j) {
    const auto pp = j.at("principal_point");
    const auto size = j.at("image_size");
    return CameraModel(j.at("focal_length_px").get<double>(),
                       Eigen::Vector2d(pp.at(0).get<double>(), pp.at(1).get<double>()),
                       Eigen::Vector2i(size.at(0).get<int>(), size.at(1).get<int>()),
                       value_or(j, "near_plane", 0.05));
}

json to_json(const HistogramConfig& c) {
    return {{"bin_size_px", c.bin_size_px},
            {"gaussian_sigma_bins", c.gaussian_sigma_bins},
            {"gaussian_truncate_bins", c.gaussian_truncate_bins},
            {"max_features", c.max_features},
            {"subbin_refinement", c.subbin_refinement}};
}

HistogramConfig histogram_config_from_json(const json& j, const HistogramConfig& d) {
    HistogramConfig c;
    c.bin_size_px = value_or(j, "bin_size_px", d.bin_size_px);
    c.gaussian_sigma_bins = value_or(j, "gaussian_sigma_bins", d.gaussian_sigma_bins);
    c.gaussian_truncate_bins = value_or(j, "gaussian_truncate_bins", d.gaussian_truncate_bins);
    c.max_features = value_or(j, "max_features", d.max_features);
    c.subbin_refinement = value_or(j, "subbin_refinement", d.subbin_refinement);
    c.validate();
    return c;
}

json to_json(const CaptureConfig& c) {
    return {{"d_straight", c.d_straight},
            {"d_turn", c.d_turn},
            {"heading_threshold", c.heading_threshold},
            {"store_shifts", c.store_shifts}};
}

CaptureConfig capture_config_from_json(const json& j, const CaptureConfig& d) {
    CaptureConfig c;
    c.d_straight = value_or(j, "d_straight", d.d_straight);
    c.d_turn = value_or(j, "d_turn", d.d_turn);
    c.heading_threshold = value_or(j, "heading_threshold", d.heading_threshold);
    c.store_shifts = value_or(j, "store_shifts", d.store_shifts);
    c.validate();
    return c;
}

json to_json(const Pose& pose) {
    return json::array({pose.position.x(), pose.position.y(), pose.position.z(), pose.yaw});
}

Pose pose_from_json(const json& j) {
    return Pose(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>());
}

}  // namespace tnr
