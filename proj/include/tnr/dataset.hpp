#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tnr/features.hpp"
#include "tnr/geometry.hpp"
#include "tnr/sim_world.hpp"

namespace tnr {

/// Camera displacement of a repeat-style view relative to the central (teach) view.
struct Transformation {
    double lateral_m = 0.0;  // left positive
    double yaw_rad = 0.0;    // counter-clockwise positive

    bool is_identity() const { return lateral_m == 0.0 && yaw_rad == 0.0; }
    std::string label() const;  // e.g. "lat+0.36_yaw-15"
    bool operator==(const Transformation&) const = default;
};

struct DatasetView {
    Transformation transformation;
    Pose pose;
    std::string features;  // path relative to the manifest directory
    std::string image;     // optional, set by image-based exporters
};

struct DatasetPosition {
    std::size_t index = 0;
    Pose pose;  // central forward-looking pose
    std::vector<DatasetView> views;
};

/// Contents of dataset.json.
struct DatasetManifest {
    CameraModel camera = CameraModel::default_camera();
    std::vector<DatasetPosition> positions;
    std::filesystem::path root;  // directory containing the manifest

    std::size_t view_count() const;
};

inline constexpr int kDatasetFormatVersion = 1;

DatasetManifest load_dataset_manifest(const std::filesystem::path& manifest_path);
void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& manifest_path);

struct ShiftDatasetSpec {
    std::size_t position_count = 51;
    std::vector<double> lateral_offsets{-0.36, 0.0, 0.36};
    std::vector<double> yaws{-15.0 * 3.14159265358979323846 / 180.0, 0.0, 15.0 * 3.14159265358979323846 / 180.0};
};

struct GeneratedDataset {
    DatasetManifest manifest;
    std::vector<FeatureSet> feature_sets;  // parallel to the views, position-major
};

/// Renders |offsets| x |yaws| views at each of `position_count` poses evenly spaced along
/// `trajectory`. View (position p, view v) uses render frame index p * views_per_position + v.
GeneratedDataset generate_shift_dataset(const SimWorld& world, const PathGeometry& trajectory,
                                        const ShiftDatasetSpec& spec, const CameraModel& camera,
                                        const NoiseModel& noise);

/// Writes features/<p>_<v>.trfv files plus dataset.json into `directory`.
void write_dataset(GeneratedDataset& dataset, const std::filesystem::path& directory);

}  // namespace tnr
