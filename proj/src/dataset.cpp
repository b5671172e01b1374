#include "tnr/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tnr/errors.hpp"
#include "tnr/feature_io.hpp"
#include "tnr/json_io.hpp"

namespace tnr {

std::string Transformation::label() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "lat%+.2f_yaw%+.0f", lateral_m, yaw_rad * 180.0 / 3.14159265358979323846);
    return buf;
}

std::size_t DatasetManifest::view_count() const {
    std::size_t n = 0;
    for (const DatasetPosition& p : positions) n += p.views.size();
    return n;
}

void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& manifest_path) {
    json j;
    j["format"] = "tnr-shift-dataset";
    j["version"] = kDatasetFormatVersion;
    j["camera"] = to_json(manifest.camera);
    json positions = json::array();
    for (const DatasetPosition& p : manifest.positions) {
        json views = json::array();
        for (const DatasetView& v : p.views) {
            json row = {{"lateral_m", v.transformation.lateral_m},
                        {"yaw_rad", v.transformation.yaw_rad},
                        {"pose", to_json(v.pose)},
                        {"features", v.features}};
            if (!v.image.empty()) row["image"] = v.image;
            views.push_back(std::move(row));
        }
        positions.push_back({{"index", p.index}, {"pose", to_json(p.pose)}, {"views", std::move(views)}});
    }
    j["positions"] = std::move(positions);
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + manifest_path.string());
    out << j.dump(2) << '\n';
}

DatasetManifest load_dataset_manifest(const std::filesystem::path& manifest_path) {
    const std::string source = manifest_path.string();
    const std::vector<std::uint8_t> bytes = read_file_bytes(manifest_path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(source, e.byte, e.what());
    }
    DatasetManifest m;
    m.root = manifest_path.parent_path();
    try {
        if (j.at("format").get<std::string>() != "tnr-shift-dataset")
            throw ParseError(source, 0, "not a shift dataset manifest");
        if (j.at("version").get<int>() != kDatasetFormatVersion) throw ParseError(source, 0, "unsupported version");
        m.camera = camera_from_json(j.at("camera"));
        for (const json& p : j.at("positions")) {
            DatasetPosition pos;
            pos.index = p.at("index").get<std::size_t>();
            pos.pose = p.contains("pose") ? pose_from_json(p.at("pose")) : Pose{};
            for (const json& v : p.at("views")) {
                DatasetView view;
                view.transformation = {v.at("lateral_m").get<double>(), v.at("yaw_rad").get<double>()};
                view.pose = v.contains("pose") ? pose_from_json(v.at("pose")) : Pose{};
                view.features = v.at("features").get<std::string>();
                view.image = value_or<std::string>(v, "image", "");
                pos.views.push_back(std::move(view));
            }
            m.positions.push_back(std::move(pos));
        }
    } catch (const json::exception& e) {
        throw ParseError(source, 0, std::string("invalid dataset manifest: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(source, 0, std::string("invalid dataset manifest: ") + e.what());
    }
    return m;
}

GeneratedDataset generate_shift_dataset(const SimWorld& world, const PathGeometry& trajectory,
                                        const ShiftDatasetSpec& spec, const CameraModel& camera,
                                        const NoiseModel& noise) {
    if (spec.position_count == 0) throw ConfigError("dataset needs at least one position");
    if (trajectory.empty()) throw ConfigError("dataset trajectory is empty");
    GeneratedDataset out;
    out.manifest.camera = camera;
    const std::size_t per_position = spec.lateral_offsets.size() * spec.yaws.size();
    const double step = spec.position_count > 1
                            ? trajectory.total_length() / static_cast<double>(spec.position_count - 1)
                            : 0.0;
    for (std::size_t p = 0; p < spec.position_count; ++p) {
        DatasetPosition pos;
        pos.index = p;
        pos.pose = trajectory.arc_position(static_cast<double>(p) * step).pose;
        std::size_t v = 0;
        for (double lateral : spec.lateral_offsets) {
            for (double yaw : spec.yaws) {
                DatasetView view;
                view.transformation = {lateral, yaw};
                view.pose = pos.pose.offset(lateral, yaw);
                char name[64];
                std::snprintf(name, sizeof name, "features/p%03zu_v%zu.trfv", p, v);
                view.features = name;
                out.feature_sets.push_back(
                    render_features(world, view.pose, camera, noise, static_cast<std::uint64_t>(p * per_position + v)));
                pos.views.push_back(std::move(view));
                ++v;
            }
        }
        out.manifest.positions.push_back(std::move(pos));
    }
    return out;
}

void write_dataset(GeneratedDataset& dataset, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory / "features");
    dataset.manifest.root = directory;
    std::size_t k = 0;
    for (const DatasetPosition& p : dataset.manifest.positions)
        for (const DatasetView& v : p.views) write_feature_file(directory / v.features, dataset.feature_sets.at(k++));
    save_dataset_manifest(dataset.manifest, directory / "dataset.json");
}

}  // namespace tnr
