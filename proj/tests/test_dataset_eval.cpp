#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>

#include "tnr/dataset.hpp"
#include "tnr/errors.hpp"
#include "tnr/eval_metrics.hpp"
#include "tnr/harness.hpp"

using namespace tnr;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kYaw = 15.0 * kPi / 180.0;

struct Small {
    DatasetScene scene = dataset_scene(21, 6);
    GeneratedDataset data =
        generate_shift_dataset(scene.world, scene.trajectory, {6}, CameraModel::default_camera(), {});
};

const Small& small() {
    static const Small s;
    return s;
}

std::optional<double> projected_truth(const EvalPair& p) {
    // On-axis point at 5 m, projected from the displaced camera.
    const CameraModel cam = CameraModel::default_camera();
    const Pose q = Pose{}.offset(p.transformation.lateral_m, p.transformation.yaw_rad);
    const auto px = project(cam, q, Eigen::Vector3d(5.0, 0.0, 0.0));
    return px ? std::optional<double>(cam.principal_point().x() - px->x()) : std::nullopt;
}

}  // namespace

TEST_CASE("dataset sizes") {
    const ShiftDatasetSpec spec;
    CHECK(spec.position_count * spec.lateral_offsets.size() * spec.yaws.size() == 459);
    ShiftDatasetSpec other;
    other.position_count = 31;
    CHECK(other.position_count * other.lateral_offsets.size() * other.yaws.size() == 279);
    CHECK(small().data.manifest.view_count() == 54);
    CHECK(small().data.feature_sets.size() == 54);
}

TEST_CASE("the central view equals a direct render at the position pose") {
    const Small& s = small();
    const std::size_t per = 9;
    for (std::size_t p = 0; p < s.data.manifest.positions.size(); ++p) {
        const DatasetPosition& pos = s.data.manifest.positions[p];
        for (std::size_t v = 0; v < per; ++v) {
            if (!pos.views[v].transformation.is_identity()) continue;
            CHECK(pos.views[v].pose.position == pos.pose.position);
            CHECK(s.data.feature_sets[p * per + v] ==
                  render_features(s.scene.world, pos.pose, CameraModel::default_camera(), {}, p * per + v));
        }
    }
}

TEST_CASE("views are displaced left and yawed counter-clockwise") {
    const DatasetPosition& pos = small().data.manifest.positions[2];
    for (const DatasetView& v : pos.views) {
        const Pose expect = pos.pose.offset(v.transformation.lateral_m, v.transformation.yaw_rad);
        CHECK((v.pose.position - expect.position).norm() < 1e-12);
        CHECK(v.pose.yaw == Approx(expect.yaw));
    }
    CHECK(Transformation{0.36, -kYaw}.label() != Transformation{-0.36, -kYaw}.label());
}

TEST_CASE("reference-point ranges") {
    const CameraModel cam = CameraModel::default_camera();
    const MetricConfig cfg;
    SUBCASE("pure yaw") {
        const ReferenceShifts s = reference_point_shifts({0.0, kYaw}, cam, 5.0);
        CHECK(s.at_infinity == Approx(-500.0 * std::tan(kYaw)));
        CHECK(s.at_infinity == Approx(-133.97).epsilon(1e-4));
        CHECK(s.at_reference_depth == Approx(s.at_infinity));
        const PixelInterval r = ground_truth_range({0.0, kYaw}, cam, cfg);
        CHECK(r.lo == Approx(-133.97 - 20.0).epsilon(1e-4));
        CHECK(r.hi == Approx(-133.97 + 20.0).epsilon(1e-4));
    }
    SUBCASE("pure lateral") {
        const ReferenceShifts s = reference_point_shifts({0.36, 0.0}, cam, 5.0);
        CHECK(std::abs(s.at_reference_depth) == Approx(36.0));
        CHECK(s.at_infinity == Approx(0.0));
        const EvalPair pair{0, 0, {0.36, 0.0}, nullptr, nullptr};
        CHECK(s.at_reference_depth == Approx(*projected_truth(pair)));
        const PixelInterval r = ground_truth_range({0.36, 0.0}, cam, cfg);
        CHECK(r.lo == Approx(-56.0));
        CHECK(r.hi == Approx(20.0));
    }
    SUBCASE("identity") {
        const PixelInterval r = ground_truth_range({}, cam, cfg);
        CHECK(r.lo == -20.0);
        CHECK(r.hi == 20.0);
    }
    SUBCASE("combined transformations match the projection oracle") {
        for (double lat : {-0.36, 0.36})
            for (double yaw : {-kYaw, kYaw}) {
                const ReferenceShifts s = reference_point_shifts({lat, yaw}, cam, 5.0);
                const EvalPair pair{0, 0, {lat, yaw}, nullptr, nullptr};
                CHECK(s.at_reference_depth == Approx(*projected_truth(pair)));
                CHECK(s.at_infinity == Approx(-500.0 * std::tan(yaw)));
            }
    }
    MetricConfig bad;
    bad.reference_depth = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("a perfect estimator scores 100 percent with zero spread") {
    const MetricReport r = evaluate(small().data, projected_truth);
    CHECK(r.rows.size() == 8);
    CHECK(r.pair_count == 48);
    CHECK(r.overall_correct_fraction == 1.0);
    CHECK(r.overall_std_px == Approx(0.0));
    for (const TransformationReport& row : r.rows) {
        CHECK(row.evaluated == 6);
        CHECK(row.std_px == Approx(0.0));
    }
    CHECK(r.complete());
}

TEST_CASE("a wild estimator scores zero") {
    const MetricReport r = evaluate(small().data, [](const EvalPair&) { return std::optional<double>(1e6); });
    CHECK(r.overall_correct_fraction == 0.0);
}

TEST_CASE("the report equals a direct recomputation") {
    const Small& s = small();
    const ShiftEstimator est = histogram_estimator({});
    const MetricReport r = evaluate(s.data, est);
    const CameraModel cam = CameraModel::default_camera();
    double fraction_sum = 0.0;
    for (const TransformationReport& row : r.rows) {
        std::vector<double> xs;
        std::size_t correct = 0;
        for (std::size_t p = 0; p < s.data.manifest.positions.size(); ++p) {
            const auto& views = s.data.manifest.positions[p].views;
            std::size_t centre = 0;
            for (std::size_t v = 0; v < views.size(); ++v)
                if (views[v].transformation.is_identity()) centre = v;
            for (std::size_t v = 0; v < views.size(); ++v) {
                if (!(views[v].transformation == row.transformation)) continue;
                const double x = estimate_shift(s.data.feature_sets[p * 9 + v], s.data.feature_sets[p * 9 + centre])
                                     .horizontal_shift_px;
                xs.push_back(x);
                if (ground_truth_range(row.transformation, cam, {}).contains(x)) ++correct;
            }
        }
        REQUIRE(xs.size() == row.evaluated);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        CHECK(row.mean_px == Approx(mean));
        CHECK(row.std_px == Approx(std::sqrt(var / xs.size())));
        CHECK(row.correct == correct);
        fraction_sum += static_cast<double>(correct) / xs.size();
    }
    CHECK(r.overall_correct_fraction == Approx(fraction_sum / r.rows.size()));
}

TEST_CASE("written datasets load back and missing files are reported") {
    GeneratedDataset data = small().data;
    const fs::path dir = fs::temp_directory_path() / ("tnr_unit_ds_" + std::to_string(getpid()));
    fs::remove_all(dir);
    write_dataset(data, dir);
    const DatasetManifest m = load_dataset_manifest(dir / "dataset.json");
    CHECK(m.view_count() == 54);
    CHECK(m.positions[3].views[4].features == data.manifest.positions[3].views[4].features);
    const MetricReport from_disk = evaluate(m, histogram_estimator({}));
    const MetricReport in_memory = evaluate(data, histogram_estimator({}));
    CHECK(from_disk.to_csv() == in_memory.to_csv());

    fs::remove(dir / m.positions[1].views[0].features);
    const MetricReport partial = evaluate(load_dataset_manifest(dir / "dataset.json"), histogram_estimator({}));
    CHECK_FALSE(partial.complete());
    CHECK(partial.pair_count == 47);
    fs::remove_all(dir);
}
