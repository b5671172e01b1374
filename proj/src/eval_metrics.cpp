#include "tnr/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "tnr/errors.hpp"
#include "tnr/feature_io.hpp"

namespace tnr {

void MetricConfig::validate() const {
    if (!(reference_depth > 0.0)) throw ConfigError("reference_depth must be positive");
    if (!(tolerance_px >= 0.0)) throw ConfigError("tolerance_px must be non-negative");
}

ReferenceShifts reference_point_shifts(const Transformation& t, const CameraModel& camera, double reference_depth) {
    const Pose reference;  // origin, facing +x
    const Pose query = reference.offset(t.lateral_m, t.yaw_rad);
    const double u_ref = camera.principal_point().x();

    const Eigen::Vector3d near_point = reference.position + reference_depth * reference.forward();
    const double u_near = camera.project_camera_point(to_camera_frame(query, near_point)).x();
    // A point at infinity only sees the rotation.
    const Eigen::Vector3d direction = world_to_camera_rotation(query.yaw) * reference.forward();
    const double u_far = camera.project_camera_point(direction).x();
    return {u_ref - u_near, u_ref - u_far};
}

PixelInterval ground_truth_range(const Transformation& t, const CameraModel& camera, const MetricConfig& config) {
    config.validate();
    const ReferenceShifts s = reference_point_shifts(t, camera, config.reference_depth);
    return {std::min(s.at_reference_depth, s.at_infinity) - config.tolerance_px,
            std::max(s.at_reference_depth, s.at_infinity) + config.tolerance_px};
}

ShiftEstimator histogram_estimator(const HistogramConfig& config) {
    return [config](const EvalPair& pair) -> std::optional<double> {
        return estimate_shift(*pair.query, *pair.reference, config).horizontal_shift_px;
    };
}

namespace {

struct Accumulator {
    Transformation t;
    std::vector<double> horizontal;
    std::size_t correct = 0;
};

using FeatureLoader = std::function<const FeatureSet*(std::size_t position, std::size_t view, std::string& error)>;

MetricReport evaluate_impl(const DatasetManifest& manifest, const FeatureLoader& load, const ShiftEstimator& estimator,
                           const MetricConfig& config) {
    config.validate();
    MetricReport report;
    std::vector<Accumulator> acc;
    auto slot = [&acc](const Transformation& t) -> Accumulator& {
        for (Accumulator& a : acc)
            if (a.t == t) return a;
        acc.push_back({t, {}, 0});
        return acc.back();
    };

    for (std::size_t p = 0; p < manifest.positions.size(); ++p) {
        const DatasetPosition& pos = manifest.positions[p];
        std::optional<std::size_t> center;
        for (std::size_t v = 0; v < pos.views.size(); ++v)
            if (pos.views[v].transformation.is_identity()) center = v;
        if (!center) {
            report.errors.push_back("position " + std::to_string(pos.index) + ": no central view");
            continue;
        }
        std::string error;
        const FeatureSet* reference = load(p, *center, error);
        if (!reference) {
            report.errors.push_back(error);
            continue;
        }
        for (std::size_t v = 0; v < pos.views.size(); ++v) {
            if (v == *center) continue;
            const Transformation& t = pos.views[v].transformation;
            Accumulator& a = slot(t);
            const FeatureSet* query = load(p, v, error);
            if (!query) {
                report.errors.push_back(error);
                continue;
            }
            EvalPair pair{pos.index, v, t, query, reference};
            const std::optional<double> shift = estimator(pair);
            if (!shift) {
                report.errors.push_back("position " + std::to_string(pos.index) + " view " + std::to_string(v) +
                                        ": estimator returned no shift");
                continue;
            }
            a.horizontal.push_back(*shift);
            if (ground_truth_range(t, manifest.camera, config).contains(*shift)) ++a.correct;
            ++report.pair_count;
        }
    }

    for (const Accumulator& a : acc) {
        TransformationReport row;
        row.transformation = a.t;
        row.range = ground_truth_range(a.t, manifest.camera, config);
        row.evaluated = a.horizontal.size();
        row.correct = a.correct;
        if (row.evaluated > 0) {
            const double n = static_cast<double>(row.evaluated);
            row.correct_fraction = static_cast<double>(a.correct) / n;
            double sum = 0.0;
            for (double x : a.horizontal) sum += x;
            row.mean_px = sum / n;
            double ss = 0.0;
            for (double x : a.horizontal) ss += (x - row.mean_px) * (x - row.mean_px);
            row.std_px = std::sqrt(ss / n);
        }
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        double c = 0.0;
        double s = 0.0;
        for (const TransformationReport& r : report.rows) {
            c += r.correct_fraction;
            s += r.std_px;
        }
        report.overall_correct_fraction = c / static_cast<double>(report.rows.size());
        report.overall_std_px = s / static_cast<double>(report.rows.size());
    }
    return report;
}

}  // namespace

MetricReport evaluate(const DatasetManifest& manifest, const ShiftEstimator& estimator, const MetricConfig& config) {
    std::map<std::pair<std::size_t, std::size_t>, FeatureSet> cache;
    FeatureLoader load = [&](std::size_t p, std::size_t v, std::string& error) -> const FeatureSet* {
        const auto key = std::make_pair(p, v);
        if (auto it = cache.find(key); it != cache.end()) return &it->second;
        const std::filesystem::path file = manifest.root / manifest.positions[p].views[v].features;
        try {
            return &cache.emplace(key, read_feature_file(file).set).first->second;
        } catch (const Error& e) {
            error = "position " + std::to_string(manifest.positions[p].index) + " view " + std::to_string(v) + ": " +
                    e.what();
            return nullptr;
        }
    };
    return evaluate_impl(manifest, load, estimator, config);
}

MetricReport evaluate(const GeneratedDataset& dataset, const ShiftEstimator& estimator, const MetricConfig& config) {
    std::vector<std::size_t> offsets;
    std::size_t k = 0;
    for (const DatasetPosition& p : dataset.manifest.positions) {
        offsets.push_back(k);
        k += p.views.size();
    }
    FeatureLoader load = [&](std::size_t p, std::size_t v, std::string& error) -> const FeatureSet* {
        const std::size_t i = offsets[p] + v;
        if (i >= dataset.feature_sets.size()) {
            error = "position " + std::to_string(p) + " view " + std::to_string(v) + ": no feature set";
            return nullptr;
        }
        return &dataset.feature_sets[i];
    };
    return evaluate_impl(dataset.manifest, load, estimator, config);
}

std::string MetricReport::to_csv() const {
    std::string out = "transformation,lateral_m,yaw_rad,evaluated,correct_fraction,std_px,mean_px,range_lo,range_hi\n";
    char buf[256];
    for (const TransformationReport& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.6g,%.9g,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.transformation.label().c_str(),
                      r.transformation.lateral_m, r.transformation.yaw_rad, r.evaluated, r.correct_fraction,
                      r.std_px, r.mean_px, r.range.lo, r.range.hi);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "overall,,,%zu,%.9g,%.9g,,,\n", pair_count, overall_correct_fraction,
                  overall_std_px);
    out += buf;
    return out;
}

std::string MetricReport::to_table() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %6s %9s %9s %9s  %s\n", "transformation", "pairs", "correct%", "std[px]",
                  "mean[px]", "range[px]");
    out += buf;
    for (const TransformationReport& r : rows) {
        std::snprintf(buf, sizeof buf, "%-20s %6zu %9.1f %9.2f %9.2f  [%.1f, %.1f]\n", r.transformation.label().c_str(),
                      r.evaluated, 100.0 * r.correct_fraction, r.std_px, r.mean_px, r.range.lo, r.range.hi);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-20s %6zu %9.1f %9.2f\n", "overall", pair_count, 100.0 * overall_correct_fraction,
                  overall_std_px);
    out += buf;
    if (!errors.empty()) {
        std::snprintf(buf, sizeof buf, "%zu item(s) missing or unreadable\n", errors.size());
        out += buf;
    }
    return out;
}

}  // namespace tnr
