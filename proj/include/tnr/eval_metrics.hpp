#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tnr/dataset.hpp"
#include "tnr/shift_histogram.hpp"

namespace tnr {

struct MetricConfig {
    double reference_depth = 5.0;
    double tolerance_px = 20.0;  // added on each side of the reference-point range

    void validate() const;
};

struct PixelInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ReferenceShifts {
    double at_reference_depth = 0.0;
    double at_infinity = 0.0;
};

/// Horizontal shifts (reference - query) of the two on-axis reference points of the
/// central camera, seen from a camera displaced by `t`.
ReferenceShifts reference_point_shifts(const Transformation& t, const CameraModel& camera, double reference_depth);

/// [min - tolerance, max + tolerance] of the two reference-point shifts.
PixelInterval ground_truth_range(const Transformation& t, const CameraModel& camera, const MetricConfig& config);

struct EvalPair {
    std::size_t position = 0;
    std::size_t view = 0;
    Transformation transformation;
    const FeatureSet* query = nullptr;      // the displaced view
    const FeatureSet* reference = nullptr;  // the central view
};

/// Returns the horizontal shift for a pair, or nothing when the estimator has no answer.
using ShiftEstimator = std::function<std::optional<double>(const EvalPair&)>;

ShiftEstimator histogram_estimator(const HistogramConfig& config);

struct TransformationReport {
    Transformation transformation;
    PixelInterval range;
    std::size_t evaluated = 0;
    std::size_t correct = 0;
    double correct_fraction = 0.0;
    double mean_px = 0.0;
    double std_px = 0.0;
};

struct MetricReport {
    std::vector<TransformationReport> rows;  // non-identity transformations, manifest order
    double overall_correct_fraction = 0.0;   // unweighted mean over rows
    double overall_std_px = 0.0;
    std::size_t pair_count = 0;
    std::vector<std::string> errors;  // missing or unreadable items (excluded)

    bool complete() const { return errors.empty(); }
    std::string to_csv() const;
    std::string to_table() const;
};

/// Pairs every non-central view with its position's central view, scores each estimate
/// against the ground-truth range and aggregates per transformation (population STD
/// across positions), then averages over transformations.
MetricReport evaluate(const DatasetManifest& manifest, const ShiftEstimator& estimator, const MetricConfig& config = {});

/// Same, over an in-memory dataset (no feature files touched).
MetricReport evaluate(const GeneratedDataset& dataset, const ShiftEstimator& estimator, const MetricConfig& config = {});

}  // namespace tnr
