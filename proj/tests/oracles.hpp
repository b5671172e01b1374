#pragma once
// Independent reference implementations used by the unit and acceptance tests.

#include <cstdint>
#include <utility>
#include <vector>

#include "tnr/harness.hpp"
#include "tnr/shift_histogram.hpp"

namespace tnr::testing {

/// Query/reference sets whose mutual nearest neighbours are known by construction
/// (one-hot descriptors), with random positions and scores.
struct MatchedPair {
    FeatureSet query;
    FeatureSet reference;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (query, reference)
};
MatchedPair random_matched_pair(std::uint64_t seed, std::size_t max_matches);

struct DensePeak {
    double value = 0.0;
    Eigen::Vector2d shift = Eigen::Vector2d::Zero();
};

/// Visits every bin for every pair and evaluates the kernel directly.
DensePeak dense_histogram_peak(const FeatureSet& query, const FeatureSet& reference,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const HistogramConfig& config);

/// Brute-force mutual nearest neighbours over all pairs.
std::vector<std::pair<std::size_t, std::size_t>> brute_force_mutual_nn(const FeatureSet& query,
                                                                       const FeatureSet& reference);

/// Pixel of a world point computed from an explicitly built rotation matrix.
std::optional<Eigen::Vector2d> project_with_rotation_matrix(const CameraModel& camera, const Pose& pose,
                                                            const Eigen::Vector3d& point);

/// Map with `count` keyframes rendered exactly one metre apart along `path`.
TaughtPath keyframes_every_metre(const SimConfig& config, const SimWorld& world, const PathGeometry& path,
                                 std::size_t count);

bool maps_equal(const TaughtPath& a, const TaughtPath& b);

}  // namespace tnr::testing
