#pragma once

#include <optional>
#include <vector>

#include "tnr/features.hpp"
#include "tnr/shift_histogram.hpp"
#include "tnr/teach_map.hpp"

namespace tnr {

struct VprConfig {
    std::size_t candidate_count = 10;
    bool filtering_enabled = true;
    /// Arc-length half-window re-ranked when filtering is off. Unset: 3 x mean keyframe spacing.
    std::optional<double> neighborhood_window;
    HistogramConfig histogram;

    void validate() const;
};

struct ScoredCandidate {
    std::size_t keyframe = 0;
    double similarity = 0.0;
    ShiftEstimate shift;
};

struct VprResult {
    std::vector<ScoredCandidate> candidates;  // similarity descending, ties by lower index

    bool empty() const { return candidates.empty(); }
    const ScoredCandidate& best() const { return candidates.front(); }
    std::optional<double> score_of(std::size_t keyframe) const;
};

/// Indices of the K keyframes most cosine-similar to the query's global descriptor,
/// best first, ties to the lower index.
std::vector<std::size_t> filter_candidates(const Eigen::VectorXf& query_global, const TaughtPath& database,
                                           std::size_t k);

/// Filtering (or the arc-length window around `current_estimate` when filtering is off),
/// then re-ranking by histogram-of-shifts similarity. At most K candidates are returned.
/// Throws ConfigError when filtering is off and no estimate is given.
VprResult recognize(const FeatureSet& query, const TaughtPath& database, const VprConfig& config,
                    std::optional<double> current_estimate = std::nullopt);

}  // namespace tnr
