#include "tnr/vpr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tnr/errors.hpp"

namespace tnr {

void VprConfig::validate() const {
    if (candidate_count < 1) throw ConfigError("candidate_count must be >= 1");
    if (neighborhood_window && !(*neighborhood_window >= 0.0))
        throw ConfigError("neighborhood_window must be non-negative");
    histogram.validate();
}

std::optional<double> VprResult::score_of(std::size_t keyframe) const {
    for (const ScoredCandidate& c : candidates)
        if (c.keyframe == keyframe) return c.similarity;
    return std::nullopt;
}

std::vector<std::size_t> filter_candidates(const Eigen::VectorXf& query_global, const TaughtPath& database,
                                           std::size_t k) {
    if (database.keyframes.empty()) throw UnusablePathError("empty database");
    std::vector<double> score(database.size());
    for (std::size_t i = 0; i < database.size(); ++i) {
        const Eigen::VectorXf& g = database.keyframes[i].features.global_descriptor;
        score[i] = g.size() == query_global.size() ? cosine_similarity(query_global, g) : -2.0;
    }
    std::vector<std::size_t> order(database.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
    order.resize(n);
    return order;
}

VprResult recognize(const FeatureSet& query, const TaughtPath& database, const VprConfig& config,
                    std::optional<double> current_estimate) {
    config.validate();
    if (database.keyframes.empty()) throw UnusablePathError("empty database");

    std::vector<std::size_t> candidates;
    if (config.filtering_enabled) {
        candidates = filter_candidates(query.global_descriptor, database, config.candidate_count);
    } else {
        if (!current_estimate)
            throw ConfigError("filtering disabled but no current position estimate was given");
        const double window = config.neighborhood_window.value_or(3.0 * database.mean_spacing());
        for (std::size_t i = 0; i < database.size(); ++i)
            if (std::abs(database.keyframes[i].arc_length - *current_estimate) <= window) candidates.push_back(i);
        if (candidates.empty()) candidates.push_back(database.closest_keyframe(*current_estimate));
    }

    VprResult result;
    result.candidates.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        const ShiftEstimate est = estimate_shift(query, database.keyframes[idx].features, config.histogram);
        result.candidates.push_back({idx, est.similarity, est});
    }
    std::sort(result.candidates.begin(), result.candidates.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        return a.similarity > b.similarity || (a.similarity == b.similarity && a.keyframe < b.keyframe);
    });
    if (result.candidates.size() > config.candidate_count) result.candidates.resize(config.candidate_count);
    return result;
}

}  // namespace tnr
