#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace tnr {

inline constexpr int kDefaultLocalDim = 64;
inline constexpr int kDefaultGlobalDim = 256;

struct ImageSize {
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    bool operator==(const ImageSize&) const = default;
};

/// One keypoint with its detector score and unit-norm descriptor.
/// Storage is float32 to match the on-disk feature format bit for bit.
struct Feature {
    Eigen::Vector2f position = Eigen::Vector2f::Zero();
    float score = 0.0f;
    Eigen::VectorXf descriptor;
};

/// All features of one image plus its global (place-level) descriptor.
struct FeatureSet {
    ImageSize image_size;
    std::vector<Feature> features;
    Eigen::VectorXf global_descriptor;

    bool empty() const { return features.empty(); }
    std::size_t size() const { return features.size(); }
    int local_dim() const { return features.empty() ? 0 : static_cast<int>(features[0].descriptor.size()); }
    int global_dim() const { return static_cast<int>(global_descriptor.size()); }

    /// Throws ConfigError on a broken invariant: mixed descriptor dimensions, non-unit
    /// descriptors (beyond `norm_tolerance`), negative scores or out-of-image positions.
    /// An empty set may carry an all-zero global descriptor.
    void validate(double norm_tolerance = 1e-6) const;
};

bool operator==(const Feature& a, const Feature& b);
bool operator==(const FeatureSet& a, const FeatureSet& b);

struct Match {
    std::size_t query_index = 0;
    std::size_t reference_index = 0;
    double weight = 0.0;                                      // query score + reference score
    Eigen::Vector2d displacement = Eigen::Vector2d::Zero();  // reference - query, pixels
};

/// Mutual nearest neighbours under Euclidean descriptor distance (cross-check).
/// Nearest-neighbour ties go to the lower index on either side.
/// Throws ConfigError when the two sets use different descriptor dimensions.
std::vector<Match> match_mutual_nn(const FeatureSet& query, const FeatureSet& reference);

/// Mean of local descriptors, truncated or zero-padded to `global_dim`, then L2-normalised.
/// Throws UnusableFrameError for an empty list or a (numerically) zero mean.
Eigen::VectorXf global_descriptor_from_locals(std::span<const Feature> features,
                                              int global_dim = kDefaultGlobalDim);

double cosine_similarity(const Eigen::VectorXf& a, const Eigen::VectorXf& b);

/// Keep the `cap` highest-score features (stable on ties). `cap == 0` keeps everything.
FeatureSet strongest_features(const FeatureSet& set, std::size_t cap);

}  // namespace tnr
