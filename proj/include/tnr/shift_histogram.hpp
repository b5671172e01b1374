#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "tnr/features.hpp"

namespace tnr {

struct HistogramConfig {
    double bin_size_px = 4.0;
    double gaussian_sigma_bins = 2.0;
    /// Chebyshev radius (in bins) around the vote's own bin that receives Gaussian mass.
    double gaussian_truncate_bins = 6.0;
    /// Keep only the strongest features of each image before matching; 0 keeps all.
    std::size_t max_features = 500;
    /// Parabolic refinement of the winning bin. Off: the shift is the winning bin centre.
    bool subbin_refinement = false;

    void validate() const;
    int truncate_radius() const;
    double sigma_px() const { return gaussian_sigma_bins * bin_size_px; }
};

struct ShiftEstimate {
    double horizontal_shift_px = 0.0;
    double vertical_shift_px = 0.0;
    double similarity = 0.0;
    std::size_t match_count = 0;

    Eigen::Vector2d shift() const { return {horizontal_shift_px, vertical_shift_px}; }
};

/// Dense 2D vote grid over displacements [-W, W] x [-H, H]. Bin (row, col) is centred on
/// ((col - half_cols) * bin, (row - half_rows) * bin), so bin centres sit on multiples of
/// the bin size and (0, 0) is always a centre.
class ShiftHistogram {
public:
    ShiftHistogram(ImageSize span, const HistogramConfig& config);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int half_rows() const { return half_rows_; }
    int half_cols() const { return half_cols_; }
    const HistogramConfig& config() const { return config_; }

    double at(int row, int col) const { return bins_[index(row, col)]; }
    std::span<const double> values() const { return bins_; }
    Eigen::Vector2d center(int row, int col) const;

    /// Bin containing a displacement; halves round towards +infinity.
    Eigen::Vector2i bin_of(const Eigen::Vector2d& displacement) const;

    void vote(const Match& match);
    void vote(std::span<const Match> matches);
    void clear();

    struct Peak {
        int row = 0;
        int col = 0;
        double value = 0.0;
    };
    /// Maximum accumulator; ties go to the centre closest to (0, 0), then to the lowest
    /// row-major index.
    Peak peak() const;
    double max_value() const;

    /// Peak position with optional parabolic refinement along each axis.
    Eigen::Vector2d peak_shift(const Peak& p) const;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
    }

    HistogramConfig config_;
    int half_rows_ = 0;
    int half_cols_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> bins_;
};

/// Matches the two sets (mutual nearest neighbours), votes every match and returns the
/// winning displacement (reference - query) together with its accumulated similarity.
/// No matches yields similarity 0 and shift (0, 0).
ShiftEstimate estimate_shift(const FeatureSet& query, const FeatureSet& reference,
                             const HistogramConfig& config = {});

double similarity_only(const FeatureSet& query, const FeatureSet& reference,
                       const HistogramConfig& config = {});

}  // namespace tnr
