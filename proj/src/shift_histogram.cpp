#include "tnr/shift_histogram.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tnr/errors.hpp"

namespace tnr {

void HistogramConfig::validate() const {
    if (!(bin_size_px >= 1.0)) throw ConfigError("bin_size_px must be >= 1");
    if (!(gaussian_sigma_bins > 0.0)) throw ConfigError("gaussian_sigma_bins must be > 0");
    if (!(gaussian_truncate_bins >= 0.0)) throw ConfigError("gaussian_truncate_bins must be >= 0");
}

int HistogramConfig::truncate_radius() const { return static_cast<int>(std::floor(gaussian_truncate_bins)); }

ShiftHistogram::ShiftHistogram(ImageSize span, const HistogramConfig& config) : config_(config) {
    config_.validate();
    half_cols_ = static_cast<int>(std::ceil(static_cast<double>(span.width) / config_.bin_size_px));
    half_rows_ = static_cast<int>(std::ceil(static_cast<double>(span.height) / config_.bin_size_px));
    cols_ = 2 * half_cols_ + 1;
    rows_ = 2 * half_rows_ + 1;
    bins_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
}

Eigen::Vector2d ShiftHistogram::center(int row, int col) const {
    return {(col - half_cols_) * config_.bin_size_px, (row - half_rows_) * config_.bin_size_px};
}

Eigen::Vector2i ShiftHistogram::bin_of(const Eigen::Vector2d& displacement) const {
    const int col = static_cast<int>(std::floor(displacement.x() / config_.bin_size_px + 0.5)) + half_cols_;
    const int row = static_cast<int>(std::floor(displacement.y() / config_.bin_size_px + 0.5)) + half_rows_;
    return {row, col};
}

void ShiftHistogram::clear() { std::fill(bins_.begin(), bins_.end(), 0.0); }

void ShiftHistogram::vote(const Match& match) {
    const int radius = config_.truncate_radius();
    const Eigen::Vector2i home = bin_of(match.displacement);
    const double inv_two_var = 1.0 / (2.0 * config_.sigma_px() * config_.sigma_px());

    const int r0 = std::max(0, home.x() - radius);
    const int r1 = std::min(rows_ - 1, home.x() + radius);
    const int c0 = std::max(0, home.y() - radius);
    const int c1 = std::min(cols_ - 1, home.y() + radius);
    if (r0 > r1 || c0 > c1) return;

    // The Gaussian is separable: exp(-(dx^2 + dy^2) k) = exp(-dx^2 k) * exp(-dy^2 k).
    std::array<double, 256> col_weight_buf{};
    std::vector<double> col_weight_heap;
    double* col_weight = col_weight_buf.data();
    const int ncols = c1 - c0 + 1;
    if (ncols > static_cast<int>(col_weight_buf.size())) {
        col_weight_heap.resize(static_cast<std::size_t>(ncols));
        col_weight = col_weight_heap.data();
    }
    for (int c = c0; c <= c1; ++c) {
        const double dx = (c - half_cols_) * config_.bin_size_px - match.displacement.x();
        col_weight[c - c0] = std::exp(-dx * dx * inv_two_var);
    }
    for (int r = r0; r <= r1; ++r) {
        const double dy = (r - half_rows_) * config_.bin_size_px - match.displacement.y();
        const double row_weight = match.weight * std::exp(-dy * dy * inv_two_var);
        double* row = bins_.data() + index(r, 0);
        for (int c = c0; c <= c1; ++c) row[c] += row_weight * col_weight[c - c0];
    }
}

void ShiftHistogram::vote(std::span<const Match> matches) {
    for (const Match& m : matches) vote(m);
}

ShiftHistogram::Peak ShiftHistogram::peak() const {
    Peak best{half_rows_, half_cols_, at(half_rows_, half_cols_)};
    long best_d2 = 0;
    for (int r = 0; r < rows_; ++r) {
        const double* row = bins_.data() + index(r, 0);
        for (int c = 0; c < cols_; ++c) {
            const double v = row[c];
            if (v < best.value) continue;
            const long dr = r - half_rows_;
            const long dc = c - half_cols_;
            const long d2 = dr * dr + dc * dc;
            if (v > best.value || d2 < best_d2) {
                best = {r, c, v};
                best_d2 = d2;
            }
            // Equal value and distance: the earlier row-major bin was already kept.
        }
    }
    return best;
}

double ShiftHistogram::max_value() const {
    return bins_.empty() ? 0.0 : *std::max_element(bins_.begin(), bins_.end());
}

Eigen::Vector2d ShiftHistogram::peak_shift(const Peak& p) const {
    Eigen::Vector2d shift = center(p.row, p.col);
    if (!config_.subbin_refinement || p.value <= 0.0) return shift;
    auto offset = [](double left, double mid, double right) {
        const double denom = left - 2.0 * mid + right;
        if (denom >= 0.0) return 0.0;
        return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
    };
    if (p.col > 0 && p.col + 1 < cols_)
        shift.x() += config_.bin_size_px * offset(at(p.row, p.col - 1), p.value, at(p.row, p.col + 1));
    if (p.row > 0 && p.row + 1 < rows_)
        shift.y() += config_.bin_size_px * offset(at(p.row - 1, p.col), p.value, at(p.row + 1, p.col));
    return shift;
}

namespace {

ImageSize histogram_span(const FeatureSet& a, const FeatureSet& b) {
    return {std::max(a.image_size.width, b.image_size.width), std::max(a.image_size.height, b.image_size.height)};
}

std::vector<Match> capped_matches(const FeatureSet& query, const FeatureSet& reference,
                                  const HistogramConfig& config) {
    if (config.max_features == 0) return match_mutual_nn(query, reference);
    return match_mutual_nn(strongest_features(query, config.max_features),
                           strongest_features(reference, config.max_features));
}

}  // namespace

ShiftEstimate estimate_shift(const FeatureSet& query, const FeatureSet& reference, const HistogramConfig& config) {
    config.validate();
    const std::vector<Match> matches = capped_matches(query, reference, config);
    ShiftEstimate out;
    out.match_count = matches.size();
    if (matches.empty()) return out;

    ShiftHistogram hist(histogram_span(query, reference), config);
    hist.vote(matches);
    const ShiftHistogram::Peak p = hist.peak();
    const Eigen::Vector2d shift = hist.peak_shift(p);
    out.horizontal_shift_px = shift.x();
    out.vertical_shift_px = shift.y();
    out.similarity = p.value;
    return out;
}

double similarity_only(const FeatureSet& query, const FeatureSet& reference, const HistogramConfig& config) {
    config.validate();
    const std::vector<Match> matches = capped_matches(query, reference, config);
    if (matches.empty()) return 0.0;
    ShiftHistogram hist(histogram_span(query, reference), config);
    hist.vote(matches);
    return hist.max_value();
}

}  // namespace tnr
