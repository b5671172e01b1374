#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tnr/teach_map.hpp"
#include "tnr/vpr.hpp"

namespace tnr {

enum class BeliefMode { initialization, navigation };
const char* to_string(BeliefMode mode);

enum class ResamplingStyle {
    discard_reinit,  // replace the lowest-weight fraction with uniform draws
    low_variance,    // systematic resampling of the whole set
};

struct BeliefConfig {
    std::size_t particle_count = 1000;
    double motion_noise_sigma = 0.05;  // metres of noise std per metre travelled
    double discard_fraction = 0.05;
    std::optional<double> certainty_window;  // unset: window_spacings x mean keyframe spacing
    double window_spacings = 1.5;
    double certainty_enter_nav = 0.6;
    double certainty_exit_nav = 0.3;
    double skip_filtering_threshold = 0.8;
    double weight_floor = 1e-6;
    std::size_t estimate_top = 5;
    ResamplingStyle resampling = ResamplingStyle::discard_reinit;

    void validate() const;
};

struct Particle {
    double s = 0.0;
    double weight = 0.0;
};

struct Belief {
    std::vector<Particle> particles;
    BeliefMode mode = BeliefMode::initialization;
    double certainty = 0.0;
    bool skip_filtering = false;
};

/// Mean position of the `top` highest-weight particles (weight ties go to lower s).
double estimate(const Belief& belief, std::size_t top = 5);

/// Fraction of total weight within +/- window of the current estimate.
double certainty(const Belief& belief, double window, std::size_t top = 5);

struct ModeDecision {
    BeliefMode mode = BeliefMode::initialization;
    bool skip_filtering = false;
};

/// Hysteresis between initialization and navigation; filtering may be skipped only in
/// navigation mode with certainty at or above the skip threshold.
ModeDecision mode_transition(BeliefMode current, double certainty, const BeliefConfig& config);

/// Image weight at arc-length s: linear interpolation of the scores of the two
/// bracketing keyframes (non-candidates score zero). Clamped one-sided at the path ends.
double interpolated_image_weight(double s, const VprResult& vpr, const TaughtPath& database);

/// Particle filter over the 1D arc-length along a taught path.
class PathBelief {
public:
    PathBelief(const TaughtPath& database, const BeliefConfig& config, std::uint64_t seed);

    const Belief& belief() const { return belief_; }
    const BeliefConfig& config() const { return config_; }
    double window() const { return window_; }
    double length() const { return length_; }

    /// Uniform particles over the trajectory, initialization mode.
    void reset();
    /// Shift all particles by `traveled` plus N(0, (sigma * traveled)^2).
    void predict(double traveled);
    /// Weight particles by the VPR scores, renormalise, resample, refresh certainty and mode.
    void update(const VprResult& vpr, const TaughtPath& database);

    double estimate() const { return tnr::estimate(belief_, config_.estimate_top); }

private:
    double draw_uniform();
    void normalize();
    void refresh_mode();
    void discard_and_reinit();
    void low_variance_resample();

    BeliefConfig config_;
    double length_ = 0.0;
    double window_ = 0.0;
    std::mt19937_64 rng_;
    Belief belief_;
};

}  // namespace tnr
