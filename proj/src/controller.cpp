#include "tnr/controller.hpp"

#include <algorithm>
#include <cmath>

#include "tnr/errors.hpp"

namespace tnr {

const char* to_string(Platform platform) { return platform == Platform::uav ? "uav" : "ground"; }

void ControlConfig::validate() const {
    if (!(kp_yaw > 0.0)) throw ConfigError("kp_yaw must be positive");
    if (!(kp_vertical >= 0.0)) throw ConfigError("kp_vertical must be non-negative");
    if (!(v_max > 0.0)) throw ConfigError("v_max must be positive");
    if (!(curvature_gain >= 0.0)) throw ConfigError("curvature_gain must be non-negative");
    if (!(end_epsilon >= 0.0)) throw ConfigError("end_epsilon must be non-negative");
    if (!(degrade_factor >= 0.0 && degrade_factor <= 1.0)) throw ConfigError("degrade_factor must be in [0, 1]");
}

double shift_to_angle(double shift_px, const CameraModel& camera) {
    return std::atan(shift_px / camera.focal_length_px());
}

double curvature_slowdown(double curvature, const ControlConfig& config) {
    return 1.0 / (1.0 + config.curvature_gain * std::abs(curvature) * config.v_max);
}

RepeatController::RepeatController(const ControlConfig& config, const CameraModel& camera, Platform platform,
                                   double total_length)
    : config_(config), camera_(camera), platform_(platform), total_length_(total_length) {
    config_.validate();
}

double RepeatController::nominal_forward(const Keyframe& keyframe) const {
    double forward = config_.v_max * curvature_slowdown(keyframe.taught_curvature, config_);
    // Taught speed acts as a ceiling relative to v_max.
    if (keyframe.taught_forward_speed > 0.0) forward *= std::min(1.0, keyframe.taught_forward_speed / config_.v_max);
    return std::min(forward, config_.v_max);
}

ControlOutput RepeatController::tick(double estimate, const ShiftEstimate& shift, const Keyframe& keyframe,
                                     BeliefMode mode, double shift_age) {
    ControlOutput out;
    if (estimate >= total_length_ - config_.end_epsilon) {
        out.done = true;
        previous_ = {};
        return out;
    }
    if (mode == BeliefMode::initialization) {
        previous_ = {};
        return out;
    }
    if (shift.match_count == 0 || shift_age > config_.stale_age) {
        out.degraded = true;
        out.command.forward = config_.degrade_factor * nominal_forward(keyframe);
        out.command.yaw_rate = config_.degrade_factor * previous_.yaw_rate;
        out.command.vertical = platform_ == Platform::uav ? config_.degrade_factor * previous_.vertical : 0.0;
        previous_ = out.command;
        return out;
    }

    Eigen::Vector2d effective = shift.shift();
    if (config_.shift_blend && keyframe.stored_shift) effective = 0.5 * (effective + *keyframe.stored_shift);

    out.command.forward = nominal_forward(keyframe);
    out.command.yaw_rate = config_.kp_yaw * shift_to_angle(effective.x(), camera_);
    // Image v grows downward: a positive vertical shift means the reference saw the scene
    // lower, i.e. the vehicle flies too low.
    if (platform_ == Platform::uav)
        out.command.vertical = config_.kp_vertical * shift_to_angle(effective.y(), camera_);
    previous_ = out.command;
    return out;
}

}  // namespace tnr
