#pragma once

#include "tnr/geometry.hpp"
#include "tnr/path_belief.hpp"
#include "tnr/shift_histogram.hpp"
#include "tnr/teach_map.hpp"

namespace tnr {

enum class Platform { ground, uav };
const char* to_string(Platform platform);

struct ControlConfig {
    double kp_yaw = 3.0;       // rad/s per radian of horizontal shift angle
    double kp_vertical = 15.0;  // m/s per radian of vertical shift angle
    double v_max = 0.5;
    double curvature_gain = 2.0;  // speed factor 1 / (1 + gain * |curvature| * v_max)
    bool shift_blend = false;     // average the measured shift with the keyframe's stored shift
    double end_epsilon = 0.2;
    double stale_age = 1.0;       // seconds; older shift measurements take the degraded path
    double degrade_factor = 0.5;

    void validate() const;
};

struct VelocityCommand {
    double forward = 0.0;   // m/s
    double yaw_rate = 0.0;  // rad/s, counter-clockwise positive
    double vertical = 0.0;  // m/s, up positive; always 0 for ground robots
};

struct ControlOutput {
    VelocityCommand command;
    bool done = false;
    bool degraded = false;
};

/// Pixel shift to viewing angle, atan(shift / f). Positive horizontal shifts (reference
/// features right of the query features) mean the robot must turn left.
double shift_to_angle(double shift_px, const CameraModel& camera);

/// Forward speed factor in (0, 1], non-increasing in |curvature|.
double curvature_slowdown(double curvature, const ControlConfig& config);

/// Proportional shift-to-velocity regulator for the repeat phase.
class RepeatController {
public:
    RepeatController(const ControlConfig& config, const CameraModel& camera, Platform platform, double total_length);

    /// `keyframe` must be the keyframe closest to `estimate`. `shift_age` is the age of
    /// the shift measurement in seconds.
    ControlOutput tick(double estimate, const ShiftEstimate& shift, const Keyframe& keyframe, BeliefMode mode,
                       double shift_age = 0.0);

    const VelocityCommand& previous() const { return previous_; }
    const ControlConfig& config() const { return config_; }

private:
    double nominal_forward(const Keyframe& keyframe) const;

    ControlConfig config_;
    CameraModel camera_;
    Platform platform_;
    double total_length_;
    VelocityCommand previous_;
};

}  // namespace tnr
