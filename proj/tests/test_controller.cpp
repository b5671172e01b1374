#include <doctest.h>

#include <cmath>

#include "tnr/controller.hpp"
#include "tnr/errors.hpp"

using namespace tnr;
using doctest::Approx;

namespace {

ShiftEstimate shift_of(double h, double v = 0.0) {
    ShiftEstimate s;
    s.horizontal_shift_px = h;
    s.vertical_shift_px = v;
    s.similarity = 1.0;
    s.match_count = 10;
    return s;
}

}  // namespace

TEST_CASE("shift to angle") {
    const CameraModel cam = CameraModel::default_camera();
    CHECK(shift_to_angle(0.0, cam) == 0.0);
    CHECK(shift_to_angle(500.0, cam) == Approx(std::atan(1.0)));
    CHECK(shift_to_angle(-50.0, cam) == Approx(-std::atan(0.1)));
}

TEST_CASE("curvature slows the robot down monotonically") {
    const ControlConfig cfg;
    CHECK(curvature_slowdown(0.0, cfg) == 1.0);
    double last = 1.0;
    for (double k : {0.1, 0.5, 1.0, 3.0}) {
        const double f = curvature_slowdown(k, cfg);
        CHECK(f < last);
        CHECK(f > 0.0);
        CHECK(curvature_slowdown(-k, cfg) == f);
        last = f;
    }
}

TEST_CASE("zero shift drives straight at full speed") {
    RepeatController c({}, CameraModel::default_camera(), Platform::uav, 10.0);
    const ControlOutput out = c.tick(1.0, shift_of(0.0), Keyframe{}, BeliefMode::navigation);
    CHECK_FALSE(out.done);
    CHECK(out.command.forward == Approx(0.5));
    CHECK(out.command.yaw_rate == 0.0);
    CHECK(out.command.vertical == 0.0);
}

TEST_CASE("a positive horizontal shift turns left") {
    const ControlConfig cfg;
    RepeatController c(cfg, CameraModel::default_camera(), Platform::ground, 10.0);
    const ControlOutput out = c.tick(1.0, shift_of(40.0, 30.0), Keyframe{}, BeliefMode::navigation);
    CHECK(out.command.yaw_rate == Approx(cfg.kp_yaw * std::atan(40.0 / 500.0)));
    CHECK(out.command.yaw_rate > 0.0);
    CHECK(out.command.vertical == 0.0);  // ground robots never climb
}

TEST_CASE("a positive vertical shift makes a UAV climb") {
    const ControlConfig cfg;
    RepeatController c(cfg, CameraModel::default_camera(), Platform::uav, 10.0);
    const ControlOutput out = c.tick(1.0, shift_of(0.0, 12.0), Keyframe{}, BeliefMode::navigation);
    CHECK(out.command.vertical == Approx(cfg.kp_vertical * std::atan(12.0 / 500.0)));
}

TEST_CASE("blending averages with the stored shift") {
    ControlConfig cfg;
    cfg.shift_blend = true;
    RepeatController c(cfg, CameraModel::default_camera(), Platform::ground, 10.0);
    Keyframe k;
    k.stored_shift = Eigen::Vector2d(10.0, 0.0);
    const ControlOutput out = c.tick(1.0, shift_of(20.0), k, BeliefMode::navigation);
    CHECK(out.command.yaw_rate == Approx(cfg.kp_yaw * std::atan(15.0 / 500.0)));
    // Without a stored shift the measurement is used as is.
    CHECK(c.tick(1.0, shift_of(20.0), Keyframe{}, BeliefMode::navigation).command.yaw_rate ==
          Approx(cfg.kp_yaw * std::atan(20.0 / 500.0)));
}

TEST_CASE("the run ends within epsilon of the path end") {
    RepeatController c({}, CameraModel::default_camera(), Platform::ground, 10.0);
    CHECK_FALSE(c.tick(9.79, shift_of(5.0), Keyframe{}, BeliefMode::navigation).done);
    const ControlOutput out = c.tick(9.8, shift_of(5.0), Keyframe{}, BeliefMode::navigation);
    CHECK(out.done);
    CHECK(out.command.forward == 0.0);
    CHECK(out.command.yaw_rate == 0.0);
}

TEST_CASE("the robot holds still while localizing") {
    RepeatController c({}, CameraModel::default_camera(), Platform::uav, 10.0);
    const ControlOutput out = c.tick(2.0, shift_of(50.0, 50.0), Keyframe{}, BeliefMode::initialization);
    CHECK(out.command.forward == 0.0);
    CHECK(out.command.yaw_rate == 0.0);
    CHECK(out.command.vertical == 0.0);
    CHECK_FALSE(out.done);
}

TEST_CASE("missing or stale shifts take the degraded path") {
    const ControlConfig cfg;
    RepeatController c(cfg, CameraModel::default_camera(), Platform::ground, 10.0);
    const double yaw = c.tick(1.0, shift_of(30.0), Keyframe{}, BeliefMode::navigation).command.yaw_rate;
    const ControlOutput lost = c.tick(1.1, ShiftEstimate{}, Keyframe{}, BeliefMode::navigation);
    CHECK(lost.degraded);
    CHECK(lost.command.forward == Approx(cfg.degrade_factor * cfg.v_max));
    CHECK(lost.command.yaw_rate == Approx(cfg.degrade_factor * yaw));
    const ControlOutput stale = c.tick(1.2, shift_of(30.0), Keyframe{}, BeliefMode::navigation, 2.0);
    CHECK(stale.degraded);
    CHECK(stale.command.yaw_rate == Approx(cfg.degrade_factor * cfg.degrade_factor * yaw));
}

TEST_CASE("taught speed and curvature cap the forward speed") {
    const ControlConfig cfg;
    RepeatController c(cfg, CameraModel::default_camera(), Platform::ground, 10.0);
    Keyframe k;
    k.taught_forward_speed = 0.25;
    CHECK(c.tick(1.0, shift_of(0.0), k, BeliefMode::navigation).command.forward == Approx(0.25));
    k = {};
    k.taught_curvature = 1.0;
    CHECK(c.tick(1.0, shift_of(0.0), k, BeliefMode::navigation).command.forward ==
          Approx(cfg.v_max * curvature_slowdown(1.0, cfg)));
}

TEST_CASE("controller settings are validated") {
    ControlConfig cfg;
    cfg.v_max = 0.0;
    CHECK_THROWS_AS(RepeatController(cfg, CameraModel::default_camera(), Platform::ground, 1.0), ConfigError);
}
