#include <doctest.h>

#include <cmath>
#include <random>

#include "tnr/errors.hpp"
#include "tnr/sim_world.hpp"

using namespace tnr;
using doctest::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

SimWorld fan_world(std::size_t n, std::uint64_t seed) {
    // Landmarks spread in front of a camera at the origin, all visible.
    std::vector<Landmark> ls;
    for (std::size_t i = 0; i < n; ++i) {
        Landmark l;
        l.id = i;
        const double a = -0.4 + 0.8 * static_cast<double>(i) / static_cast<double>(n);
        l.position = {10.0 * std::cos(a), 10.0 * std::sin(a), 0.3 * std::sin(7.0 * i)};
        l.descriptor = landmark_descriptor(seed, i, 32);
        l.base_score = landmark_base_score(seed, i);
        ls.push_back(l);
    }
    return SimWorld(std::move(ls), 32, 64, seed);
}

}  // namespace

TEST_CASE("a single landmark straight ahead renders at the principal point") {
    Landmark l;
    l.position = {4.0, 0.0, 0.0};
    l.descriptor = landmark_descriptor(1, 0, 16);
    const SimWorld w({l}, 16, 16, 1);
    const FeatureSet f = render_features(w, Pose{}, CameraModel::default_camera());
    REQUIRE(f.size() == 1);
    CHECK(f.features[0].position.x() == 320.0f);
    CHECK(f.features[0].position.y() == 240.0f);
    CHECK(f.features[0].descriptor == l.descriptor);
    CHECK(f.global_descriptor.head(16).isApprox(l.descriptor));
    CHECK_NOTHROW(f.validate());
}

TEST_CASE("nothing visible gives an empty set with a zero descriptor") {
    const SimWorld w = fan_world(10, 2);
    const FeatureSet f = render_features(w, Pose(Eigen::Vector3d::Zero(), kPi), CameraModel::default_camera());
    CHECK(f.empty());
    CHECK(f.global_descriptor.size() == 64);
    CHECK(f.global_descriptor.norm() == 0.0f);
}

TEST_CASE("landmark descriptors depend only on world seed and id") {
    CHECK(landmark_descriptor(3, 17, 64) == landmark_descriptor(3, 17, 64));
    CHECK_FALSE(landmark_descriptor(3, 17, 64) == landmark_descriptor(3, 18, 64));
    CHECK_FALSE(landmark_descriptor(3, 17, 64) == landmark_descriptor(4, 17, 64));
    CHECK(landmark_descriptor(3, 17, 64).norm() == Approx(1.0));
    const float s = landmark_base_score(3, 17);
    CHECK(s > 0.0f);
    CHECK(s <= 1.0f);
}

TEST_CASE("dropout follows the documented per-landmark Bernoulli stream") {
    const SimWorld w = fan_world(500, 9);
    NoiseModel noise;
    noise.dropout_prob = 0.3;
    noise.seed = 77;
    const CameraModel cam = CameraModel::default_camera();
    for (std::uint64_t frame : {0ull, 1ull, 12345ull}) {
        std::mt19937_64 rng(render_stream_seed(noise, frame, RenderStream::dropout));
        std::bernoulli_distribution drop(0.3);
        std::vector<Eigen::Vector2f> expect;
        for (const Landmark& l : w.landmarks()) {
            const auto px = project(cam, Pose{}, l.position);
            if (!px) continue;
            if (!drop(rng)) expect.push_back(px->cast<float>());
        }
        const FeatureSet f = render_features(w, Pose{}, cam, noise, frame);
        REQUIRE(f.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(f.features[i].position == expect[i]);
        CHECK(static_cast<double>(f.size()) == Approx(350.0).epsilon(0.12));
    }
}

TEST_CASE("rendering is deterministic per frame index") {
    const SimWorld w = fan_world(200, 4);
    const NoiseModel night = NoiseModel::night(8);
    const CameraModel cam = CameraModel::default_camera();
    CHECK(render_features(w, Pose{}, cam, night, 3) == render_features(w, Pose{}, cam, night, 3));
    CHECK_FALSE(render_features(w, Pose{}, cam, night, 3) == render_features(w, Pose{}, cam, night, 4));
    const FeatureSet f = render_features(w, Pose{}, cam, night, 3);
    CHECK_NOTHROW(f.validate(1e-5));
}

TEST_CASE("distractors add the requested number of features") {
    const SimWorld w = fan_world(50, 4);
    NoiseModel n;
    n.distractor_count = 25;
    const CameraModel cam = CameraModel::default_camera();
    CHECK(render_features(w, Pose{}, cam, n).size() == render_features(w, Pose{}, cam).size() + 25);
}

TEST_CASE("open field respects the clearance band") {
    const PathGeometry route({Pose({0, 0, 0}, 0.0), Pose({20, 0, 0}, 0.0)});
    const SimWorld w = SimWorld::open_field(5, 800, {-10, -10, 0}, {30, 10, 3}, route, 2.0);
    CHECK(w.landmarks().size() == 800);
    for (const Landmark& l : w.landmarks()) {
        CHECK(route.nearest(l.position).distance >= 2.0);
        CHECK(l.position.x() >= -10.0);
        CHECK(l.position.x() <= 30.0);
    }
    CHECK(SimWorld::open_field(5, 800, {-10, -10, 0}, {30, 10, 3}, route, 2.0).landmarks()[17].position ==
          w.landmarks()[17].position);
}

TEST_CASE("corridor walls sit at the half width") {
    const PathGeometry route({Pose({0, 0, 0}, 0.0), Pose({10, 0, 0}, 0.0)});
    const SimWorld w = SimWorld::corridor(2, route, 2.0, 5.0, 0.0, 2.0);
    CHECK(w.landmarks().size() >= 90);
    for (const Landmark& l : w.landmarks()) CHECK(std::abs(std::abs(l.position.y()) - 2.0) < 1e-9);
}

TEST_CASE("unicycle kinematics") {
    RobotState s;
    s = step_kinematics(s, {1.0, 0.0, 0.7}, 2.0);
    CHECK(s.pose.position.isApprox(Eigen::Vector3d(2.0, 0.0, 0.0)));  // ground: no climbing
    s.platform = Platform::uav;
    s = step_kinematics(s, {0.0, 0.0, 0.5}, 2.0);
    CHECK(s.pose.position.z() == Approx(1.0));
    const RobotState hover = step_kinematics(s, {}, 5.0);
    CHECK(hover.pose.position == s.pose.position);
    CHECK(hover.pose.yaw == s.pose.yaw);
}

TEST_CASE("many small steps follow the exact circular arc") {
    const double v = 0.5;
    const double w = 0.4;
    const double t = 3.0;
    RobotState s;
    const int n = 10000;
    for (int i = 0; i < n; ++i) s = step_kinematics(s, {v, w, 0.0}, t / n);
    const double r = v / w;
    CHECK(s.pose.position.x() == Approx(r * std::sin(w * t)).epsilon(1e-3));
    CHECK(s.pose.position.y() == Approx(r * (1.0 - std::cos(w * t))).epsilon(1e-3));
    CHECK(s.pose.yaw == Approx(w * t));
}

TEST_CASE("wheel odometry scale noise is unbiased") {
    NoiseModel n;
    n.odom_scale_sigma = 0.05;
    n.seed = 3;
    Odometry odo(n, Platform::ground);
    double sum = 0.0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) sum += odo.read(1.0);
    CHECK(sum / trials == Approx(1.0).epsilon(0.005));
    Odometry exact({}, Platform::ground);
    CHECK(exact.read(0.37) == 0.37);
}

TEST_CASE("UAV odometry integrates the commanded speed") {
    Odometry odo({}, Platform::uav);
    CHECK(odo.measure(5.0, {0.4, 0.0, 0.0}, 0.1) == Approx(0.04));
    CHECK(odo.measure(5.0, {}, 0.1) == 0.0);  // hovering
    CHECK(odo.measure(5.0, {-1.0, 0.0, 0.0}, 0.1) == 0.0);
}

TEST_CASE("noise settings are validated") {
    NoiseModel n;
    n.dropout_prob = 1.5;
    CHECK_THROWS_AS(n.validate(), ConfigError);
    CHECK(NoiseModel{}.noiseless());
    CHECK_FALSE(NoiseModel::night(1).noiseless());
}
