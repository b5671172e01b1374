#include "tnr/sim_world.hpp"

#include <algorithm>
#include <cmath>

#include "tnr/errors.hpp"

namespace tnr {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(splitmix(a) ^ b) ^ c);
}

Eigen::VectorXf landmark_descriptor(std::uint64_t world_seed, std::uint64_t id, int dim) {
    std::mt19937_64 rng(mix_seed(world_seed, id, 0xd35c));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = gauss(rng);
    return (d / d.norm()).cast<float>();
}

float landmark_base_score(std::uint64_t world_seed, std::uint64_t id) {
    std::mt19937_64 rng(mix_seed(world_seed, id, 0x5c0e));
    return static_cast<float>(std::uniform_real_distribution<double>(0.2, 1.0)(rng));
}

void NoiseModel::validate() const {
    if (!(pixel_sigma >= 0.0) || !(descriptor_sigma >= 0.0) || !(odom_scale_sigma >= 0.0))
        throw ConfigError("noise sigmas must be non-negative");
    if (!(dropout_prob >= 0.0 && dropout_prob < 1.0)) throw ConfigError("dropout_prob must be in [0, 1)");
}

bool NoiseModel::noiseless() const {
    return pixel_sigma == 0.0 && descriptor_sigma == 0.0 && dropout_prob == 0.0 && distractor_count == 0 &&
           odom_scale_sigma == 0.0;
}

NoiseModel NoiseModel::night(std::uint64_t seed) {
    NoiseModel n;
    n.pixel_sigma = 1.0;
    n.descriptor_sigma = 0.05;
    n.dropout_prob = 0.3;
    n.seed = seed;
    return n;
}

SimWorld::SimWorld(std::vector<Landmark> landmarks, int descriptor_dim, int global_dim, std::uint64_t seed)
    : landmarks_(std::move(landmarks)), descriptor_dim_(descriptor_dim), global_dim_(global_dim), seed_(seed) {
    if (descriptor_dim_ <= 0 || global_dim_ <= 0) throw ConfigError("descriptor dimensions must be positive");
    for (const Landmark& l : landmarks_)
        if (l.descriptor.size() != descriptor_dim_) throw ConfigError("landmark descriptor dimension mismatch");
}

namespace {

Landmark make_landmark(std::uint64_t seed, std::uint64_t id, const Eigen::Vector3d& p, int dim) {
    return {id, p, landmark_descriptor(seed, id, dim), landmark_base_score(seed, id)};
}

}  // namespace

SimWorld SimWorld::open_field(std::uint64_t seed, std::size_t count, const Eigen::Vector3d& min,
                              const Eigen::Vector3d& max, const PathGeometry& keep_clear, double clearance,
                              int descriptor_dim, int global_dim) {
    std::mt19937_64 rng(mix_seed(seed, 0x0f1e1d));
    std::uniform_real_distribution<double> ux(min.x(), max.x());
    std::uniform_real_distribution<double> uy(min.y(), max.y());
    std::uniform_real_distribution<double> uz(min.z(), max.z());
    std::vector<Landmark> out;
    out.reserve(count);
    std::size_t attempts = 0;
    const std::size_t max_attempts = 50 * count + 1000;
    while (out.size() < count && attempts++ < max_attempts) {
        const Eigen::Vector3d p(ux(rng), uy(rng), uz(rng));
        if (clearance > 0.0 && !keep_clear.empty() && keep_clear.nearest(p, true).distance < clearance) continue;
        out.push_back(make_landmark(seed, out.size(), p, descriptor_dim));
    }
    return SimWorld(std::move(out), descriptor_dim, global_dim, seed);
}

SimWorld SimWorld::corridor(std::uint64_t seed, const PathGeometry& route, double half_width, double density,
                            double z_min, double z_max, int descriptor_dim, int global_dim) {
    if (route.empty() || !(density > 0.0)) throw ConfigError("corridor needs a route and positive density");
    std::mt19937_64 rng(mix_seed(seed, 0xc0441d));
    std::uniform_real_distribution<double> uz(z_min, z_max);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const double step = 1.0 / density;
    std::vector<Landmark> out;
    for (double s = 0.0; s <= route.total_length(); s += step) {
        const Pose p = route.arc_position(s + jitter(rng) * step).pose;
        for (double side : {1.0, -1.0}) {
            Eigen::Vector3d pos = p.position + side * half_width * p.left();
            pos.z() = uz(rng);
            out.push_back(make_landmark(seed, out.size(), pos, descriptor_dim));
        }
    }
    return SimWorld(std::move(out), descriptor_dim, global_dim, seed);
}

std::uint64_t render_stream_seed(const NoiseModel& noise, std::uint64_t frame_index, RenderStream stream) {
    return mix_seed(noise.seed, frame_index, static_cast<std::uint64_t>(stream));
}

FeatureSet render_features(const SimWorld& world, const Pose& camera_pose, const CameraModel& camera,
                           const NoiseModel& noise, std::uint64_t frame_index) {
    noise.validate();
    FeatureSet out;
    out.image_size = {static_cast<std::uint32_t>(camera.image_size().x()),
                      static_cast<std::uint32_t>(camera.image_size().y())};
    std::mt19937_64 dropout_rng(render_stream_seed(noise, frame_index, RenderStream::dropout));
    std::mt19937_64 pixel_rng(render_stream_seed(noise, frame_index, RenderStream::pixel));
    std::mt19937_64 desc_rng(render_stream_seed(noise, frame_index, RenderStream::descriptor));
    std::bernoulli_distribution drop(noise.dropout_prob);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (const Landmark& l : world.landmarks()) {
        const auto pixel = project(camera, camera_pose, l.position);
        if (!pixel) continue;
        if (drop(dropout_rng)) continue;
        Eigen::Vector2d uv = *pixel;
        if (noise.pixel_sigma > 0.0) {
            uv.x() += noise.pixel_sigma * gauss(pixel_rng);
            uv.y() += noise.pixel_sigma * gauss(pixel_rng);
            if (!camera.in_image(uv)) continue;
        }
        Feature f;
        f.position = uv.cast<float>();
        f.score = l.base_score;
        if (noise.descriptor_sigma > 0.0) {
            Eigen::VectorXd d = l.descriptor.cast<double>();
            for (Eigen::Index i = 0; i < d.size(); ++i) d[i] += noise.descriptor_sigma * gauss(desc_rng);
            f.descriptor = (d / d.norm()).cast<float>();
        } else {
            f.descriptor = l.descriptor;
        }
        out.features.push_back(std::move(f));
    }

    if (noise.distractor_count > 0) {
        std::mt19937_64 rng(render_stream_seed(noise, frame_index, RenderStream::distractor));
        std::uniform_real_distribution<double> uu(0.0, camera.image_size().x());
        std::uniform_real_distribution<double> uv(0.0, camera.image_size().y());
        std::uniform_real_distribution<double> us(0.2, 1.0);
        for (std::size_t k = 0; k < noise.distractor_count; ++k) {
            Feature f;
            f.position = Eigen::Vector2f(static_cast<float>(uu(rng)), static_cast<float>(uv(rng)));
            f.score = static_cast<float>(us(rng));
            Eigen::VectorXd d(world.descriptor_dim());
            for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = gauss(rng);
            f.descriptor = (d / d.norm()).cast<float>();
            out.features.push_back(std::move(f));
        }
    }

    if (out.features.empty()) {
        out.global_descriptor = Eigen::VectorXf::Zero(world.global_dim());
    } else {
        try {
            out.global_descriptor = global_descriptor_from_locals(out.features, world.global_dim());
        } catch (const UnusableFrameError&) {
            out.global_descriptor = Eigen::VectorXf::Zero(world.global_dim());
        }
    }
    return out;
}

RobotState step_kinematics(const RobotState& state, const VelocityCommand& cmd, double dt) {
    RobotState next = state;
    const double yaw = state.pose.yaw;
    next.pose.position.x() += cmd.forward * std::cos(yaw) * dt;
    next.pose.position.y() += cmd.forward * std::sin(yaw) * dt;
    if (state.platform == Platform::uav) next.pose.position.z() += cmd.vertical * dt;
    next.pose.yaw = normalize_angle(yaw + cmd.yaw_rate * dt);
    return next;
}

Odometry::Odometry(const NoiseModel& noise, Platform platform)
    : noise_(noise), platform_(platform), rng_(mix_seed(noise.seed, 0x0d0e)) {
    noise_.validate();
}

double Odometry::read(double true_distance) {
    if (noise_.odom_scale_sigma == 0.0) return true_distance;
    return true_distance * (1.0 + std::normal_distribution<double>(0.0, noise_.odom_scale_sigma)(rng_));
}

double Odometry::read_commanded(const VelocityCommand& cmd, double dt) const {
    return std::max(0.0, cmd.forward) * dt;
}

double Odometry::measure(double true_distance, const VelocityCommand& cmd, double dt) {
    return platform_ == Platform::uav ? read_commanded(cmd, dt) : read(true_distance);
}

}  // namespace tnr
