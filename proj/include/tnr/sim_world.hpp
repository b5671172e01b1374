#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "tnr/controller.hpp"
#include "tnr/features.hpp"
#include "tnr/geometry.hpp"

namespace tnr {

/// SplitMix64 finaliser; used to derive independent seeds for every random stream.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct Landmark {
    std::uint64_t id = 0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::VectorXf descriptor;
    float base_score = 1.0f;
};

/// Unit descriptor derived only from (world seed, id): hash -> Gaussian draws -> normalise.
Eigen::VectorXf landmark_descriptor(std::uint64_t world_seed, std::uint64_t id, int dim);
float landmark_base_score(std::uint64_t world_seed, std::uint64_t id);

struct NoiseModel {
    double pixel_sigma = 0.0;
    double descriptor_sigma = 0.0;  // per-component std added before renormalising
    double dropout_prob = 0.0;
    std::size_t distractor_count = 0;
    double odom_scale_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool noiseless() const;

    /// Night-time proxy: dropout 0.3, descriptor noise 0.05, 1 px jitter.
    static NoiseModel night(std::uint64_t seed);
};

class SimWorld {
public:
    SimWorld() = default;
    SimWorld(std::vector<Landmark> landmarks, int descriptor_dim, int global_dim, std::uint64_t seed);

    const std::vector<Landmark>& landmarks() const { return landmarks_; }
    int descriptor_dim() const { return descriptor_dim_; }
    int global_dim() const { return global_dim_; }
    std::uint64_t seed() const { return seed_; }

    /// Landmarks scattered uniformly in the box [min, max], skipping any closer than
    /// `clearance` (planar) to `keep_clear`.
    static SimWorld open_field(std::uint64_t seed, std::size_t count, const Eigen::Vector3d& min,
                               const Eigen::Vector3d& max, const PathGeometry& keep_clear = {},
                               double clearance = 0.0, int descriptor_dim = kDefaultLocalDim,
                               int global_dim = kDefaultGlobalDim);

    /// Two walls of landmarks at +/- half_width beside `route`, `density` landmarks per
    /// metre of wall, heights uniform in [z_min, z_max].
    static SimWorld corridor(std::uint64_t seed, const PathGeometry& route, double half_width, double density,
                             double z_min, double z_max, int descriptor_dim = kDefaultLocalDim,
                             int global_dim = kDefaultGlobalDim);

private:
    std::vector<Landmark> landmarks_;
    int descriptor_dim_ = kDefaultLocalDim;
    int global_dim_ = kDefaultGlobalDim;
    std::uint64_t seed_ = 0;
};

/// Seeds of the per-frame random streams. The dropout stream draws exactly one
/// Bernoulli(dropout_prob) per visible landmark, in landmark order.
enum class RenderStream : std::uint64_t { dropout = 1, pixel = 2, descriptor = 3, distractor = 4 };
std::uint64_t render_stream_seed(const NoiseModel& noise, std::uint64_t frame_index, RenderStream stream);

/// Features seen from `camera_pose`. Zero visible landmarks gives an empty set whose
/// global descriptor is all zeros.
FeatureSet render_features(const SimWorld& world, const Pose& camera_pose, const CameraModel& camera,
                           const NoiseModel& noise = {}, std::uint64_t frame_index = 0);

struct RobotState {
    Pose pose;
    Platform platform = Platform::ground;
};

/// Unicycle integration; UAVs also integrate the vertical velocity.
RobotState step_kinematics(const RobotState& state, const VelocityCommand& cmd, double dt);

/// Ground robots: wheel odometry with multiplicative scale noise. UAVs: distance
/// integrated from the commanded forward velocity, independent of the true motion.
class Odometry {
public:
    Odometry(const NoiseModel& noise, Platform platform);

    double read(double true_distance);
    double read_commanded(const VelocityCommand& cmd, double dt) const;
    /// Dispatches on platform.
    double measure(double true_distance, const VelocityCommand& cmd, double dt);

private:
    NoiseModel noise_;
    Platform platform_;
    std::mt19937_64 rng_;
};

}  // namespace tnr
