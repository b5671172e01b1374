#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tnr/controller.hpp"
#include "tnr/dataset.hpp"
#include "tnr/json_io.hpp"
#include "tnr/path_belief.hpp"
#include "tnr/sim_world.hpp"
#include "tnr/teach_map.hpp"
#include "tnr/vpr.hpp"

namespace tnr {

enum class WorldKind { open_field, corridor };

struct WorldSpec {
    WorldKind kind = WorldKind::open_field;
    std::size_t landmark_count = 3000;
    double margin = 25.0;     // open field: box = route bounds grown by this margin
    double clearance = 2.5;   // open field: landmark-free band around the route
    double z_min = -0.5;
    double z_max = 3.0;
    double corridor_half_width = 2.0;
    double corridor_density = 6.0;  // landmarks per metre per wall
};

/// Everything a simulated run depends on. Serialised in full next to every output.
struct SimConfig {
    std::uint64_t seed = 1;
    Platform platform = Platform::ground;
    CameraModel camera = CameraModel::default_camera();
    double camera_height = 0.5;
    int descriptor_dim = kDefaultLocalDim;
    int global_dim = kDefaultGlobalDim;
    WorldSpec world;
    NoiseModel teach_noise;
    NoiseModel repeat_noise;
    CaptureConfig capture;
    HistogramConfig histogram;
    VprConfig vpr;
    BeliefConfig belief;
    ControlConfig control;
    double control_period = 0.1;
    double vpr_period = 0.5;
    double teach_speed = 0.5;
    double teach_lookahead = 0.4;
    double max_time_factor = 3.0;  // repeat timeout = factor * length / v_max + 60 s

    json to_json() const;
    static SimConfig from_json(const json& j);
    static SimConfig from_json(const json& j, const SimConfig& defaults);
    void validate() const;
};

SimConfig load_sim_config(const std::filesystem::path& path);
void save_sim_config(const SimConfig& config, const std::filesystem::path& path);

/// Built-in scripted routes.
std::vector<Eigen::Vector3d> two_turn_route();            // ~20 m, left then right turn, 1.5 m radius
std::vector<Eigen::Vector3d> uav_ramp_route(double rise);  // ~12 m with an altitude ramp
/// Waypoint file: one "x y [z]" or "x,y[,z]" per line, '#' comments.
std::vector<Eigen::Vector3d> load_waypoints(const std::filesystem::path& path);

/// Scripted route as a path with headings along the segments.
PathGeometry route_geometry(const std::vector<Eigen::Vector3d>& waypoints);

SimWorld build_world(const SimConfig& config, const std::vector<Eigen::Vector3d>& route);

struct TeachResult {
    TaughtPath map;
    std::size_t ticks = 0;
};

/// Drives the robot along the route (pure pursuit), capturing keyframes adaptively.
TeachResult run_teach(const SimConfig& config, const SimWorld& world, const std::vector<Eigen::Vector3d>& route);

enum class ScenarioKind { normal, shifted_start, start_middle, degraded };
const char* to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(const std::string& name);

struct Scenario {
    ScenarioKind kind = ScenarioKind::normal;
    double lateral_offset = 0.30;  // shifted_start, left positive
    double start_fraction = 0.5;   // start_middle
};

struct TickLog {
    std::size_t tick = 0;
    double time = 0.0;
    Pose pose;
    double true_arc = 0.0;
    double estimate = 0.0;
    double certainty = 0.0;
    VelocityCommand command;
    BeliefMode mode = BeliefMode::initialization;
    double deviation = 0.0;
    double altitude_error = 0.0;
    bool vpr_update = false;
};

struct RepeatReport {
    std::vector<TickLog> log;
    bool completed = false;
    double mean_deviation = 0.0;  // over ticks after navigation first engaged
    double max_deviation = 0.0;
    std::optional<double> first_turn_exit;           // taught arc-length where the first turn ends
    std::optional<double> deviation_after_first_turn;  // max deviation on the straight after it
    std::optional<double> localization_error_at_start;  // |estimate - truth| when navigation engaged
    std::optional<std::size_t> navigation_tick;
    double altitude_rms = 0.0;  // uav only, over navigation ticks
    double final_arc = 0.0;

    json summary() const;
    std::string log_csv() const;
};

RepeatReport run_repeat(const SimConfig& config, const SimWorld& world, const TaughtPath& map, const Scenario& scenario);

/// Taught arc-length interval [exit of first turn, entry of second turn or end).
std::optional<std::pair<double, double>> first_turn_exit_window(const PathGeometry& taught,
                                                                 double enter_curvature = 0.25,
                                                                 double exit_curvature = 0.05);

/// Kidnapped-robot trial: stationary robot at arc-length `s0` of the taught trajectory,
/// filtering-stage VPR each update. Returns the estimate after each update.
std::vector<double> localize_stationary(const SimConfig& config, const SimWorld& world, const TaughtPath& map,
                                        double s0, std::size_t updates, std::uint64_t seed);

/// World + trajectory used for the synthetic shift-evaluation dataset.
struct DatasetScene {
    SimWorld world;
    PathGeometry trajectory;
};
DatasetScene dataset_scene(std::uint64_t seed, std::size_t positions, WorldKind kind = WorldKind::open_field,
                           int descriptor_dim = kDefaultLocalDim, int global_dim = kDefaultGlobalDim);

}  // namespace tnr
