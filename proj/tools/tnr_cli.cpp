// Command-line entry points: teach, repeat, simulate, generate-dataset, eval-shift.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tnr/errors.hpp"
#include "tnr/eval_metrics.hpp"
#include "tnr/harness.hpp"

namespace fs = std::filesystem;
using namespace tnr;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_route(const fs::path& path, const std::vector<Eigen::Vector3d>& route) {
    std::string text = "# x y z\n";
    char buf[128];
    for (const Eigen::Vector3d& p : route) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        text += buf;
    }
    write_text(path, text);
}

struct Common {
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string config_path;

    SimConfig config() const {
        SimConfig c = config_path.empty() ? SimConfig{} : load_sim_config(config_path);
        if (seed_set) c.seed = seed;
        return c;
    }
};

struct RouteOptions {
    std::string route_file;
    std::string platform;
    std::size_t landmarks = 0;
    bool store_shifts = false;

    std::vector<Eigen::Vector3d> route(const SimConfig& c) const {
        if (!route_file.empty()) return load_waypoints(route_file);
        return c.platform == Platform::uav ? uav_ramp_route(1.0) : two_turn_route();
    }
    void apply(SimConfig& c) const {
        if (platform == "uav") c.platform = Platform::uav;
        if (platform == "ground") c.platform = Platform::ground;
        if (landmarks > 0) c.world.landmark_count = landmarks;
        if (store_shifts) c.capture.store_shifts = true;
    }
};

void add_route_options(CLI::App* cmd, RouteOptions& o) {
    cmd->add_option("--route", o.route_file, "waypoint file (default: built-in route)");
    cmd->add_option("--platform", o.platform, "ground or uav")->check(CLI::IsMember({"ground", "uav"}));
    cmd->add_option("--landmarks", o.landmarks, "open-field landmark count");
    cmd->add_flag("--store-shifts", o.store_shifts, "store keyframe-to-keyframe shifts in the map");
}

struct ScenarioOptions {
    std::string kind = "normal";
    double offset = 0.30;
    double fraction = 0.5;
    Scenario scenario() const { return {scenario_from_string(kind), offset, fraction}; }
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& o) {
    cmd->add_option("--scenario", o.kind, "normal, shifted_start, start_middle or degraded")
        ->check(CLI::IsMember({"normal", "shifted_start", "start_middle", "degraded"}));
    cmd->add_option("--offset", o.offset, "lateral start offset for shifted_start [m, left positive]");
    cmd->add_option("--fraction", o.fraction, "start fraction of the path for start_middle");
}

TaughtPath teach_into(const SimConfig& config, const std::vector<Eigen::Vector3d>& route, const fs::path& out) {
    const SimWorld world = build_world(config, route);
    TeachResult taught = run_teach(config, world, route);
    save_map(taught.map, out);
    save_sim_config(config, out / "config.json");
    write_route(out / "route.txt", route);
    std::printf("taught %.2f m, %zu keyframes -> %s\n", taught.map.total_length, taught.map.size(), out.c_str());
    return std::move(taught.map);
}

void repeat_into(const SimConfig& config, const std::vector<Eigen::Vector3d>& route, const TaughtPath& map,
                 const Scenario& scenario, const fs::path& out) {
    const SimWorld world = build_world(config, route);
    const RepeatReport report = run_repeat(config, world, map, scenario);
    fs::create_directories(out);
    save_sim_config(config, out / "config.json");
    write_text(out / "log.csv", report.log_csv());
    json summary = report.summary();
    summary["scenario"] = to_string(scenario.kind);
    write_text(out / "summary.json", summary.dump(2) + "\n");
    std::printf("%s: %s, mean deviation %.3f m, max %.3f m\n", to_string(scenario.kind),
                report.completed ? "completed" : "not completed", report.mean_deviation, report.max_deviation);
}

/// CSV "position,view,shift_px" with one row per evaluated pair.
ShiftEstimator external_estimator(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in) throw Error("cannot open " + csv.string());
    auto table = std::make_shared<std::map<std::pair<std::size_t, std::size_t>, double>>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("position", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::size_t p = 0;
        std::size_t v = 0;
        double s = 0.0;
        if (!(ss >> p >> v >> s)) throw ParseError(csv.string(), line_no, "expected position,view,shift_px");
        (*table)[{p, v}] = s;
    }
    return [table](const EvalPair& pair) -> std::optional<double> {
        const auto it = table->find({pair.position, pair.view});
        if (it == table->end()) return std::nullopt;
        return it->second;
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Teach-and-repeat navigation in a synthetic world"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "master seed")->each([&](const std::string&) { common.seed_set = true; });
    app.add_option("--config", common.config_path, "simulation config (JSON)");

    RouteOptions teach_route;
    std::string teach_out;
    CLI::App* teach = app.add_subcommand("teach", "drive a scripted route and save the taught map");
    add_route_options(teach, teach_route);
    teach->add_option("--out", teach_out, "map directory")->required();

    std::string repeat_map;
    std::string repeat_out;
    ScenarioOptions repeat_scenario;
    CLI::App* repeat = app.add_subcommand("repeat", "repeat a taught map in the same world");
    repeat->add_option("--map", repeat_map, "map directory written by teach")->required();
    repeat->add_option("--out", repeat_out, "output directory")->required();
    add_scenario_options(repeat, repeat_scenario);

    RouteOptions sim_route;
    ScenarioOptions sim_scenario;
    std::string sim_out;
    CLI::App* simulate = app.add_subcommand("simulate", "teach then repeat");
    add_route_options(simulate, sim_route);
    add_scenario_options(simulate, sim_scenario);
    simulate->add_option("--out", sim_out, "output directory")->required();

    std::size_t ds_positions = 51;
    std::string ds_world = "open_field";
    std::string ds_noise = "none";
    std::string ds_out;
    CLI::App* gen = app.add_subcommand("generate-dataset", "render the 3x3 transformation dataset");
    gen->add_option("--positions", ds_positions, "number of positions")->check(CLI::PositiveNumber);
    gen->add_option("--world", ds_world, "open_field or corridor")->check(CLI::IsMember({"open_field", "corridor"}));
    gen->add_option("--noise", ds_noise, "none or night")->check(CLI::IsMember({"none", "night"}));
    gen->add_option("--out", ds_out, "output directory")->required();

    std::string ev_dataset;
    std::string ev_estimator = "histogram";
    std::string ev_shifts;
    std::string ev_out;
    HistogramConfig ev_hist;
    MetricConfig ev_metric;
    CLI::App* ev = app.add_subcommand("eval-shift", "score shift estimates against a dataset");
    ev->add_option("--dataset", ev_dataset, "dataset.json")->required();
    ev->add_option("--estimator", ev_estimator, "histogram or external")
        ->check(CLI::IsMember({"histogram", "external"}));
    ev->add_option("--shifts", ev_shifts, "CSV position,view,shift_px for the external estimator");
    ev->add_option("--bin-size", ev_hist.bin_size_px, "histogram bin size [px]");
    ev->add_option("--sigma", ev_hist.gaussian_sigma_bins, "Gaussian sigma [bins]");
    ev->add_option("--tolerance", ev_metric.tolerance_px, "tolerance added to the correct range [px]");
    ev->add_option("--reference-depth", ev_metric.reference_depth, "near reference point depth [m]");
    ev->add_option("--out", ev_out, "output directory for report.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*teach) {
            SimConfig config = common.config();
            teach_route.apply(config);
            config.validate();
            teach_into(config, teach_route.route(config), teach_out);
        } else if (*repeat) {
            const fs::path dir(repeat_map);
            SimConfig config = common.config_path.empty() ? load_sim_config(dir / "config.json") : common.config();
            if (common.seed_set) config.seed = common.seed;
            const TaughtPath map = load_map(dir);
            repeat_into(config, load_waypoints(dir / "route.txt"), map, repeat_scenario.scenario(), repeat_out);
        } else if (*simulate) {
            SimConfig config = common.config();
            sim_route.apply(config);
            config.validate();
            const auto route = sim_route.route(config);
            const fs::path out(sim_out);
            const TaughtPath map = teach_into(config, route, out / "map");
            repeat_into(config, route, map, sim_scenario.scenario(), out / "repeat");
        } else if (*gen) {
            const SimConfig config = common.config();
            const WorldKind kind = ds_world == "corridor" ? WorldKind::corridor : WorldKind::open_field;
            const DatasetScene scene =
                dataset_scene(config.seed, ds_positions, kind, config.descriptor_dim, config.global_dim);
            ShiftDatasetSpec spec;
            spec.position_count = ds_positions;
            const NoiseModel noise = ds_noise == "night" ? NoiseModel::night(mix_seed(config.seed, 0x9)) : NoiseModel{};
            GeneratedDataset ds = generate_shift_dataset(scene.world, scene.trajectory, spec, config.camera, noise);
            write_dataset(ds, ds_out);
            save_sim_config(config, fs::path(ds_out) / "config.json");
            std::printf("%zu positions, %zu views -> %s\n", ds.manifest.positions.size(), ds.manifest.view_count(),
                        ds_out.c_str());
        } else if (*ev) {
            const DatasetManifest manifest = load_dataset_manifest(ev_dataset);
            ShiftEstimator estimator;
            if (ev_estimator == "external") {
                if (ev_shifts.empty()) throw ConfigError("--estimator external needs --shifts");
                estimator = external_estimator(ev_shifts);
            } else {
                estimator = histogram_estimator(ev_hist);
            }
            const MetricReport report = evaluate(manifest, estimator, ev_metric);
            std::fputs(report.to_table().c_str(), stdout);
            if (!ev_out.empty()) {
                fs::create_directories(ev_out);
                write_text(fs::path(ev_out) / "report.csv", report.to_csv());
                json cfg = {{"estimator", ev_estimator},
                            {"histogram", to_json(ev_hist)},
                            {"reference_depth", ev_metric.reference_depth},
                            {"tolerance_px", ev_metric.tolerance_px}};
                write_text(fs::path(ev_out) / "config.json", cfg.dump(2) + "\n");
                if (!report.errors.empty()) {
                    std::string errs;
                    for (const std::string& e : report.errors) errs += e + "\n";
                    write_text(fs::path(ev_out) / "errors.txt", errs);
                }
            }
            for (const std::string& e : report.errors) std::fprintf(stderr, "missing: %s\n", e.c_str());
            return report.complete() ? 0 : 2;
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
