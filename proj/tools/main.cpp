#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfreg/arap.hpp"
#include "surfreg/obj_io.hpp"
#include "surfreg/rigid.hpp"
#include "surfreg/synth.hpp"

namespace {

using surfreg::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

struct DriverArgs {
    std::string config_path;
    std::string source;
    std::string target;
    std::string out;
    std::string log;
    std::string report;
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 0.0;
    double w4 = 0.0;
    double tikhonov = 0.0;
    int iters = 0;
    double tol = 0.0;
    bool require_convergence = false;
};

/// Fully resolved settings for one registration run.
struct ResolvedRun {
    surfreg::Weights weights;
    int max_iters = 0;
    double stop_tol = 0.0;
    std::string source;
    std::string target;
    std::string out;
    std::string log;
    std::string report;
};

void add_driver_options(CLI::App* cmd, DriverArgs& args, bool with_w3) {
    cmd->add_option("--config", args.config_path, "JSON config file; flags override its values");
    cmd->add_option("--source", args.source, "Source OBJ path");
    cmd->add_option("--target", args.target, "Target OBJ path");
    cmd->add_option("--out", args.out, "Registered output OBJ path");
    cmd->add_option("--w1", args.w1, "Fit weight (default 1)");
    cmd->add_option("--w2", args.w2, "Motion weight (default 1)");
    if (with_w3) {
        cmd->add_option("--w3", args.w3, "Neighborhood weight (default 1)");
    }
    cmd->add_option("--w4", args.w4, "Point-to-plane weight (default 0, term off)");
    cmd->add_option("--tikhonov", args.tikhonov, "Rotation regularizer (default 1e-6)");
    cmd->add_option("--iters", args.iters, "Iteration cap");
    cmd->add_option("--tol", args.tol, "Convergence tolerance (default 1e-6)");
    cmd->add_option("--log", args.log, "Per-iteration CSV path");
    cmd->add_option("--report", args.report, "Summary JSON path");
    cmd->add_flag("--require-convergence", args.require_convergence,
                  "Exit 3 when the iteration cap is hit without converging");
}

/// Folds explicitly given flags over the config file, which in turn overlays
/// the per-mode defaults.
ResolvedRun resolve_run(const CLI::App* cmd, const DriverArgs& args, bool arap_mode) {
    RunConfig file;
    if (cmd->count("--config") > 0) {
        file = surfreg::parse_run_config(surfreg::read_text_file(args.config_path));
    }
    auto overlay_num = [&](const char* flag, double value, std::optional<double>& slot) {
        if (cmd->count(flag) > 0) {
            slot = value;
        }
    };
    overlay_num("--w1", args.w1, file.w1);
    overlay_num("--w2", args.w2, file.w2);
    if (arap_mode) {
        overlay_num("--w3", args.w3, file.w3);
    }
    overlay_num("--w4", args.w4, file.w4);
    overlay_num("--tikhonov", args.tikhonov, file.tikhonov);
    overlay_num("--tol", args.tol, file.stop_tol);
    if (cmd->count("--iters") > 0) {
        file.max_iters = args.iters;
    }
    auto overlay_str = [&](const char* flag, const std::string& value,
                           std::optional<std::string>& slot) {
        if (cmd->count(flag) > 0) {
            slot = value;
        }
    };
    overlay_str("--source", args.source, file.source);
    overlay_str("--target", args.target, file.target);
    overlay_str("--out", args.out, file.output);
    overlay_str("--log", args.log, file.log);

    ResolvedRun run;
    run.weights.w1 = file.w1.value_or(1.0);
    run.weights.w2 = file.w2.value_or(1.0);
    run.weights.w3 = arap_mode ? file.w3.value_or(1.0) : 0.0;
    run.weights.w4 = file.w4.value_or(0.0);
    run.weights.tikhonov = file.tikhonov.value_or(1e-6);
    run.max_iters = file.max_iters.value_or(arap_mode ? 100 : 50);
    run.stop_tol = file.stop_tol.value_or(1e-6);
    run.source = file.source.value_or("");
    run.target = file.target.value_or("");
    run.out = file.output.value_or("");
    run.log = file.log.value_or("");
    // The report path has no config-file key; it is flag-only.
    run.report = cmd->count("--report") > 0 ? args.report : "";

    if (run.source.empty()) {
        throw std::invalid_argument("--source is required");
    }
    if (run.target.empty()) {
        throw std::invalid_argument("--target is required");
    }
    if (run.out.empty()) {
        throw std::invalid_argument("--out is required");
    }
    return run;
}

nlohmann::json energies_json(const surfreg::EnergyBreakdown& e) {
    return nlohmann::json{{"e_fit", e.e_fit},
                          {"e_rigid", e.e_rigid},
                          {"e_arap", e.e_arap},
                          {"e_plane", e.e_plane},
                          {"e_total", e.e_total}};
}

nlohmann::json settings_json(const ResolvedRun& run) {
    return nlohmann::json{{"w1", run.weights.w1},       {"w2", run.weights.w2},
                          {"w3", run.weights.w3},       {"w4", run.weights.w4},
                          {"tikhonov", run.weights.tikhonov},
                          {"max_iters", run.max_iters}, {"stop_tol", run.stop_tol}};
}

nlohmann::json transform_json(const surfreg::RigidTransform& t) {
    nlohmann::json rotation = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            rotation.push_back(t.rotation(r, c));
        }
    }
    return nlohmann::json{{"rotation", rotation},
                          {"translation", {t.translation.x(), t.translation.y(),
                                           t.translation.z()}}};
}

void write_outputs(const ResolvedRun& run, const std::string& mode,
                   const surfreg::RegistrationResult& result, const surfreg::Mesh& source) {
    surfreg::Mesh out_mesh;
    out_mesh.vertices = result.final_points;
    out_mesh.faces = source.faces;
    surfreg::save_mesh(run.out, out_mesh);

    if (!run.log.empty()) {
        surfreg::write_text_file(run.log, surfreg::write_iteration_log(result.reports));
    }
    if (!run.report.empty()) {
        nlohmann::json j{{"mode", mode},
                         {"iterations", result.reports.size()},
                         {"converged", result.converged},
                         {"final_energies", energies_json(result.reports.back().energies)},
                         {"rmsd", result.reports.back().rmsd_to_projection},
                         {"settings", settings_json(run)}};
        if (mode == "rigid") {
            j["transform"] = transform_json(result.transform);
        }
        surfreg::write_text_file(run.report, j.dump(2) + "\n");
    }
}

int run_rigid(const CLI::App* cmd, const DriverArgs& args) {
    const ResolvedRun run = resolve_run(cmd, args, false);
    const surfreg::Mesh source = surfreg::load_mesh(run.source);
    const surfreg::Mesh target = surfreg::load_mesh(run.target);

    surfreg::RigidConfig cfg;
    cfg.weights = run.weights;
    cfg.max_iters = run.max_iters;
    cfg.stop_tol = run.stop_tol;
    cfg.use_point_to_plane = run.weights.w4 > 0.0;

    const surfreg::KdTree tree = surfreg::make_target_tree(target, cfg.use_point_to_plane);
    const surfreg::RegistrationResult result =
        surfreg::register_rigid(source.vertices, tree, cfg);
    if (args.require_convergence && !result.converged) {
        std::cerr << "error: no convergence within " << run.max_iters << " iterations\n";
        return kExitNumerical;
    }
    write_outputs(run, "rigid", result, source);
    return 0;
}

int run_arap(const CLI::App* cmd, const DriverArgs& args) {
    const ResolvedRun run = resolve_run(cmd, args, true);
    const surfreg::Mesh source = surfreg::load_mesh(run.source);
    const surfreg::Mesh target = surfreg::load_mesh(run.target);
    if (source.faces.empty()) {
        throw std::invalid_argument("arap needs a source mesh with faces");
    }

    surfreg::ArapConfig cfg;
    cfg.weights = run.weights;
    cfg.max_iters = run.max_iters;
    cfg.stop_tol = run.stop_tol;
    cfg.use_point_to_plane = run.weights.w4 > 0.0;

    const surfreg::KdTree tree = surfreg::make_target_tree(target, cfg.use_point_to_plane);
    const surfreg::RegistrationResult result = surfreg::register_arap(source, tree, cfg);
    if (args.require_convergence && !result.converged) {
        std::cerr << "error: no convergence within " << run.max_iters << " iterations\n";
        return kExitNumerical;
    }
    write_outputs(run, "arap", result, source);
    return 0;
}

int run_synth(const std::string& scenario_name, std::uint64_t seed, const std::string& out_dir) {
    surfreg::Scenario scenario;
    if (scenario_name == "sphere-rigid") {
        scenario = surfreg::sphere_rigid_scenario(seed);
    } else if (scenario_name == "bend") {
        scenario = surfreg::bend_scenario(seed);
    } else if (scenario_name == "incline") {
        scenario = surfreg::incline_scenario(seed);
    } else {
        throw std::invalid_argument("unknown scenario '" + scenario_name +
                                    "' (expected sphere-rigid, bend or incline)");
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + out_dir + ": " + ec.message());
    }
    const std::filesystem::path dir(out_dir);
    surfreg::save_mesh((dir / "source.obj").string(), scenario.source);
    surfreg::save_mesh((dir / "target.obj").string(), scenario.target);

    nlohmann::json j{{"scenario", scenario.name}, {"seed", seed}};
    if (scenario.ground_truth) {
        const nlohmann::json t = transform_json(*scenario.ground_truth);
        j["rotation"] = t["rotation"];
        j["translation"] = t["translation"];
    }
    surfreg::write_text_file((dir / "ground_truth.json").string(), j.dump(2) + "\n");
    return 0;
}

int run_info(const std::string& path) {
    const surfreg::Mesh mesh = surfreg::load_mesh(path);
    std::cout << "vertices: " << mesh.vertices.size() << "\n";
    std::cout << "faces: " << mesh.faces.size() << "\n";
    std::cout << "normals: " << mesh.normals.size() << "\n";
    if (!mesh.vertices.empty()) {
        const surfreg::Bounds b = surfreg::bounding_box(mesh.vertices);
        std::cout << "bbox min: " << surfreg::format_double(b.min.x()) << " "
                  << surfreg::format_double(b.min.y()) << " "
                  << surfreg::format_double(b.min.z()) << "\n";
        std::cout << "bbox max: " << surfreg::format_double(b.max.x()) << " "
                  << surfreg::format_double(b.max.y()) << " "
                  << surfreg::format_double(b.max.z()) << "\n";
        std::cout << "bbox diagonal: " << surfreg::format_double(b.diagonal()) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigid and as-rigid-as-possible surface registration"};
    app.require_subcommand(1);

    DriverArgs rigid_args;
    CLI::App* rigid_cmd = app.add_subcommand("rigid", "Rigid registration (6+3N system)");
    add_driver_options(rigid_cmd, rigid_args, false);

    DriverArgs arap_args;
    CLI::App* arap_cmd = app.add_subcommand("arap", "Non-rigid registration (6+6N system)");
    add_driver_options(arap_cmd, arap_args, true);

    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string out_dir;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
    synth_cmd->add_option("--scenario", scenario_name, "sphere-rigid, bend or incline")
        ->required();
    synth_cmd->add_option("--seed", seed, "PRNG seed (default 0)");
    synth_cmd->add_option("--out-dir", out_dir, "Directory for source.obj, target.obj, "
                                                "ground_truth.json")
        ->required();

    std::string info_path;
    CLI::App* info_cmd = app.add_subcommand("info", "Print mesh statistics");
    info_cmd->add_option("file", info_path, "OBJ file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
        return kExitUsage;
    }

    try {
        if (rigid_cmd->parsed()) {
            return run_rigid(rigid_cmd, rigid_args);
        }
        if (arap_cmd->parsed()) {
            return run_arap(arap_cmd, arap_args);
        }
        if (synth_cmd->parsed()) {
            return run_synth(scenario_name, seed, out_dir);
        }
        return run_info(info_path);
    } catch (const surfreg::SingularSystemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
