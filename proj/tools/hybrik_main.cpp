#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "hybrik/harness.hpp"
#include "hybrik/io.hpp"
#include "hybrik/rng.hpp"
#include "hybrik/version.hpp"

namespace fs = std::filesystem;
using namespace hybrik;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void check_pose_sizes(const BodyModel& model, std::size_t got, const char* what,
                      std::size_t want) {
    if (got != want) {
        throw DimensionMismatch(std::string("pose field '") + what + "' has " +
                                std::to_string(got) + " entries, model expects " +
                                std::to_string(want));
    }
    (void)model;
}

struct CommonArgs {
    std::string model_path;
    std::string pose_path;
    std::string out_path;
    bool full_precision = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--model", args.model_path, "body model file (JSON)")->required();
    cmd->add_option("--pose", args.pose_path, "pose file (JSON)")->required();
    cmd->add_option("--out", args.out_path, "output file")->required();
    cmd->add_flag("--full-precision", args.full_precision,
                  "emit shortest round-trippable numbers instead of 9 significant digits");
}

void run_fk(const CommonArgs& args) {
    const BodyModel model = load_model(args.model_path);
    const PoseFile pose = load_pose(args.pose_path);
    const RotationSet rotations = require_rotations(pose);
    const ShapeCoeffs beta = require_beta(pose);
    check_pose_sizes(model, rotations.relative.size(), "rotations",
                     static_cast<std::size_t>(model.joint_count()));

    const JointSet rest = rest_pose_from_shape(model, beta);
    const JointSet posed = fk(model.tree, rest, rotations);

    PoseFile out;
    out.joints = posed.positions;
    save_pose(out, args.out_path, args.full_precision);
}

void run_solve(const CommonArgs& args, const std::string& mode_name) {
    const BodyModel model = load_model(args.model_path);
    const PoseFile pose = load_pose(args.pose_path);
    const ShapeCoeffs beta = require_beta(pose);
    const TwistSet twists = require_twists(pose);
    JointSet target;
    target.tag = JointTag::Predicted;
    target.positions = require_joints(pose);
    const auto k = static_cast<std::size_t>(model.joint_count());
    check_pose_sizes(model, target.positions.size(), "joints", k);
    check_pose_sizes(model, twists.size(), "twists", k - 1);

    const SolveMode mode = mode_name == "naive" ? SolveMode::Naive : SolveMode::Adaptive;
    const JointSet rest = rest_pose_from_shape(model, beta);
    const RootTriple triple = RootTriple::from_names(model.tree);
    const SolveReport report = solve(model.tree, rest, target, twists, triple, mode);

    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = mode_name;
    Json rows = Json::array();
    for (const Rotation& r : report.rotations.relative) {
        rows.push_back(matrix_rowmajor_to_json(r.matrix(), args.full_precision));
    }
    doc["rotations"] = std::move(rows);
    doc["joints"] = positions_to_json(report.reconstructed.positions, args.full_precision);
    Json err = Json::array();
    Json eps = Json::array();
    for (std::size_t i = 0; i < report.per_joint_error.size(); ++i) {
        err.push_back(args.full_precision ? report.per_joint_error[i]
                                          : round_sig(report.per_joint_error[i]));
        eps.push_back(args.full_precision ? report.bone_eps[i] : round_sig(report.bone_eps[i]));
    }
    doc["per_joint_error"] = std::move(err);
    doc["bone_eps"] = std::move(eps);
    doc["root_translation"] =
        positions_to_json({report.root_translation}, args.full_precision)[0];
    Json degenerate = Json::array();
    for (int j : report.degenerate_swings) {
        degenerate.push_back(model.tree.name(j));
    }
    doc["degenerate_joints"] = std::move(degenerate);

    std::ofstream out(args.out_path);
    if (!out) {
        throw ParseError("cannot write '" + args.out_path + "'");
    }
    out << doc.dump(1) << '\n';
}

void run_skin(const CommonArgs& args) {
    const BodyModel model = load_model(args.model_path);
    const PoseFile pose = load_pose(args.pose_path);
    const RotationSet rotations = require_rotations(pose);
    const ShapeCoeffs beta = require_beta(pose);
    check_pose_sizes(model, rotations.relative.size(), "rotations",
                     static_cast<std::size_t>(model.joint_count()));

    const PosedMesh mesh = skin(model, beta, rotations);
    save_mesh(mesh, args.out_path, args.full_precision);
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string subcommand;
    std::string config_path;
    std::string out_dir;
    int threads = 0;  // 0: take the config value
};

struct BenchSetup {
    ExperimentConfig config;
    BodyModel model;
    std::string model_label;
};

double config_number(const Json& doc, const char* field, double fallback) {
    if (!doc.contains(field)) {
        return fallback;
    }
    if (!doc[field].is_number()) {
        throw ValidationError(std::string("config field '") + field + "' must be a number");
    }
    return doc[field].get<double>();
}

BenchSetup load_bench_setup(const BenchArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw ParseError("cannot open '" + args.config_path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + args.config_path + "': " + e.what());
    }

    BenchSetup setup;
    ExperimentConfig& cfg = setup.config;
    cfg.seed = static_cast<std::uint64_t>(config_number(doc, "seed", 1));
    cfg.trials = static_cast<int>(config_number(doc, "trials", 100));
    if (doc.contains("jitter_levels_mm")) {
        if (!doc["jitter_levels_mm"].is_array()) {
            throw ValidationError("config field 'jitter_levels_mm' must be an array");
        }
        cfg.jitter_levels_mm.clear();
        for (const Json& j : doc["jitter_levels_mm"]) {
            cfg.jitter_levels_mm.push_back(j.get<double>());
        }
    }
    if (doc.contains("jitter_distribution")) {
        const std::string kind = doc["jitter_distribution"].get<std::string>();
        if (kind == "uniform") {
            cfg.jitter = JitterKind::Uniform;
        } else if (kind == "gaussian") {
            cfg.jitter = JitterKind::Gaussian;
        } else {
            throw ValidationError(
                "config field 'jitter_distribution' must be 'uniform' or 'gaussian'");
        }
    }
    if (doc.contains("twist_range_deg")) {
        const Json& r = doc["twist_range_deg"];
        if (!r.is_array() || r.size() != 2) {
            throw ValidationError("config field 'twist_range_deg' must be [lo, hi]");
        }
        cfg.twist_min_rad = r[0].get<double>() * kDegToRad;
        cfg.twist_max_rad = r[1].get<double>() * kDegToRad;
    }
    cfg.swing_max_rad = config_number(doc, "swing_max_deg", 60.0) * kDegToRad;
    if (doc.contains("beta")) {
        const Json& b = doc["beta"];
        if (!b.is_array() || b.size() != ShapeCoeffs::kCount) {
            throw ValidationError("config field 'beta' must hold 10 numbers");
        }
        for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
            cfg.beta.beta[i] = b[i].get<double>();
        }
    }
    if (doc.contains("eval_regressor")) {
        cfg.eval_regressor = doc["eval_regressor"].get<std::string>();
    }
    cfg.chain_depth = static_cast<int>(config_number(doc, "chain_depth", 5));
    cfg.eps_mm = config_number(doc, "eps_mm", 10.0);
    cfg.bin_width_deg = config_number(doc, "bin_width_deg", 5.0);
    cfg.threads = static_cast<int>(config_number(doc, "threads", 1));
    if (args.threads > 0) {
        cfg.threads = args.threads;
    }
    cfg.validate();

    if (doc.contains("model") && !doc["model"].get<std::string>().empty()) {
        setup.model_label = doc["model"].get<std::string>();
        setup.model = load_model(setup.model_label);
    } else {
        setup.model_label = "builtin:toy_biped";
        setup.model = toy_biped();
    }
    return setup;
}

Json config_echo(const ExperimentConfig& cfg) {
    Json out;
    out["seed"] = cfg.seed;
    out["trials"] = cfg.trials;
    out["jitter_levels_mm"] = cfg.jitter_levels_mm;
    out["jitter_distribution"] = cfg.jitter == JitterKind::Uniform ? "uniform" : "gaussian";
    out["twist_range_deg"] =
        Json::array({round_sig(cfg.twist_min_rad / kDegToRad), round_sig(cfg.twist_max_rad / kDegToRad)});
    out["swing_max_deg"] = round_sig(cfg.swing_max_rad / kDegToRad);
    out["beta"] = cfg.beta.beta;
    out["eval_regressor"] = cfg.eval_regressor;
    out["chain_depth"] = cfg.chain_depth;
    out["eps_mm"] = cfg.eps_mm;
    out["bin_width_deg"] = cfg.bin_width_deg;
    out["threads"] = cfg.threads;
    return out;
}

void write_manifest(const BenchArgs& args, const BenchSetup& setup,
                    const std::vector<std::string>& outputs) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["library_version"] = kVersion;
    doc["subcommand"] = args.subcommand;
    doc["model"] = setup.model_label;
    doc["config"] = config_echo(setup.config);
    doc["outputs"] = outputs;
    Json notes;
    notes["jitter_model"] = setup.config.jitter == JitterKind::Uniform
                                ? "independent uniform per-coordinate in [-j, +j] mm"
                                : "independent gaussian per-coordinate with sigma = j mm";
    notes["mpjpe_alignment"] = "root translation";
    notes["jitter_mpjpe_reference"] =
        "reconstruction vs the jittered solver input; vs-clean means in extra columns";
    notes["twist_convention"] = "right-handed about the parent-to-child bone direction";
    doc["notes"] = std::move(notes);

    std::ofstream out(fs::path(args.out_dir) / "manifest.json");
    out << doc.dump(1) << '\n';
}

void run_bench(const BenchArgs& args) {
    const BenchSetup setup = load_bench_setup(args);
    fs::create_directories(args.out_dir);
    const auto csv_path = [&](const std::string& name) { return fs::path(args.out_dir) / name; };

    std::vector<std::string> outputs;
    if (args.subcommand == "jitter") {
        const JitterResult result = jitter_experiment(setup.model, setup.config);
        std::ofstream csv(csv_path("jitter.csv"));
        csv << "jitter_mm,trials,naive_mean_mpjpe_mm,adaptive_mean_mpjpe_mm,"
               "adaptive_win_fraction,naive_over_adaptive_ratio,"
               "naive_mean_vs_clean_mm,adaptive_mean_vs_clean_mm\n";
        for (const JitterRow& row : result.rows) {
            const double wins = static_cast<double>(row.adaptive_wins) / result.trials;
            const double ratio = row.adaptive_mean_mpjpe > 0.0
                                     ? row.naive_mean_mpjpe / row.adaptive_mean_mpjpe
                                     : 1.0;
            csv << num(row.jitter_mm) << ',' << result.trials << ','
                << num(row.naive_mean_mpjpe) << ',' << num(row.adaptive_mean_mpjpe) << ','
                << num(wins) << ',' << num(ratio) << ',' << num(row.naive_mean_vs_clean)
                << ',' << num(row.adaptive_mean_vs_clean) << '\n';
        }
        outputs.push_back("jitter.csv");
    } else if (args.subcommand == "twist") {
        const TwistSensitivityResult result =
            twist_sensitivity_experiment(setup.model, setup.config);
        std::ofstream csv(csv_path("twist_sensitivity.csv"));
        csv << "twist_source,trials,fk_joint_err_mm,regressed_joint_err_mm,vertex_err_mm,"
               "twist_angle_err_deg\n";
        for (const TwistSensitivityRow& row : result.rows) {
            csv << row.source << ',' << result.trials << ',' << num(row.fk_joint_err_mm) << ','
                << num(row.regressed_joint_err_mm) << ',' << num(row.vertex_err_mm) << ','
                << num(row.twist_err_deg) << '\n';
        }
        outputs.push_back("twist_sensitivity.csv");
    } else if (args.subcommand == "accumulation") {
        const AccumulationResult result =
            accumulation_check(setup.config.chain_depth, setup.config.eps_mm);
        std::ofstream csv(csv_path("accumulation.csv"));
        csv << "joint,naive_measured_mm,naive_predicted_mm,adaptive_measured_mm,"
               "adaptive_predicted_mm,adaptive_step_error_mm\n";
        for (std::size_t i = 0; i < result.naive_measured.size(); ++i) {
            csv << "joint_" << (i + 1) << ',' << num(result.naive_measured[i]) << ','
                << num(result.naive_predicted[i]) << ',' << num(result.adaptive_measured[i])
                << ',' << num(result.adaptive_predicted[i]) << ','
                << num(result.adaptive_step_error[i]) << '\n';
        }
        outputs.push_back("accumulation.csv");
    } else if (args.subcommand == "distribution") {
        std::vector<RotationSet> poses;
        poses.reserve(setup.config.trials);
        for (int t = 0; t < setup.config.trials; ++t) {
            poses.push_back(gen_random_pose(setup.model, setup.config.beta,
                                            derive_seed(setup.config.seed, 5, t),
                                            setup.config.twist_min_rad,
                                            setup.config.twist_max_rad,
                                            setup.config.swing_max_rad)
                                .rotations);
        }
        const TwistHistogram hist =
            twist_distribution(poses, setup.model, setup.config.bin_width_deg);
        std::ofstream csv(csv_path("twist_distribution.csv"));
        csv << "joint,bin_lo_deg,bin_hi_deg,count\n";
        for (std::size_t j = 0; j < hist.joints.size(); ++j) {
            for (int b = 0; b < hist.bin_count(); ++b) {
                if (hist.counts[j][b] == 0) {
                    continue;
                }
                csv << hist.joints[j] << ',' << num(hist.bin_lo_deg(b)) << ','
                    << num(hist.bin_lo_deg(b) + hist.bin_width_deg) << ',' << hist.counts[j][b]
                    << '\n';
            }
        }
        std::ofstream summary(csv_path("twist_distribution_summary.csv"));
        summary << "joint,samples,min_deg,max_deg\n";
        for (std::size_t j = 0; j < hist.joints.size(); ++j) {
            summary << hist.joints[j] << ',' << hist.samples[j] << ',' << num(hist.min_deg[j])
                    << ',' << num(hist.max_deg[j]) << '\n';
        }
        outputs.push_back("twist_distribution.csv");
        outputs.push_back("twist_distribution_summary.csv");
    } else {
        throw ValidationError("unknown bench subcommand '" + args.subcommand + "'");
    }
    write_manifest(args, setup, outputs);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twist-and-swing inverse kinematics toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs fk_args;
    CLI::App* cmd_fk = app.add_subcommand("fk", "forward kinematics: rotations + beta -> joints");
    add_common(cmd_fk, fk_args);

    CommonArgs solve_args;
    std::string mode = "adaptive";
    CLI::App* cmd_solve =
        app.add_subcommand("solve", "inverse kinematics: joints + twists + beta -> rotations");
    add_common(cmd_solve, solve_args);
    cmd_solve->add_option("--mode", mode, "naive or adaptive")
        ->check(CLI::IsMember({"naive", "adaptive"}))
        ->capture_default_str();

    CommonArgs skin_args;
    CLI::App* cmd_skin =
        app.add_subcommand("skin", "linear blend skinning: rotations + beta -> mesh");
    add_common(cmd_skin, skin_args);

    BenchArgs bench_args;
    CLI::App* cmd_bench = app.add_subcommand("bench", "experiment drivers (CSV + manifest)");
    cmd_bench
        ->add_option("subcommand", bench_args.subcommand,
                     "one of: jitter, twist, accumulation, distribution")
        ->required()
        ->check(CLI::IsMember({"jitter", "twist", "accumulation", "distribution"}));
    cmd_bench->add_option("--config", bench_args.config_path, "experiment config (JSON)")
        ->required();
    cmd_bench->add_option("--out-dir", bench_args.out_dir, "output directory")->required();
    cmd_bench->add_option("--threads", bench_args.threads,
                          "trial-level parallelism (overrides the config; output is "
                          "independent of this)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << R"({"error":"ParseError","message":")" << e.what() << "\"}\n";
        return 2;
    }

    try {
        if (cmd_fk->parsed()) {
            run_fk(fk_args);
        } else if (cmd_solve->parsed()) {
            run_solve(solve_args, mode);
        } else if (cmd_skin->parsed()) {
            run_skin(skin_args);
        } else if (cmd_bench->parsed()) {
            run_bench(bench_args);
        }
    } catch (const Error& e) {
        Json err;
        err["error"] = e.tag();
        err["message"] = e.what();
        std::cerr << err.dump() << '\n';
        return dynamic_cast<const DegeneracyError*>(&e) != nullptr ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << R"({"error":"InternalError","message":")" << e.what() << "\"}\n";
        return 1;
    }
    return 0;
}
