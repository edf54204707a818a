#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "hybrik/io.hpp"
#include "hybrik/rng.hpp"
#include "hybrik/solver.hpp"
#include "hybrik/harness.hpp"

using namespace hybrik;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_data;
fs::path g_work;

struct RunResult {
    int exit_code = -1;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::vector<std::string>& args) {
    const fs::path err_file = g_work / "stderr.txt";
    std::string cmd = g_cli;
    for (const std::string& a : args) {
        cmd += ' ';
        cmd += a;
    }
    cmd += " >" + (g_work / "stdout.txt").string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_file);
    return r;
}

Json parse_file(const fs::path& p) {
    std::ifstream in(p);
    return Json::parse(in);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

fs::path model_path() { return g_data / "toy_biped.json"; }

PoseFile rotations_pose(const RotationSet& rot) {
    PoseFile pose;
    std::vector<Mat3> mats;
    for (const Rotation& r : rot.relative) {
        mats.push_back(r.matrix());
    }
    pose.rotations = mats;
    pose.beta = std::array<double, 10>{};
    return pose;
}

}  // namespace

TEST_CASE("fk: identity pose lands on the rest pose, output deterministic") {
    const BodyModel model = load_model(model_path());
    RotationSet identity;
    identity.relative.assign(model.joint_count(), Rotation::identity());
    const fs::path pose_path = g_work / "identity_pose.json";
    save_pose(rotations_pose(identity), pose_path);

    const fs::path out = g_work / "fk_identity.json";
    const RunResult r = run_cli({"fk", "--model", model_path().string(), "--pose",
                                 pose_path.string(), "--out", out.string(),
                                 "--full-precision"});
    REQUIRE(r.exit_code == 0);

    const PoseFile result = load_pose(out);
    REQUIRE(result.joints.has_value());
    const JointSet rest = rest_pose_from_shape(model, ShapeCoeffs{});
    for (int k = 0; k < model.joint_count(); ++k) {
        CHECK(((*result.joints)[k] - rest.positions[k]).norm() < 1e-9);
    }

    const fs::path out2 = g_work / "fk_identity_2.json";
    run_cli({"fk", "--model", model_path().string(), "--pose", pose_path.string(), "--out",
             out2.string(), "--full-precision"});
    CHECK(slurp(out) == slurp(out2));  // byte-identical
}

TEST_CASE("fk then solve reproduces the pose through files") {
    const BodyModel model = load_model(model_path());
    const GeneratedPose pose = gen_random_pose(model, ShapeCoeffs{}, 2024, -2.5, 2.5, 1.0);

    // At full precision the pipeline is exact to 1e-6 mm; the 9-digit default
    // quantizes ~1000 mm coordinates at 1e-5 steps, which the naive mode
    // accumulates to a few 1e-6 mm.
    const struct {
        const char* flag;
        double bound;
    } precision[] = {{"--full-precision", 1e-6}, {"", 5e-6}};

    for (const auto& [flag, bound] : precision) {
        std::vector<std::string> fk_args = {"fk", "--model", model_path().string()};
        const fs::path fk_in = g_work / "fk_in.json";
        save_pose(rotations_pose(pose.rotations), fk_in, *flag != '\0');
        const fs::path fk_out = g_work / "fk_out.json";
        fk_args.insert(fk_args.end(),
                       {"--pose", fk_in.string(), "--out", fk_out.string()});
        if (*flag) {
            fk_args.push_back(flag);
        }
        REQUIRE(run_cli(fk_args).exit_code == 0);

        PoseFile solve_in = load_pose(fk_out);
        std::vector<std::array<double, 2>> twists;
        for (const TwistAngle& t : pose.twists) {
            twists.push_back({t.cosine(), t.sine()});
        }
        solve_in.twists = twists;
        solve_in.beta = std::array<double, 10>{};
        const fs::path solve_path = g_work / "solve_in.json";
        save_pose(solve_in, solve_path, *flag != '\0');

        for (const char* mode : {"naive", "adaptive"}) {
            const fs::path out = g_work / (std::string("solve_out_") + mode + ".json");
            REQUIRE(run_cli({"solve", "--model", model_path().string(), "--pose",
                             solve_path.string(), "--mode", mode, "--out", out.string(),
                             "--full-precision"})
                        .exit_code == 0);
            const Json doc = parse_file(out);
            for (const Json& e : doc["per_joint_error"]) {
                CHECK(e.get<double>() < bound);
            }
            for (std::size_t k = 0; k < pose.target.positions.size(); ++k) {
                const Vec3 got(doc["joints"][k][0].get<double>(),
                               doc["joints"][k][1].get<double>(),
                               doc["joints"][k][2].get<double>());
                CHECK((got - pose.target.positions[k]).norm() < bound);
            }
        }
    }
}

TEST_CASE("solve: adaptive error stays below naive on jittered inputs") {
    const BodyModel model = load_model(model_path());
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        const GeneratedPose pose = gen_random_pose(model, ShapeCoeffs{}, seed, -2.5, 2.5, 1.0);
        Rng noise(seed * 97);
        PoseFile in;
        std::vector<Vec3> joints = pose.target.positions;
        for (Vec3& p : joints) {
            p += noise.uniform_box(20.0);
        }
        in.joints = joints;
        std::vector<std::array<double, 2>> twists;
        for (const TwistAngle& t : pose.twists) {
            twists.push_back({t.cosine(), t.sine()});
        }
        in.twists = twists;
        in.beta = std::array<double, 10>{};
        const fs::path in_path = g_work / "jittered_pose.json";
        save_pose(in, in_path);

        double mean[2] = {0, 0};
        int i = 0;
        for (const char* mode : {"naive", "adaptive"}) {
            const fs::path out = g_work / "jittered_solve.json";
            REQUIRE(run_cli({"solve", "--model", model_path().string(), "--pose",
                             in_path.string(), "--mode", mode, "--out", out.string()})
                        .exit_code == 0);
            const Json doc = parse_file(out);
            for (const Json& e : doc["per_joint_error"]) {
                mean[i] += e.get<double>();
            }
            ++i;
        }
        CHECK(mean[1] < mean[0]);
    }
}

TEST_CASE("skin matches the library bit for bit at full precision") {
    const BodyModel model = load_model(model_path());
    const GeneratedPose pose = gen_random_pose(model, ShapeCoeffs{}, 555, -2.0, 2.0, 0.9);
    PoseFile in = rotations_pose(pose.rotations);
    const fs::path in_path = g_work / "skin_pose.json";
    save_pose(in, in_path, /*full_precision=*/true);

    const fs::path out = g_work / "skin_out.json";
    REQUIRE(run_cli({"skin", "--model", model_path().string(), "--pose", in_path.string(),
                     "--out", out.string(), "--full-precision"})
                .exit_code == 0);

    const PosedMesh expected = skin(model, ShapeCoeffs{}, pose.rotations);
    const Json doc = parse_file(out);
    REQUIRE(doc["vertices"].size() == static_cast<std::size_t>(model.vertex_count()));
    for (int v = 0; v < model.vertex_count(); ++v) {
        for (int c = 0; c < 3; ++c) {
            CHECK(doc["vertices"][v][c].get<double>() == expected.vertices(v, c));
        }
    }
}

TEST_CASE("error paths use machine-readable classes and exit codes") {
    SUBCASE("malformed pose file: exit 2, ParseError") {
        const fs::path bad = g_work / "bad.json";
        std::ofstream(bad) << "{ nope";
        const RunResult r = run_cli({"fk", "--model", model_path().string(), "--pose",
                                     bad.string(), "--out", (g_work / "x.json").string()});
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("ParseError") != std::string::npos);
    }

    SUBCASE("missing twists: exit 2 naming the field") {
        PoseFile in;
        in.joints = std::vector<Vec3>(24, Vec3(0, 0, 0));
        in.beta = std::array<double, 10>{};
        const fs::path p = g_work / "no_twists.json";
        save_pose(in, p);
        const RunResult r = run_cli({"solve", "--model", model_path().string(), "--pose",
                                     p.string(), "--out", (g_work / "x.json").string()});
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("twists") != std::string::npos);
    }

    SUBCASE("degenerate twist pair: exit 3") {
        const BodyModel model = load_model(model_path());
        PoseFile in;
        in.joints = rest_pose_from_shape(model, ShapeCoeffs{}).positions;
        in.twists = std::vector<std::array<double, 2>>(23, {0.1, 0.1});
        in.beta = std::array<double, 10>{};
        const fs::path p = g_work / "degenerate_twists.json";
        save_pose(in, p);
        const RunResult r = run_cli({"solve", "--model", model_path().string(), "--pose",
                                     p.string(), "--out", (g_work / "x.json").string()});
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("DegeneratePair") != std::string::npos);
    }

    SUBCASE("unknown flag: exit 2") {
        CHECK(run_cli({"fk", "--bogus"}).exit_code == 2);
    }

    SUBCASE("bad config field named in the message") {
        const fs::path cfg = g_work / "bad_config.json";
        std::ofstream(cfg) << R"({"trials": 0})";
        const RunResult r = run_cli({"bench", "jitter", "--config", cfg.string(), "--out-dir",
                                     (g_work / "bench_bad").string()});
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("trials") != std::string::npos);
    }
}

TEST_CASE("bench accumulation emits measured and predicted rows") {
    const fs::path cfg = g_work / "acc_config.json";
    std::ofstream(cfg) << R"({"chain_depth": 5, "eps_mm": 10})";
    const fs::path dir = g_work / "bench_acc";
    REQUIRE(run_cli({"bench", "accumulation", "--config", cfg.string(), "--out-dir",
                     dir.string()})
                .exit_code == 0);

    const auto rows = read_csv(dir / "accumulation.csv");
    REQUIRE(rows.size() == 5);  // header + 4 joints
    // columns: joint, naive_measured, naive_predicted, adaptive_measured,
    //          adaptive_predicted, adaptive_step_error
    for (int i = 1; i <= 4; ++i) {
        CHECK(std::stod(rows[i][1]) == doctest::Approx(10.0 * i).epsilon(1e-9));
        CHECK(std::stod(rows[i][2]) == doctest::Approx(10.0 * i).epsilon(1e-9));
        CHECK(std::stod(rows[i][4]) == doctest::Approx(10.0).epsilon(1e-9));
    }
    const Json manifest = parse_file(dir / "manifest.json");
    CHECK(manifest["subcommand"] == "accumulation");
    CHECK(manifest["config"]["chain_depth"] == 5);
}

TEST_CASE("bench jitter: clean level is exact, outputs are deterministic") {
    const fs::path cfg = g_work / "jitter_config.json";
    std::ofstream(cfg)
        << R"({"seed": 3, "trials": 12, "jitter_levels_mm": [0, 20], "swing_max_deg": 50})";

    const fs::path dir1 = g_work / "bench_jitter_1";
    const fs::path dir2 = g_work / "bench_jitter_2";
    REQUIRE(run_cli({"bench", "jitter", "--config", cfg.string(), "--out-dir", dir1.string()})
                .exit_code == 0);
    REQUIRE(run_cli({"bench", "jitter", "--config", cfg.string(), "--out-dir", dir2.string(),
                     "--threads", "4"})
                .exit_code == 0);

    // byte-identical across runs and thread counts (threads do not reach the manifest)
    CHECK(slurp(dir1 / "jitter.csv") == slurp(dir2 / "jitter.csv"));

    const auto rows = read_csv(dir1 / "jitter.csv");
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][2]) < 1e-6);  // naive mean at j=0
    CHECK(std::stod(rows[1][3]) < 1e-6);  // adaptive mean at j=0
    CHECK(std::stod(rows[2][3]) < std::stod(rows[2][2]));  // adaptive < naive at 20 mm
}

TEST_CASE("bench distribution: zero ranges give single-bin histograms") {
    const fs::path cfg = g_work / "dist_config.json";
    std::ofstream(cfg) << R"({"trials": 4, "twist_range_deg": [0, 0], "swing_max_deg": 0})";
    const fs::path dir = g_work / "bench_dist";
    REQUIRE(run_cli({"bench", "distribution", "--config", cfg.string(), "--out-dir",
                     dir.string()})
                .exit_code == 0);

    const auto rows = read_csv(dir / "twist_distribution.csv");
    REQUIRE(rows.size() == 24);  // header + one nonzero bin per non-root joint
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) <= 0.0);
        CHECK(std::stod(rows[i][2]) >= 0.0);
        CHECK(rows[i][3] == "4");
    }
    const auto summary = read_csv(dir / "twist_distribution_summary.csv");
    REQUIRE(summary.size() == 24);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        CHECK(std::stod(summary[i][2]) == 0.0);
        CHECK(std::stod(summary[i][3]) == 0.0);
    }
}

TEST_CASE("bench twist sensitivity mirrors the library experiment") {
    const fs::path cfg = g_work / "twist_config.json";
    std::ofstream(cfg) << R"({"seed": 9, "trials": 8})";
    const fs::path dir = g_work / "bench_twist";
    REQUIRE(run_cli({"bench", "twist", "--config", cfg.string(), "--out-dir", dir.string()})
                .exit_code == 0);

    const auto rows = read_csv(dir / "twist_sensitivity.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "ground_truth");
    CHECK(rows[2][0] == "random");
    CHECK(std::stod(rows[1][2]) < 1e-6);                       // fk error, gt twists
    CHECK(std::stod(rows[2][2]) < 1e-6);                       // fk error, random twists
    CHECK(std::stod(rows[2][4]) > std::stod(rows[1][4]));      // vertex error ordering
    CHECK(std::stod(rows[2][5]) > std::stod(rows[1][5]) + 10);  // twist angle error
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli <hybrik-binary> <data-dir> [doctest args]\n");
        return 1;
    }
    g_cli = argv[1];
    g_data = argv[2];
    g_work = fs::temp_directory_path() / "hybrik_cli_tests";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    doctest::Context context;
    context.applyCommandLine(argc - 2, argv + 2);
    return context.run();
}
