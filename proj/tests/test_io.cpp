#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hybrik/io.hpp"
#include "test_util.hpp"

using namespace hybrik;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "hybrik_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("round_sig keeps 9 significant digits") {
    CHECK(round_sig(1234.56789123) == doctest::Approx(1234.56789).epsilon(1e-12));
    CHECK(round_sig(-0.000123456789123) == doctest::Approx(-0.000123456789).epsilon(1e-12));
    CHECK(round_sig(0.0) == 0.0);
}

TEST_CASE("model save/load round trip") {
    const BodyModel model = toy_biped();

    SUBCASE("full precision is exact") {
        const fs::path path = temp_file("model_full.json");
        save_model(model, path, /*full_precision=*/true);
        const BodyModel loaded = load_model(path);
        CHECK(loaded.tree.names() == model.tree.names());
        CHECK(loaded.tree.parents() == model.tree.parents());
        CHECK((loaded.mean_vertices - model.mean_vertices).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
            CHECK((loaded.shape_basis[i] - model.shape_basis[i]).cwiseAbs().maxCoeff() == 0.0);
        }
        CHECK((loaded.joint_regressor - model.joint_regressor).cwiseAbs().maxCoeff() == 0.0);
        CHECK((loaded.skin_weights - model.skin_weights).cwiseAbs().maxCoeff() == 0.0);
        CHECK((loaded.eval_regressors.at("lsp14") - model.eval_regressors.at("lsp14"))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }

    SUBCASE("default precision is within 9 significant digits") {
        const fs::path path = temp_file("model_default.json");
        save_model(model, path);
        const BodyModel loaded = load_model(path);
        CHECK((loaded.mean_vertices - model.mean_vertices).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("the shipped model file matches the builtin") {
    const fs::path shipped = fs::path(HYBRIK_DATA_DIR) / "toy_biped.json";
    REQUIRE(fs::exists(shipped));
    const BodyModel loaded = load_model(shipped);
    const BodyModel builtin = toy_biped();
    CHECK(loaded.tree.names() == builtin.tree.names());
    CHECK((loaded.mean_vertices - builtin.mean_vertices).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((loaded.skin_weights - builtin.skin_weights).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pose save/load round trip") {
    Rng rng(1101);
    PoseFile pose;
    std::vector<Vec3> joints;
    std::vector<Mat3> rotations;
    std::vector<std::array<double, 2>> twists;
    for (int k = 0; k < 24; ++k) {
        joints.push_back(rng.uniform_box(800.0));
        rotations.push_back(rng.rotation().matrix());
    }
    for (int k = 0; k < 23; ++k) {
        const TwistAngle t = TwistAngle::from_angle(rng.uniform(-3.0, 3.0));
        twists.push_back({t.cosine(), t.sine()});
    }
    pose.joints = joints;
    pose.rotations = rotations;
    pose.twists = twists;
    pose.beta = std::array<double, 10>{0.1, -0.2, 0.3, 0, 0, 1.5, 0, 0, -2.0, 0.5};

    const fs::path path = temp_file("pose.json");
    save_pose(pose, path, /*full_precision=*/true);
    const PoseFile loaded = load_pose(path);

    REQUIRE(loaded.joints.has_value());
    REQUIRE(loaded.rotations.has_value());
    REQUIRE(loaded.twists.has_value());
    REQUIRE(loaded.beta.has_value());
    for (int k = 0; k < 24; ++k) {
        CHECK(((*loaded.joints)[k] - joints[k]).norm() == 0.0);
        CHECK(((*loaded.rotations)[k] - rotations[k]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(*loaded.beta == *pose.beta);

    // the helpers validate on access
    CHECK(require_rotations(loaded).relative.size() == 24);
    CHECK(require_twists(loaded).size() == 23);
    CHECK(require_beta(loaded).beta[5] == 1.5);
}

TEST_CASE("pose file validation errors") {
    const fs::path path = temp_file("bad_pose.json");

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_pose(temp_file("does_not_exist.json")), ParseError);
    }

    SUBCASE("malformed json") {
        write_text(path, "{ not json");
        CHECK_THROWS_AS(load_pose(path), ParseError);
    }

    SUBCASE("missing format_version") {
        write_text(path, R"({"joints": [[0,0,0]]})");
        CHECK_THROWS_WITH_AS(load_pose(path), doctest::Contains("format_version"), ParseError);
    }

    SUBCASE("unknown format_version") {
        write_text(path, R"({"format_version": 2, "joints": [[0,0,0]]})");
        CHECK_THROWS_AS(load_pose(path), ParseError);
    }

    SUBCASE("neither joints nor rotations") {
        write_text(path, R"({"format_version": 1, "beta": [0,0,0,0,0,0,0,0,0,0]})");
        CHECK_THROWS_WITH_AS(load_pose(path), doctest::Contains("joints"), ParseError);
    }

    SUBCASE("ragged joints") {
        write_text(path, R"({"format_version": 1, "joints": [[0,0]]})");
        CHECK_THROWS_AS(load_pose(path), ParseError);
    }

    SUBCASE("wrong beta length") {
        write_text(path, R"({"format_version": 1, "joints": [[0,0,0]], "beta": [1,2,3]})");
        CHECK_THROWS_WITH_AS(load_pose(path), doctest::Contains("beta"), ParseError);
    }

    SUBCASE("non-orthonormal rotation is rejected on access") {
        write_text(path,
                   R"({"format_version": 1, "rotations": [[2,0,0, 0,1,0, 0,0,1]]})");
        const PoseFile pose = load_pose(path);
        CHECK_THROWS_AS(require_rotations(pose), InvalidRotation);
    }

    SUBCASE("degenerate twist pair is rejected on access") {
        write_text(path,
                   R"({"format_version": 1, "joints": [[0,0,0]], "twists": [[0.1, 0.1]]})");
        const PoseFile pose = load_pose(path);
        CHECK_THROWS_AS(require_twists(pose), DegeneratePair);
    }

    SUBCASE("missing fields named by the accessors") {
        write_text(path, R"({"format_version": 1, "joints": [[0,0,0]]})");
        const PoseFile pose = load_pose(path);
        CHECK_THROWS_WITH_AS(require_twists(pose), doctest::Contains("twists"), ParseError);
        CHECK_THROWS_WITH_AS(require_beta(pose), doctest::Contains("beta"), ParseError);
        CHECK_THROWS_WITH_AS(require_rotations(pose), doctest::Contains("rotations"),
                             ParseError);
    }
}

TEST_CASE("model file validation errors") {
    const fs::path path = temp_file("bad_model.json");

    SUBCASE("missing field") {
        write_text(path, R"({"format_version": 1, "names": ["root"], "parents": [-1]})");
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("mean_vertices"), ParseError);
    }

    SUBCASE("shape basis dims mismatch") {
        const BodyModel model = toy_biped();
        save_model(model, path);
        Json doc;
        {
            std::ifstream in(path);
            doc = Json::parse(in);
        }
        doc["shape_basis"]["dims"][0] = 3;
        write_text(path, doc.dump());
        CHECK_THROWS_AS(load_model(path), DimensionMismatch);
    }
}

TEST_CASE("mesh export") {
    PosedMesh mesh;
    mesh.vertices.resize(2, 3);
    mesh.vertices << 1.23456789123, 2, 3, -4, 5.5, 6.25;
    const fs::path path = temp_file("mesh.json");
    save_mesh(mesh, path);

    std::ifstream in(path);
    const Json doc = Json::parse(in);
    CHECK(doc["format_version"] == 1);
    CHECK(doc["vertices"].size() == 2);
    CHECK(doc["vertices"][0][0].get<double>() == doctest::Approx(1.23456789).epsilon(1e-10));
}
