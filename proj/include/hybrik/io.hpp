#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "hybrik/body_model.hpp"
#include "hybrik/solver.hpp"

namespace hybrik {

/// All files carry "format_version"; loaders reject unknown versions.
inline constexpr int kFormatVersion = 1;

/// Default numeric precision of emitted files: decimal text with 9
/// significant digits. --full-precision switches to the shortest
/// round-trippable form.
double round_sig(double value, int digits = 9);

using Json = nlohmann::ordered_json;

Json positions_to_json(const std::vector<Vec3>& positions, bool full_precision);
Json matrix_rowmajor_to_json(const Mat3& m, bool full_precision);

/// On-disk pose document. At least one of joints/rotations must be present.
/// Lengths are millimeters; rotations are row-major 3x3 relative matrices;
/// twists are (cos, sin) pairs for the non-root joints.
struct PoseFile {
    std::optional<std::vector<Vec3>> joints;
    std::optional<std::vector<Mat3>> rotations;
    std::optional<std::vector<std::array<double, 2>>> twists;
    std::optional<std::array<double, ShapeCoeffs::kCount>> beta;
};

PoseFile load_pose(const std::filesystem::path& path);
void save_pose(const PoseFile& pose, const std::filesystem::path& path, bool full_precision = false);

BodyModel load_model(const std::filesystem::path& path);
void save_model(const BodyModel& model, const std::filesystem::path& path,
                bool full_precision = false);

void save_mesh(const PosedMesh& mesh, const std::filesystem::path& path,
               bool full_precision = false);

/// PoseFile field helpers used by the CLI; they throw ParseError naming the
/// missing field.
std::vector<Vec3> require_joints(const PoseFile& pose);
RotationSet require_rotations(const PoseFile& pose);
TwistSet require_twists(const PoseFile& pose);
ShapeCoeffs require_beta(const PoseFile& pose);

}  // namespace hybrik
