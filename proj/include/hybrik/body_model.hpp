#pragma once

#include <array>
#include <map>
#include <string>

#include "hybrik/kinematics.hpp"

namespace hybrik {

/// PCA shape coordinates, dimensionless. Entries beyond +-5 are outside the
/// plausible range and draw a loader warning.
struct ShapeCoeffs {
    static constexpr int kCount = 10;
    std::array<double, kCount> beta{};
};

/// Articulated body model: mean mesh, linear shape blend basis, joint
/// regressor, skinning weights and the kinematic tree. All lengths in mm.
struct BodyModel {
    KinematicTree tree;
    Eigen::MatrixX3d mean_vertices;                          // N x 3
    std::array<Eigen::MatrixX3d, ShapeCoeffs::kCount> shape_basis;  // each N x 3
    Eigen::MatrixXd joint_regressor;                         // K x N, convex rows
    Eigen::MatrixXd skin_weights;                            // N x K, convex rows
    std::map<std::string, Eigen::MatrixXd> eval_regressors;  // J x N, convex rows

    int joint_count() const { return tree.joint_count(); }
    int vertex_count() const { return static_cast<int>(mean_vertices.rows()); }

    /// Checks dimensional consistency and the convex-row invariants; throws
    /// DimensionMismatch / ValidationError.
    void validate() const;
};

struct PosedMesh {
    Eigen::MatrixX3d vertices;  // N x 3, mm
};

/// Per-vertex shape offsets: sum of beta[i] * shape_basis[i].
Eigen::MatrixX3d shape_offsets(const BodyModel& model, const ShapeCoeffs& beta);

/// Rest-pose skeleton regressed from the shaped mesh: joint_regressor *
/// (mean_vertices + shape_offsets(beta)).
JointSet rest_pose_from_shape(const BodyModel& model, const ShapeCoeffs& beta);

/// Linear blend skinning of the shaped mesh under the given pose. A vertex
/// fully bound to joint k moves rigidly with bone k.
PosedMesh skin(const BodyModel& model, const ShapeCoeffs& beta, const RotationSet& rotations);

/// joints = regressor * vertices.
JointSet regress_joints(const Eigen::MatrixXd& regressor, const PosedMesh& mesh);

/// Bundled synthetic 24-joint biped (~500 vertices, hand-authored weights).
/// Stands in for license-restricted body-model assets; data/toy_biped.json is
/// this model serialized.
BodyModel toy_biped();

}  // namespace hybrik
