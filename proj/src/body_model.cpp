#include "hybrik/body_model.hpp"

#include <cmath>

namespace hybrik {

namespace {

void check_convex_rows(const Eigen::MatrixXd& m, const std::string& what) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if ((m.row(r).array() < 0.0).any()) {
            throw ValidationError(what + " row " + std::to_string(r) + " has negative entries");
        }
        const double sum = m.row(r).sum();
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ValidationError(what + " row " + std::to_string(r) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
        }
    }
}

}  // namespace

void BodyModel::validate() const {
    const int k = joint_count();
    const int n = vertex_count();
    if (k == 0) {
        throw ValidationError("model has an empty kinematic tree");
    }
    if (n < k) {
        throw DimensionMismatch("model has fewer vertices (" + std::to_string(n) +
                                ") than joints (" + std::to_string(k) + ")");
    }
    for (std::size_t i = 0; i < shape_basis.size(); ++i) {
        if (shape_basis[i].rows() != n) {
            throw DimensionMismatch("shape basis component " + std::to_string(i) + " has " +
                                    std::to_string(shape_basis[i].rows()) + " rows, expected " +
                                    std::to_string(n));
        }
    }
    if (joint_regressor.rows() != k || joint_regressor.cols() != n) {
        throw DimensionMismatch("joint regressor is " + std::to_string(joint_regressor.rows()) +
                                "x" + std::to_string(joint_regressor.cols()) + ", expected " +
                                std::to_string(k) + "x" + std::to_string(n));
    }
    if (skin_weights.rows() != n || skin_weights.cols() != k) {
        throw DimensionMismatch("skin weights are " + std::to_string(skin_weights.rows()) + "x" +
                                std::to_string(skin_weights.cols()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(k));
    }
    check_convex_rows(joint_regressor, "joint regressor");
    check_convex_rows(skin_weights, "skin weights");
    for (const auto& [name, reg] : eval_regressors) {
        if (reg.cols() != n) {
            throw DimensionMismatch("eval regressor '" + name + "' has " +
                                    std::to_string(reg.cols()) + " columns, expected " +
                                    std::to_string(n));
        }
        check_convex_rows(reg, "eval regressor '" + name + "'");
    }
    if (!mean_vertices.allFinite()) {
        throw ValidationError("mean vertices contain non-finite values");
    }
}

Eigen::MatrixX3d shape_offsets(const BodyModel& model, const ShapeCoeffs& beta) {
    Eigen::MatrixX3d off = Eigen::MatrixX3d::Zero(model.vertex_count(), 3);
    for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
        if (beta.beta[i] != 0.0) {
            off += beta.beta[i] * model.shape_basis[i];
        }
    }
    return off;
}

JointSet rest_pose_from_shape(const BodyModel& model, const ShapeCoeffs& beta) {
    const Eigen::MatrixX3d shaped = model.mean_vertices + shape_offsets(model, beta);
    const Eigen::MatrixX3d joints = model.joint_regressor * shaped;
    JointSet out;
    out.tag = JointTag::Template;
    out.positions.reserve(model.joint_count());
    for (Eigen::Index r = 0; r < joints.rows(); ++r) {
        out.positions.emplace_back(joints.row(r).transpose());
    }
    return out;
}

PosedMesh skin(const BodyModel& model, const ShapeCoeffs& beta, const RotationSet& rotations) {
    if (static_cast<int>(rotations.relative.size()) != model.joint_count()) {
        throw DimensionMismatch("rotation set does not match the model joint count");
    }
    const Eigen::MatrixX3d shaped = model.mean_vertices + shape_offsets(model, beta);
    const JointSet rest = rest_pose_from_shape(model, beta);
    const JointSet posed = fk(model.tree, rest, rotations);
    const std::vector<Rotation> global = global_rotations(model.tree, rotations);

    PosedMesh out;
    out.vertices = Eigen::MatrixX3d::Zero(model.vertex_count(), 3);
    for (int k = 0; k < model.joint_count(); ++k) {
        const Eigen::VectorXd w = model.skin_weights.col(k);
        if ((w.array() == 0.0).all()) {
            continue;
        }
        const Eigen::RowVector3d t = rest.positions[k].transpose();
        const Eigen::RowVector3d q = posed.positions[k].transpose();
        const Eigen::MatrixX3d moved =
            ((shaped.rowwise() - t) * global[k].matrix().transpose()).rowwise() + q;
        out.vertices += w.asDiagonal() * moved;
    }
    return out;
}

JointSet regress_joints(const Eigen::MatrixXd& regressor, const PosedMesh& mesh) {
    if (regressor.cols() != mesh.vertices.rows()) {
        throw DimensionMismatch("regressor has " + std::to_string(regressor.cols()) +
                                " columns, mesh has " + std::to_string(mesh.vertices.rows()) +
                                " vertices");
    }
    const Eigen::MatrixX3d joints = regressor * mesh.vertices;
    JointSet out;
    out.tag = JointTag::Reconstructed;
    out.positions.reserve(joints.rows());
    for (Eigen::Index r = 0; r < joints.rows(); ++r) {
        out.positions.emplace_back(joints.row(r).transpose());
    }
    return out;
}

}  // namespace hybrik
