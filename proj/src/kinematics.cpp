#include "hybrik/kinematics.hpp"

#include <algorithm>

namespace hybrik {

KinematicTree::KinematicTree(std::vector<int> parents, std::vector<std::string> names)
    : parents_(std::move(parents)), names_(std::move(names)) {
    if (parents_.empty()) {
        throw ValidationError("tree needs at least one joint");
    }
    if (names_.size() != parents_.size()) {
        throw LengthMismatch("tree has " + std::to_string(parents_.size()) + " parents but " +
                             std::to_string(names_.size()) + " names");
    }
    if (parents_[0] != -1) {
        throw ValidationError("joint 0 must be the root (parent -1)");
    }
    for (int k = 1; k < joint_count(); ++k) {
        if (parents_[k] < 0 || parents_[k] >= k) {
            throw ValidationError("joint " + std::to_string(k) +
                                  " breaks root-first ordering (parent " +
                                  std::to_string(parents_[k]) + ")");
        }
    }
}

std::optional<int> KinematicTree::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    return static_cast<int>(it - names_.begin());
}

std::vector<int> KinematicTree::ancestors(int k) const {
    std::vector<int> out;
    for (int j = parents_[k]; j >= 0; j = parents_[j]) {
        out.push_back(j);
    }
    return out;
}

namespace {

void require_length(std::size_t got, int want, const char* what) {
    if (static_cast<int>(got) != want) {
        throw LengthMismatch(std::string(what) + " has " + std::to_string(got) +
                             " entries, tree has " + std::to_string(want) + " joints");
    }
}

}  // namespace

JointSet fk(const KinematicTree& tree, const JointSet& rest, const RotationSet& rotations) {
    const int n = tree.joint_count();
    require_length(rest.positions.size(), n, "template");
    require_length(rotations.relative.size(), n, "rotation set");

    JointSet out;
    out.tag = JointTag::Reconstructed;
    out.positions.resize(n);
    std::vector<Rotation> global(n);

    global[0] = rotations.relative[0];
    out.positions[0] = rest.positions[0];
    for (int k = 1; k < n; ++k) {
        const int pa = tree.parent(k);
        global[k] = global[pa] * rotations.relative[k];
        out.positions[k] = global[k] * (rest.positions[k] - rest.positions[pa]) + out.positions[pa];
    }
    return out;
}

std::vector<Rotation> global_rotations(const KinematicTree& tree, const RotationSet& rotations) {
    const int n = tree.joint_count();
    require_length(rotations.relative.size(), n, "rotation set");

    std::vector<Rotation> global(n);
    global[0] = rotations.relative[0];
    for (int k = 1; k < n; ++k) {
        global[k] = global[tree.parent(k)] * rotations.relative[k];
    }
    return global;
}

std::vector<double> check_ik_condition(const KinematicTree& tree, const JointSet& rest,
                                       const JointSet& target, const RotationSet& rotations) {
    const int n = tree.joint_count();
    require_length(rest.positions.size(), n, "template");
    require_length(target.positions.size(), n, "target");

    const std::vector<Rotation> global = global_rotations(tree, rotations);
    std::vector<double> residual(n);
    residual[0] = (target.positions[0] - rest.positions[0]).norm();
    for (int k = 1; k < n; ++k) {
        const int pa = tree.parent(k);
        const Vec3 target_bone = target.positions[k] - target.positions[pa];
        const Vec3 rotated_bone = global[k] * (rest.positions[k] - rest.positions[pa]);
        residual[k] = (target_bone - rotated_bone).norm();
    }
    return residual;
}

std::vector<double> bone_lengths(const KinematicTree& tree, const JointSet& joints) {
    const int n = tree.joint_count();
    require_length(joints.positions.size(), n, "joint set");

    std::vector<double> lengths(n, 0.0);
    for (int k = 1; k < n; ++k) {
        lengths[k] = (joints.positions[k] - joints.positions[tree.parent(k)]).norm();
    }
    return lengths;
}

}  // namespace hybrik
