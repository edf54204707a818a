#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybrik/rotmath.hpp"

namespace hybrik {

enum class JointTag { Template, Predicted, Reconstructed };

/// Rooted joint tree in root-first topological order: parent[0] == -1 and
/// parent[k] < k for every other joint. Loaders must reorder or reject input
/// that violates this.
class KinematicTree {
public:
    KinematicTree() = default;  // empty; only valid as a placeholder
    KinematicTree(std::vector<int> parents, std::vector<std::string> names);

    int joint_count() const { return static_cast<int>(parents_.size()); }
    int parent(int k) const { return parents_[k]; }
    const std::string& name(int k) const { return names_[k]; }
    std::optional<int> index_of(std::string_view name) const;
    /// Indices on the path from parent(k) up to the root, nearest first.
    std::vector<int> ancestors(int k) const;

    const std::vector<int>& parents() const { return parents_; }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<int> parents_;
    std::vector<std::string> names_;
};

/// Per-joint 3D positions in millimeters plus a semantic tag (rest-pose
/// template, predicted target, or reconstructed output).
struct JointSet {
    std::vector<Vec3> positions;
    JointTag tag = JointTag::Template;
};

/// Per-joint relative rotations; relative[0] is the global root rotation.
struct RotationSet {
    std::vector<Rotation> relative;
};

/// Forward kinematics: root pinned to the template, every other joint placed
/// by rotating its template bone with the accumulated global rotation.
JointSet fk(const KinematicTree& tree, const JointSet& rest, const RotationSet& rotations);

/// Accumulated rotations R_k = R_parent(k) * relative[k], R_0 = relative[0].
std::vector<Rotation> global_rotations(const KinematicTree& tree, const RotationSet& rotations);

/// Residual of the bone-vector consistency condition, per joint in mm:
/// ‖(p_k - p_pa) - R_k (t_k - t_pa)‖ for k >= 1 and ‖p_0 - t_0‖ at the root.
std::vector<double> check_ik_condition(const KinematicTree& tree, const JointSet& rest,
                                       const JointSet& target, const RotationSet& rotations);

/// lengths[k] = ‖j_k - j_pa(k)‖ for k >= 1; lengths[0] = 0.
std::vector<double> bone_lengths(const KinematicTree& tree, const JointSet& joints);

}  // namespace hybrik
