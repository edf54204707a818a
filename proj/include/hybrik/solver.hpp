#pragma once

#include <array>
#include <optional>

#include "hybrik/kinematics.hpp"

namespace hybrik {

/// Twist angles for the non-root joints; entry k-1 belongs to joint k.
using TwistSet = std::vector<TwistAngle>;

/// Indices of the three joints that form a rigid assembly with the root and
/// anchor the closed-form global rotation.
struct RootTriple {
    std::array<int, 3> joints;

    /// Looks up the conventional joint names (spine, left_hip, right_hip).
    static RootTriple from_names(const KinematicTree& tree);
    static RootTriple from_indices(const KinematicTree& tree, std::array<int, 3> joints);
};

enum class SolveMode { Naive, Adaptive };

struct SolveReport {
    RotationSet rotations;
    JointSet reconstructed;                // Q = fk(rotations, template)
    std::vector<double> per_joint_error;   // ‖p_k - q_k‖, mm
    std::vector<double> bone_eps;          // per-step bone-length mismatch, mm
    Vec3 root_translation = Vec3::Zero();  // added to the target before solving
    std::vector<int> degenerate_swings;    // joints that hit the degenerate swing branch
};

/// Proper rotation minimizing ‖P0 - R T0‖_F over the root-relative triple
/// positions, via SVD of T0 P0^T with the reflection guard on the smallest
/// singular direction. Throws DegenerateTriple when the template triple is
/// collinear.
Rotation solve_root_rotation(const JointSet& rest, const JointSet& target,
                             const RootTriple& triple);

/// Recursive IK using raw target parent positions to form each bone vector;
/// bone-length mismatch accumulates down the tree. Expects the target root
/// already aligned to the template root (use solve() otherwise). A missing
/// triple pins the root rotation to the identity (for models, such as plain
/// chains, that have no registrable triple).
SolveReport solve_naive(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                        const TwistSet& twists, const std::optional<RootTriple>& triple);

/// Recursive IK re-anchoring each bone at the freshly reconstructed parent;
/// each joint's error depends only on its own step. Throws DegenerateTarget
/// when a target joint coincides with its reconstructed parent.
SolveReport solve_adaptive(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                           const TwistSet& twists, const std::optional<RootTriple>& triple);

/// Translates the target so its root matches the template root, records the
/// translation, and dispatches on mode.
SolveReport solve(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                  const TwistSet& twists, const std::optional<RootTriple>& triple, SolveMode mode);

/// Ground-truth twists of a rotation set: per non-root joint, the twist of
/// its relative rotation about its template bone.
TwistSet extract_twists(const KinematicTree& tree, const JointSet& rest,
                        const RotationSet& rotations);

}  // namespace hybrik
