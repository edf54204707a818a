#include "hybrik/solver.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace hybrik {

RootTriple RootTriple::from_names(const KinematicTree& tree) {
    std::array<int, 3> joints{};
    const std::array<const char*, 3> names = {"spine", "left_hip", "right_hip"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto idx = tree.index_of(names[i]);
        if (!idx) {
            throw ValidationError(std::string("tree has no joint named '") + names[i] + "'");
        }
        joints[i] = *idx;
    }
    return from_indices(tree, joints);
}

RootTriple RootTriple::from_indices(const KinematicTree& tree, std::array<int, 3> joints) {
    for (int j : joints) {
        if (j <= 0 || j >= tree.joint_count()) {
            throw ValidationError("root triple joint " + std::to_string(j) +
                                  " is not a non-root joint of the tree");
        }
    }
    if (joints[0] == joints[1] || joints[0] == joints[2] || joints[1] == joints[2]) {
        throw ValidationError("root triple joints must be distinct");
    }
    return RootTriple{joints};
}

Rotation solve_root_rotation(const JointSet& rest, const JointSet& target,
                             const RootTriple& triple) {
    Mat3 t0;
    Mat3 p0;
    for (int i = 0; i < 3; ++i) {
        const int j = triple.joints[i];
        if (j >= static_cast<int>(rest.positions.size()) ||
            j >= static_cast<int>(target.positions.size())) {
            throw LengthMismatch("root triple index " + std::to_string(j) +
                                 " outside the joint sets");
        }
        t0.col(i) = rest.positions[j] - rest.positions[0];
        p0.col(i) = target.positions[j] - target.positions[0];
    }

    // A collinear template triple cannot pin the rotation.
    bool spans_plane = false;
    for (int a = 0; a < 3 && !spans_plane; ++a) {
        for (int b = a + 1; b < 3 && !spans_plane; ++b) {
            const double cross = t0.col(a).cross(t0.col(b)).norm();
            spans_plane = cross >= 1e-6 * t0.col(a).norm() * t0.col(b).norm();
        }
    }
    if (!spans_plane) {
        throw DegenerateTriple("template root triple is collinear");
    }

    const Mat3 m = t0 * p0.transpose();
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    const double d = (v * u.transpose()).determinant();
    const Mat3 r0 = v * Vec3(1.0, 1.0, d).asDiagonal() * u.transpose();
    return Rotation::from_matrix(r0);
}

namespace {

SolveReport run_solver(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                       const TwistSet& twists, const std::optional<RootTriple>& triple,
                       bool adaptive) {
    const int n = tree.joint_count();
    if (static_cast<int>(rest.positions.size()) != n ||
        static_cast<int>(target.positions.size()) != n) {
        throw LengthMismatch("template/target joint count does not match the tree");
    }
    if (static_cast<int>(twists.size()) != n - 1) {
        throw LengthMismatch("expected " + std::to_string(n - 1) + " twists, got " +
                             std::to_string(twists.size()));
    }

    SolveReport report;
    report.rotations.relative.resize(n);
    report.per_joint_error.assign(n, 0.0);
    report.bone_eps.assign(n, 0.0);

    std::vector<Rotation> global(n);
    std::vector<Vec3> q(n);
    const Rotation root = triple ? solve_root_rotation(rest, target, *triple)
                                 : Rotation::identity();
    report.rotations.relative[0] = root;
    global[0] = root;
    q[0] = rest.positions[0];

    for (int k = 1; k < n; ++k) {
        const int pa = tree.parent(k);
        const Vec3 bone = rest.positions[k] - rest.positions[pa];
        if (bone.norm() < kZeroLengthTol) {
            throw ZeroLengthVector("degenerate template bone at joint '" + tree.name(k) + "'");
        }
        const Vec3& anchor = adaptive ? q[pa] : target.positions[pa];
        const Vec3 to_target = target.positions[k] - anchor;
        if (adaptive && to_target.norm() < 1e-9) {
            throw DegenerateTarget("target joint '" + tree.name(k) +
                                   "' coincides with its reconstructed parent");
        }
        const Vec3 local_target = global[pa].inverse() * to_target;
        // Parallel targets are exact (identity swing); only the anti-parallel
        // branch picks an arbitrary axis and is worth surfacing.
        if (swing_is_degenerate(bone, local_target) && bone.dot(local_target) <= 0.0) {
            report.degenerate_swings.push_back(k);
        }
        report.rotations.relative[k] = compose_twist_swing(bone, local_target, twists[k - 1]);
        global[k] = global[pa] * report.rotations.relative[k];
        q[k] = global[k] * bone + q[pa];
        report.bone_eps[k] = std::abs(to_target.norm() - bone.norm());
    }

    report.reconstructed.tag = JointTag::Reconstructed;
    report.reconstructed.positions = std::move(q);
    for (int k = 0; k < n; ++k) {
        report.per_joint_error[k] =
            (target.positions[k] - report.reconstructed.positions[k]).norm();
    }
    return report;
}

}  // namespace

SolveReport solve_naive(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                        const TwistSet& twists, const std::optional<RootTriple>& triple) {
    return run_solver(tree, rest, target, twists, triple, /*adaptive=*/false);
}

SolveReport solve_adaptive(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                           const TwistSet& twists, const std::optional<RootTriple>& triple) {
    return run_solver(tree, rest, target, twists, triple, /*adaptive=*/true);
}

SolveReport solve(const KinematicTree& tree, const JointSet& rest, const JointSet& target,
                  const TwistSet& twists, const std::optional<RootTriple>& triple,
                  SolveMode mode) {
    if (rest.positions.empty() || target.positions.empty()) {
        throw LengthMismatch("empty joint set");
    }
    const Vec3 translation = rest.positions[0] - target.positions[0];
    JointSet aligned = target;
    for (Vec3& p : aligned.positions) {
        p += translation;
    }
    SolveReport report = mode == SolveMode::Naive
                             ? solve_naive(tree, rest, aligned, twists, triple)
                             : solve_adaptive(tree, rest, aligned, twists, triple);
    report.root_translation = translation;
    return report;
}

TwistSet extract_twists(const KinematicTree& tree, const JointSet& rest,
                        const RotationSet& rotations) {
    const int n = tree.joint_count();
    if (static_cast<int>(rest.positions.size()) != n ||
        static_cast<int>(rotations.relative.size()) != n) {
        throw LengthMismatch("template/rotation count does not match the tree");
    }
    TwistSet out;
    out.reserve(n - 1);
    for (int k = 1; k < n; ++k) {
        const Vec3 bone = rest.positions[k] - rest.positions[tree.parent(k)];
        out.push_back(extract_twist_swing(rotations.relative[k], bone).twist);
    }
    return out;
}

}  // namespace hybrik
