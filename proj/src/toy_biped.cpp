#include "hybrik/body_model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace hybrik {

namespace {

struct JointSpec {
    const char* name;
    int parent;
    Vec3 pos;          // rest position, mm, pelvis at the origin
    double ring_radius;
};

// SMPL-like topology: pelvis root, two legs, three spine segments, neck/head,
// collars and two arms. Root-first ordering.
const std::vector<JointSpec>& joint_specs() {
    static const std::vector<JointSpec> specs = {
        {"pelvis", -1, {0, 0, 0}, 80},
        {"left_hip", 0, {85, -70, 5}, 60},
        {"right_hip", 0, {-85, -70, 5}, 60},
        {"spine", 0, {0, 110, -10}, 80},
        {"left_knee", 1, {95, -430, 8}, 42},
        {"right_knee", 2, {-95, -430, 8}, 42},
        {"spine2", 3, {0, 230, -20}, 85},
        {"left_ankle", 4, {100, -790, -15}, 32},
        {"right_ankle", 5, {-100, -790, -15}, 32},
        {"spine3", 6, {0, 290, -15}, 90},
        {"left_foot", 7, {105, -835, 110}, 24},
        {"right_foot", 8, {-105, -835, 110}, 24},
        {"neck", 9, {0, 480, -25}, 55},
        {"left_collar", 9, {75, 400, -15}, 50},
        {"right_collar", 9, {-75, 400, -15}, 50},
        {"head", 12, {0, 600, 15}, 95},
        {"left_shoulder", 13, {165, 430, -20}, 45},
        {"right_shoulder", 14, {-165, 430, -20}, 45},
        {"left_elbow", 16, {380, 420, -25}, 36},
        {"right_elbow", 17, {-380, 420, -25}, 36},
        {"left_wrist", 18, {575, 415, -15}, 28},
        {"right_wrist", 19, {-575, 415, -15}, 28},
        {"left_hand", 20, {645, 410, 0}, 22},
        {"right_hand", 21, {-645, 410, 0}, 22},
    };
    return specs;
}

Vec3 unit_perpendicular(const Vec3& d) {
    int smallest = 0;
    if (std::abs(d.y()) < std::abs(d[smallest])) smallest = 1;
    if (std::abs(d.z()) < std::abs(d[smallest])) smallest = 2;
    Vec3 e = Vec3::Zero();
    e[smallest] = 1.0;
    return d.cross(e).normalized();
}

struct VertexSpec {
    Vec3 pos;
    int owner;                            // dominant skin joint
    std::vector<std::pair<int, double>> weights;
};

void add_ring(std::vector<VertexSpec>& verts, const Vec3& center, const Vec3& axis,
              double radius, int count, int owner,
              const std::vector<std::pair<int, double>>& weights) {
    const Vec3 dir = axis.normalized();
    const Vec3 u = unit_perpendicular(dir);
    const Vec3 v = dir.cross(u);
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / count;
        verts.push_back({center + radius * (std::cos(a) * u + std::sin(a) * v),
                         owner, weights});
    }
}

}  // namespace

BodyModel toy_biped() {
    const auto& specs = joint_specs();
    const int k_total = static_cast<int>(specs.size());

    std::vector<int> parents;
    std::vector<std::string> names;
    for (const auto& s : specs) {
        parents.push_back(s.parent);
        names.push_back(s.name);
    }

    constexpr int kJointRing = 8;
    constexpr int kBoneRing = 4;

    // One ring per joint (anchors the joint regressor), three interior rings
    // per bone, and a cap above the head.
    std::vector<VertexSpec> verts;
    std::vector<std::vector<int>> joint_ring(k_total);
    for (int k = 0; k < k_total; ++k) {
        const Vec3 axis = k == 0 ? Vec3(0, 1, 0) : (specs[k].pos - specs[specs[k].parent].pos);
        const int first = static_cast<int>(verts.size());
        add_ring(verts, specs[k].pos, axis, specs[k].ring_radius, kJointRing, k, {{k, 1.0}});
        for (int i = 0; i < kJointRing; ++i) {
            joint_ring[k].push_back(first + i);
        }
    }
    for (int k = 1; k < k_total; ++k) {
        const int pa = specs[k].parent;
        const Vec3 bone = specs[k].pos - specs[pa].pos;
        for (double s : {0.3, 0.5, 0.7}) {
            std::vector<std::pair<int, double>> w;
            if (s == 0.3) {
                w = {{k, 0.8}, {pa, 0.2}};
            } else {
                w = {{k, 1.0}};
            }
            add_ring(verts, specs[pa].pos + s * bone, bone, 0.75 * specs[k].ring_radius,
                     kBoneRing, k, w);
        }
    }
    const int head = 15;
    add_ring(verts, specs[head].pos + Vec3(0, 80, 0), Vec3(0, 1, 0), 60, kJointRing, head,
             {{head, 1.0}});

    const int n = static_cast<int>(verts.size());

    BodyModel model;
    model.tree = KinematicTree(parents, names);
    model.mean_vertices.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        model.mean_vertices.row(i) = verts[i].pos.transpose();
    }

    model.skin_weights = Eigen::MatrixXd::Zero(n, k_total);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, w] : verts[i].weights) {
            model.skin_weights(i, j) = w;
        }
    }

    model.joint_regressor = Eigen::MatrixXd::Zero(k_total, n);
    for (int k = 0; k < k_total; ++k) {
        for (int idx : joint_ring[k]) {
            model.joint_regressor(k, idx) = 1.0 / kJointRing;
        }
    }

    const std::vector<const char*> lsp_order = {
        "right_ankle", "right_knee", "right_hip",      "left_hip",
        "left_knee",   "left_ankle", "right_wrist",    "right_elbow",
        "right_shoulder", "left_shoulder", "left_elbow", "left_wrist",
        "neck",        "head",
    };
    // Evaluation joints sit on an off-axis arc of each ring, the way surface
    // markers do, so they respond to twist as well as swing.
    Eigen::MatrixXd lsp = Eigen::MatrixXd::Zero(static_cast<int>(lsp_order.size()), n);
    for (std::size_t r = 0; r < lsp_order.size(); ++r) {
        const int k = *model.tree.index_of(lsp_order[r]);
        lsp(static_cast<int>(r), joint_ring[k][0]) = 0.5;
        lsp(static_cast<int>(r), joint_ring[k][1]) = 0.25;
        lsp(static_cast<int>(r), joint_ring[k][2]) = 0.25;
    }
    model.eval_regressors["lsp14"] = lsp;

    // Hand-authored PCA-like blend directions. Regions are keyed off the
    // dominant skin joint of each vertex.
    const auto owner_is = [&](int i, std::initializer_list<const char*> list) {
        const std::string& owner = names[verts[i].owner];
        for (const char* cand : list) {
            if (owner == cand) return true;
        }
        return false;
    };
    const Vec3 neck_pos = specs[12].pos;
    for (auto& b : model.shape_basis) {
        b = Eigen::MatrixX3d::Zero(n, 3);
    }
    for (int i = 0; i < n; ++i) {
        const Vec3 x = verts[i].pos;
        const double side = x.x() >= 0.0 ? 1.0 : -1.0;
        model.shape_basis[0].row(i) = (0.04 * x).transpose();
        model.shape_basis[1].row(i) = Vec3(0, 0.05 * x.y(), 0).transpose();
        if (owner_is(i, {"left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
                         "left_wrist", "right_wrist", "left_hand", "right_hand"})) {
            model.shape_basis[2].row(i) = Vec3(0.06 * (x.x() - side * 165.0), 0, 0).transpose();
        }
        if (owner_is(i, {"left_knee", "right_knee", "left_ankle", "right_ankle", "left_foot",
                         "right_foot"})) {
            model.shape_basis[3].row(i) = Vec3(0, 0.06 * (x.y() + 70.0), 0).transpose();
        }
        if (owner_is(i, {"pelvis", "spine", "spine2", "spine3", "left_hip", "right_hip"})) {
            model.shape_basis[4].row(i) = Vec3(0.08 * x.x(), 0, 0.08 * (x.z() + 15.0)).transpose();
        }
        if (owner_is(i, {"head", "neck"})) {
            model.shape_basis[5].row(i) = (0.08 * (x - neck_pos)).transpose();
        }
        if (owner_is(i, {"left_collar", "right_collar", "left_shoulder", "right_shoulder"})) {
            model.shape_basis[6].row(i) = Vec3(side * 4.0, 0, 0).transpose();
        }
        if (owner_is(i, {"left_hip", "right_hip", "left_knee", "right_knee"})) {
            model.shape_basis[7].row(i) = Vec3(side * 2.4, 0, 0).transpose();
        }
        if (owner_is(i, {"left_foot", "right_foot"})) {
            const Vec3 ankle = side > 0 ? specs[7].pos : specs[8].pos;
            model.shape_basis[8].row(i) = (0.1 * (x - ankle)).transpose();
        }
        if (owner_is(i, {"pelvis", "spine", "spine2", "spine3", "neck", "head", "left_collar",
                         "right_collar"})) {
            model.shape_basis[9].row(i) = Vec3(0, 0, 8e-5 * x.y() * x.y()).transpose();
        }
    }

    model.validate();
    return model;
}

}  // namespace hybrik
