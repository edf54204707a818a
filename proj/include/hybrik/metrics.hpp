#pragma once

#include <optional>

#include "hybrik/body_model.hpp"

namespace hybrik {

struct MetricReport {
    double mpjpe = 0.0;
    double pa_mpjpe = 0.0;
    std::optional<double> pve;
    std::vector<double> per_joint;  // unaligned per-joint distances, mm
};

/// Mean per-joint distance in mm, optionally after translating pred so the
/// root joints coincide.
double mpjpe(const JointSet& pred, const JointSet& gt, bool root_align);

/// Optimal similarity (rotation + translation + uniform scale) mapping `from`
/// onto `to` in the least-squares sense. Throws DegenerateConfiguration when
/// `from` is collinear or has fewer than 3 points.
struct SimilarityTransform {
    double scale = 1.0;
    Rotation rotation;
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};
SimilarityTransform procrustes_similarity(const std::vector<Vec3>& from,
                                          const std::vector<Vec3>& to);

/// Mean per-joint distance after optimal similarity alignment of pred onto gt.
double pa_mpjpe(const JointSet& pred, const JointSet& gt);

/// Mean vertex-wise distance between two meshes, mm.
double pve(const PosedMesh& pred, const PosedMesh& gt);

/// Convenience bundle of the joint metrics (and PVE when meshes are given).
MetricReport compare(const JointSet& pred, const JointSet& gt,
                     const PosedMesh* pred_mesh = nullptr, const PosedMesh* gt_mesh = nullptr);

}  // namespace hybrik
