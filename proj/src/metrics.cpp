#include "hybrik/metrics.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace hybrik {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b || a == 0) {
        throw LengthMismatch(std::string(what) + ": sizes " + std::to_string(a) + " vs " +
                             std::to_string(b));
    }
}

}  // namespace

double mpjpe(const JointSet& pred, const JointSet& gt, bool root_align) {
    require_same_size(pred.positions.size(), gt.positions.size(), "mpjpe");
    const Vec3 shift = root_align ? Vec3(gt.positions[0] - pred.positions[0]) : Vec3::Zero();
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.positions.size(); ++i) {
        sum += (pred.positions[i] + shift - gt.positions[i]).norm();
    }
    return sum / static_cast<double>(pred.positions.size());
}

SimilarityTransform procrustes_similarity(const std::vector<Vec3>& from,
                                          const std::vector<Vec3>& to) {
    require_same_size(from.size(), to.size(), "procrustes");
    const auto n = static_cast<double>(from.size());
    if (from.size() < 3) {
        throw DegenerateConfiguration("procrustes needs at least 3 points");
    }

    Vec3 mu_x = Vec3::Zero();
    Vec3 mu_y = Vec3::Zero();
    for (std::size_t i = 0; i < from.size(); ++i) {
        mu_x += from[i];
        mu_y += to[i];
    }
    mu_x /= n;
    mu_y /= n;

    Eigen::MatrixX3d xc(from.size(), 3);
    for (std::size_t i = 0; i < from.size(); ++i) {
        xc.row(i) = (from[i] - mu_x).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixX3d> spread(xc);
    const auto& sv = spread.singularValues();
    if (sv(0) <= 0.0 || sv(1) < 1e-9 * sv(0)) {
        throw DegenerateConfiguration("procrustes source points are collinear");
    }

    Mat3 cov = Mat3::Zero();
    double var_x = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        cov += (to[i] - mu_y) * (from[i] - mu_x).transpose();
        var_x += (from[i] - mu_x).squaredNorm();
    }
    cov /= n;
    var_x /= n;

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    Vec3 d(1.0, 1.0, 1.0);
    if (u.determinant() * v.determinant() < 0.0) {
        d.z() = -1.0;
    }
    SimilarityTransform out;
    out.rotation = Rotation::from_matrix(u * d.asDiagonal() * v.transpose());
    out.scale = svd.singularValues().dot(d) / var_x;
    out.translation = mu_y - out.scale * (out.rotation * mu_x);
    return out;
}

double pa_mpjpe(const JointSet& pred, const JointSet& gt) {
    const SimilarityTransform t = procrustes_similarity(pred.positions, gt.positions);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.positions.size(); ++i) {
        sum += (t.apply(pred.positions[i]) - gt.positions[i]).norm();
    }
    return sum / static_cast<double>(pred.positions.size());
}

double pve(const PosedMesh& pred, const PosedMesh& gt) {
    require_same_size(pred.vertices.rows(), gt.vertices.rows(), "pve");
    return (pred.vertices - gt.vertices).rowwise().norm().mean();
}

MetricReport compare(const JointSet& pred, const JointSet& gt, const PosedMesh* pred_mesh,
                     const PosedMesh* gt_mesh) {
    MetricReport report;
    report.mpjpe = mpjpe(pred, gt, /*root_align=*/false);
    report.pa_mpjpe = pa_mpjpe(pred, gt);
    report.per_joint.reserve(pred.positions.size());
    for (std::size_t i = 0; i < pred.positions.size(); ++i) {
        report.per_joint.push_back((pred.positions[i] - gt.positions[i]).norm());
    }
    if (pred_mesh != nullptr && gt_mesh != nullptr) {
        report.pve = pve(*pred_mesh, *gt_mesh);
    }
    return report;
}

}  // namespace hybrik
