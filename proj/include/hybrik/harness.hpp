#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybrik/body_model.hpp"
#include "hybrik/metrics.hpp"
#include "hybrik/solver.hpp"

namespace hybrik {

enum class JitterKind { Uniform, Gaussian };

/// Shared configuration of the experiment drivers. Every experiment is
/// reproducible bit-for-bit from (seed, config, model).
struct ExperimentConfig {
    std::uint64_t seed = 1;
    int trials = 100;

    // jitter robustness
    std::vector<double> jitter_levels_mm = {0.0, 10.0, 20.0, 30.0};
    JitterKind jitter = JitterKind::Uniform;  // Gaussian uses sigma = level

    // pose sampling
    double twist_min_rad = -2.6;
    double twist_max_rad = 2.6;
    double swing_max_rad = 1.0;
    ShapeCoeffs beta;

    // twist sensitivity
    std::string eval_regressor = "lsp14";

    // accumulation law
    int chain_depth = 5;
    double eps_mm = 10.0;

    // twist distribution
    double bin_width_deg = 5.0;

    int threads = 1;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct GeneratedPose {
    RotationSet rotations;
    JointSet target;  // fk of the rotations, tagged Predicted
    TwistSet twists;  // the sampled twist angles (ground truth)
};

/// Samples a random pose: per-joint swing about an axis perpendicular to the
/// bone plus a twist drawn from [twist_min, twist_max]. Joints of the root
/// triple (when the model names one) get zero swing so the triple stays rigid
/// with the root, matching the assumption of the closed-form root
/// registration. Deterministic in the seed.
GeneratedPose gen_random_pose(const BodyModel& model, const ShapeCoeffs& beta,
                              std::uint64_t seed, double twist_min_rad, double twist_max_rad,
                              double swing_max_rad);

struct JitterRow {
    double jitter_mm = 0.0;
    // Reconstruction error: root-aligned MPJPE of Q against the solver input
    // (the jittered joints), the quantity the error analysis accumulates.
    double naive_mean_mpjpe = 0.0;
    double adaptive_mean_mpjpe = 0.0;
    int adaptive_wins = 0;  // trials where adaptive beats naive strictly
    std::vector<double> naive_trial_mpjpe;
    std::vector<double> adaptive_trial_mpjpe;
    // Same reconstruction, measured against the unperturbed target.
    double naive_mean_vs_clean = 0.0;
    double adaptive_mean_vs_clean = 0.0;
};

struct JitterResult {
    std::vector<JitterRow> rows;  // one per jitter level
    int trials = 0;
};

/// Per jitter level: perturb FK-generated targets, solve with both modes and
/// ground-truth twists, record root-aligned MPJPE of the reconstruction
/// against the jittered input (primary) and the clean target (secondary).
JitterResult jitter_experiment(const BodyModel& model, const ExperimentConfig& config);

struct TwistSensitivityRow {
    std::string source;             // "ground_truth" or "random"
    double fk_joint_err_mm = 0.0;   // reconstructed joints vs target
    double regressed_joint_err_mm = 0.0;  // eval-regressed joints vs ground truth
    double vertex_err_mm = 0.0;     // PVE vs ground-truth mesh
    double twist_err_deg = 0.0;     // mean |wrapped twist difference|
};

struct TwistSensitivityResult {
    std::vector<TwistSensitivityRow> rows;
    int trials = 0;
};

/// Solves clean targets twice, with ground-truth and with uniform random
/// twists, and reports joint/mesh/twist errors for both sources.
TwistSensitivityResult twist_sensitivity_experiment(const BodyModel& model,
                                                    const ExperimentConfig& config);

struct TwistHistogram {
    std::vector<std::string> joints;       // non-root joint names
    double bin_width_deg = 5.0;
    std::vector<std::vector<long>> counts;  // [joint][bin], bins cover (-180, 180]
    std::vector<double> min_deg;
    std::vector<double> max_deg;
    std::vector<long> samples;

    int bin_count() const { return counts.empty() ? 0 : static_cast<int>(counts[0].size()); }
    double bin_lo_deg(int b) const { return -180.0 + b * bin_width_deg; }
};

/// Histogram of extracted twist angles per non-root joint, in degrees.
TwistHistogram twist_distribution(const std::vector<RotationSet>& poses, const BodyModel& model,
                                  double bin_width_deg = 5.0);

struct AccumulationResult {
    // Entry i describes joint i+1 of the chain.
    std::vector<double> naive_measured;
    std::vector<double> adaptive_measured;
    std::vector<double> naive_predicted;     // ancestor-sum law: depth * eps
    std::vector<double> adaptive_predicted;  // own-step law: eps
    std::vector<double> adaptive_step_error;  // measured |‖p_k - q_pa‖ - bone|
};

/// Straight chain with every bone stretched eps_mm collinearly, solved with
/// both modes; returns measured per-joint errors next to the closed-form
/// predictions. chain_depth counts joints (chain_depth - 1 bones).
AccumulationResult accumulation_check(int chain_depth, double eps_mm);

}  // namespace hybrik
