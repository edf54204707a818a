#include "hybrik/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "hybrik/rng.hpp"

namespace hybrik {

namespace {

constexpr double kPi = std::numbers::pi;

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) {
                fn(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

std::optional<RootTriple> lookup_triple(const KinematicTree& tree) {
    if (tree.index_of("spine") && tree.index_of("left_hip") && tree.index_of("right_hip")) {
        return RootTriple::from_names(tree);
    }
    return std::nullopt;
}

double wrapped_abs_deg(double a_rad, double b_rad) {
    return std::abs(std::remainder(a_rad - b_rad, 2.0 * kPi)) * 180.0 / kPi;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) {
        throw ValidationError("config field 'trials' must be >= 1");
    }
    for (double j : jitter_levels_mm) {
        if (!(j >= 0.0)) {
            throw ValidationError("config field 'jitter_levels_mm' must be non-negative");
        }
    }
    if (!(twist_min_rad > -kPi) || !(twist_max_rad < kPi) || twist_min_rad > twist_max_rad) {
        throw ValidationError(
            "config fields 'twist_min_rad'/'twist_max_rad' must satisfy -pi < min <= max < pi");
    }
    if (!(swing_max_rad >= 0.0) || swing_max_rad > kPi - 0.01) {
        throw ValidationError("config field 'swing_max_rad' must lie in [0, pi - 0.01]");
    }
    if (chain_depth < 2) {
        throw ValidationError("config field 'chain_depth' must be >= 2");
    }
    if (!(eps_mm >= 0.0)) {
        throw ValidationError("config field 'eps_mm' must be non-negative");
    }
    if (!(bin_width_deg > 0.0) || bin_width_deg > 360.0) {
        throw ValidationError("config field 'bin_width_deg' must lie in (0, 360]");
    }
    if (threads < 1) {
        throw ValidationError("config field 'threads' must be >= 1");
    }
}

GeneratedPose gen_random_pose(const BodyModel& model, const ShapeCoeffs& beta,
                              std::uint64_t seed, double twist_min_rad, double twist_max_rad,
                              double swing_max_rad) {
    if (!(twist_min_rad > -kPi) || !(twist_max_rad < kPi) || twist_min_rad > twist_max_rad) {
        throw ValidationError("twist range must satisfy -pi < min <= max < pi");
    }
    if (!(swing_max_rad >= 0.0) || swing_max_rad > kPi - 0.01) {
        throw ValidationError("swing range must lie in [0, pi - 0.01]");
    }

    const JointSet rest = rest_pose_from_shape(model, beta);
    const KinematicTree& tree = model.tree;
    const int n = tree.joint_count();
    Rng rng(derive_seed(seed, 0, 0));

    std::vector<bool> rigid_with_root(n, false);
    if (const auto triple = lookup_triple(tree)) {
        for (int j : triple->joints) {
            rigid_with_root[j] = true;
        }
    }

    RotationSet rotations;
    rotations.relative.resize(n);
    if (swing_max_rad > 0.0) {
        rotations.relative[0] = rodrigues(rng.unit_vector(), rng.uniform(-swing_max_rad, swing_max_rad));
    }

    GeneratedPose out;
    out.twists.reserve(n - 1);
    for (int k = 1; k < n; ++k) {
        const Vec3 bone = rest.positions[k] - rest.positions[tree.parent(k)];
        const TwistAngle phi = TwistAngle::from_angle(rng.uniform(twist_min_rad, twist_max_rad));
        Rotation rel = twist_about(bone, phi);
        if (!rigid_with_root[k] && swing_max_rad > 0.0) {
            // Swing axis perpendicular to the bone; the angle equals the
            // direction change, so extraction round-trips the sample.
            const Vec3 dir = bone.normalized();
            Vec3 axis;
            do {
                axis = rng.unit_vector();
                axis -= axis.dot(dir) * dir;
            } while (axis.norm() < 1e-6);
            rel = rodrigues(axis.normalized(), rng.uniform(0.0, swing_max_rad)) * rel;
        }
        rotations.relative[k] = rel;
        out.twists.push_back(phi);
    }

    out.target = fk(tree, rest, rotations);
    out.target.tag = JointTag::Predicted;
    out.rotations = std::move(rotations);
    return out;
}

JitterResult jitter_experiment(const BodyModel& model, const ExperimentConfig& config) {
    config.validate();
    const JointSet rest = rest_pose_from_shape(model, config.beta);
    const auto triple = lookup_triple(model.tree);

    std::vector<GeneratedPose> poses(config.trials);
    parallel_for(config.trials, config.threads, [&](int t) {
        poses[t] = gen_random_pose(model, config.beta, derive_seed(config.seed, 1, t),
                                   config.twist_min_rad, config.twist_max_rad,
                                   config.swing_max_rad);
    });

    JitterResult result;
    result.trials = config.trials;
    result.rows.resize(config.jitter_levels_mm.size());
    for (std::size_t li = 0; li < config.jitter_levels_mm.size(); ++li) {
        const double level = config.jitter_levels_mm[li];
        JitterRow& row = result.rows[li];
        row.jitter_mm = level;
        row.naive_trial_mpjpe.assign(config.trials, 0.0);
        row.adaptive_trial_mpjpe.assign(config.trials, 0.0);
        std::vector<double> naive_clean(config.trials, 0.0);
        std::vector<double> adaptive_clean(config.trials, 0.0);

        parallel_for(config.trials, config.threads, [&](int t) {
            const GeneratedPose& pose = poses[t];
            Rng noise(derive_seed(config.seed, 1000 + li, t));
            JointSet noisy = pose.target;
            if (level > 0.0) {
                for (Vec3& p : noisy.positions) {
                    p += config.jitter == JitterKind::Uniform ? noise.uniform_box(level)
                                                              : noise.normal_vec(level);
                }
            }
            const SolveReport naive =
                solve(model.tree, rest, noisy, pose.twists, triple, SolveMode::Naive);
            const SolveReport adaptive =
                solve(model.tree, rest, noisy, pose.twists, triple, SolveMode::Adaptive);
            row.naive_trial_mpjpe[t] = mpjpe(naive.reconstructed, noisy, true);
            row.adaptive_trial_mpjpe[t] = mpjpe(adaptive.reconstructed, noisy, true);
            naive_clean[t] = mpjpe(naive.reconstructed, pose.target, true);
            adaptive_clean[t] = mpjpe(adaptive.reconstructed, pose.target, true);
        });

        for (int t = 0; t < config.trials; ++t) {
            row.naive_mean_mpjpe += row.naive_trial_mpjpe[t];
            row.adaptive_mean_mpjpe += row.adaptive_trial_mpjpe[t];
            row.naive_mean_vs_clean += naive_clean[t];
            row.adaptive_mean_vs_clean += adaptive_clean[t];
            if (row.adaptive_trial_mpjpe[t] < row.naive_trial_mpjpe[t]) {
                ++row.adaptive_wins;
            }
        }
        row.naive_mean_mpjpe /= config.trials;
        row.adaptive_mean_mpjpe /= config.trials;
        row.naive_mean_vs_clean /= config.trials;
        row.adaptive_mean_vs_clean /= config.trials;
    }
    return result;
}

TwistSensitivityResult twist_sensitivity_experiment(const BodyModel& model,
                                                    const ExperimentConfig& config) {
    config.validate();
    const auto reg_it = model.eval_regressors.find(config.eval_regressor);
    if (reg_it == model.eval_regressors.end()) {
        throw ValidationError("model has no eval regressor named '" + config.eval_regressor +
                              "'");
    }
    const Eigen::MatrixXd& eval_reg = reg_it->second;
    const JointSet rest = rest_pose_from_shape(model, config.beta);
    const auto triple = lookup_triple(model.tree);
    const int n = model.tree.joint_count();

    struct Accum {
        double fk = 0, regressed = 0, vertex = 0, twist = 0;
    };
    std::vector<Accum> gt_acc(config.trials);
    std::vector<Accum> rnd_acc(config.trials);

    parallel_for(config.trials, config.threads, [&](int t) {
        const GeneratedPose pose =
            gen_random_pose(model, config.beta, derive_seed(config.seed, 3, t),
                            config.twist_min_rad, config.twist_max_rad, config.swing_max_rad);
        const PosedMesh gt_mesh = skin(model, config.beta, pose.rotations);
        const JointSet gt_regressed = regress_joints(eval_reg, gt_mesh);

        Rng rng(derive_seed(config.seed, 4, t));
        TwistSet random_twists;
        random_twists.reserve(n - 1);
        for (int k = 1; k < n; ++k) {
            random_twists.push_back(TwistAngle::from_angle(rng.uniform(-kPi, kPi)));
        }

        const auto evaluate = [&](const TwistSet& twists, Accum& acc) {
            const SolveReport rep =
                solve(model.tree, rest, pose.target, twists, triple, SolveMode::Adaptive);
            acc.fk = mpjpe(rep.reconstructed, pose.target, true);
            const PosedMesh mesh = skin(model, config.beta, rep.rotations);
            acc.vertex = pve(mesh, gt_mesh);
            acc.regressed = mpjpe(regress_joints(eval_reg, mesh), gt_regressed, false);
            const TwistSet solved = extract_twists(model.tree, rest, rep.rotations);
            double twist_err = 0.0;
            for (int k = 0; k < n - 1; ++k) {
                twist_err += wrapped_abs_deg(solved[k].angle(), pose.twists[k].angle());
            }
            acc.twist = twist_err / (n - 1);
        };
        evaluate(pose.twists, gt_acc[t]);
        evaluate(random_twists, rnd_acc[t]);
    });

    const auto mean_row = [&](const std::vector<Accum>& acc, const std::string& source) {
        TwistSensitivityRow row;
        row.source = source;
        for (const Accum& a : acc) {
            row.fk_joint_err_mm += a.fk;
            row.regressed_joint_err_mm += a.regressed;
            row.vertex_err_mm += a.vertex;
            row.twist_err_deg += a.twist;
        }
        row.fk_joint_err_mm /= acc.size();
        row.regressed_joint_err_mm /= acc.size();
        row.vertex_err_mm /= acc.size();
        row.twist_err_deg /= acc.size();
        return row;
    };

    TwistSensitivityResult result;
    result.trials = config.trials;
    result.rows.push_back(mean_row(gt_acc, "ground_truth"));
    result.rows.push_back(mean_row(rnd_acc, "random"));
    return result;
}

TwistHistogram twist_distribution(const std::vector<RotationSet>& poses, const BodyModel& model,
                                  double bin_width_deg) {
    if (poses.empty()) {
        throw ValidationError("twist_distribution needs at least one pose");
    }
    if (!(bin_width_deg > 0.0) || bin_width_deg > 360.0) {
        throw ValidationError("bin width must lie in (0, 360]");
    }
    const KinematicTree& tree = model.tree;
    const JointSet rest = rest_pose_from_shape(model, ShapeCoeffs{});
    const int n = tree.joint_count();
    const int bins = static_cast<int>(std::ceil(360.0 / bin_width_deg));

    TwistHistogram hist;
    hist.bin_width_deg = bin_width_deg;
    hist.joints.assign(tree.names().begin() + 1, tree.names().end());
    hist.counts.assign(n - 1, std::vector<long>(bins, 0));
    hist.min_deg.assign(n - 1, std::numeric_limits<double>::infinity());
    hist.max_deg.assign(n - 1, -std::numeric_limits<double>::infinity());
    hist.samples.assign(n - 1, 0);

    for (const RotationSet& pose : poses) {
        const TwistSet twists = extract_twists(tree, rest, pose);
        for (int k = 0; k < n - 1; ++k) {
            const double deg = twists[k].angle() * 180.0 / kPi;
            int b = static_cast<int>(std::floor((deg + 180.0) / bin_width_deg));
            b = std::clamp(b, 0, bins - 1);
            ++hist.counts[k][b];
            ++hist.samples[k];
            hist.min_deg[k] = std::min(hist.min_deg[k], deg);
            hist.max_deg[k] = std::max(hist.max_deg[k], deg);
        }
    }
    return hist;
}

AccumulationResult accumulation_check(int chain_depth, double eps_mm) {
    if (chain_depth < 2) {
        throw ValidationError("chain_depth must be >= 2");
    }
    if (!(eps_mm >= 0.0)) {
        throw ValidationError("eps_mm must be non-negative");
    }
    constexpr double kBone = 100.0;

    std::vector<int> parents(chain_depth);
    std::vector<std::string> names(chain_depth);
    JointSet rest;
    JointSet target;
    rest.tag = JointTag::Template;
    target.tag = JointTag::Predicted;
    for (int k = 0; k < chain_depth; ++k) {
        parents[k] = k - 1;
        names[k] = "joint_" + std::to_string(k);
        rest.positions.emplace_back(0.0, kBone * k, 0.0);
        target.positions.emplace_back(0.0, (kBone + eps_mm) * k, 0.0);
    }
    const KinematicTree tree(parents, names);
    const TwistSet twists(chain_depth - 1, TwistAngle{});

    const SolveReport naive = solve(tree, rest, target, twists, std::nullopt, SolveMode::Naive);
    const SolveReport adaptive =
        solve(tree, rest, target, twists, std::nullopt, SolveMode::Adaptive);

    AccumulationResult result;
    for (int k = 1; k < chain_depth; ++k) {
        result.naive_measured.push_back(naive.per_joint_error[k]);
        result.adaptive_measured.push_back(adaptive.per_joint_error[k]);
        result.naive_predicted.push_back(k * eps_mm);
        result.adaptive_predicted.push_back(eps_mm);
        result.adaptive_step_error.push_back(adaptive.bone_eps[k]);
    }
    return result;
}

}  // namespace hybrik
