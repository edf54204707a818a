#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hybrik/harness.hpp"
#include "hybrik/io.hpp"
#include "hybrik/metrics.hpp"
#include "hybrik/version.hpp"

namespace py = pybind11;
using namespace hybrik;

namespace {

ShapeCoeffs to_beta(const std::optional<Eigen::VectorXd>& beta) {
    ShapeCoeffs out;
    if (beta) {
        if (beta->size() != ShapeCoeffs::kCount) {
            throw DimensionMismatch("beta must hold 10 coefficients");
        }
        for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
            out.beta[i] = (*beta)(i);
        }
    }
    return out;
}

JointSet to_joints(const Eigen::MatrixX3d& m, JointTag tag) {
    JointSet out;
    out.tag = tag;
    out.positions.reserve(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out.positions.emplace_back(m.row(r).transpose());
    }
    return out;
}

Eigen::MatrixX3d from_joints(const JointSet& joints) {
    Eigen::MatrixX3d out(joints.positions.size(), 3);
    for (std::size_t r = 0; r < joints.positions.size(); ++r) {
        out.row(r) = joints.positions[r].transpose();
    }
    return out;
}

RotationSet to_rotations(const std::vector<Mat3>& mats) {
    RotationSet out;
    out.relative.reserve(mats.size());
    for (const Mat3& m : mats) {
        out.relative.push_back(Rotation::from_matrix(m));
    }
    return out;
}

std::vector<Mat3> from_rotations(const RotationSet& rot) {
    std::vector<Mat3> out;
    out.reserve(rot.relative.size());
    for (const Rotation& r : rot.relative) {
        out.push_back(r.matrix());
    }
    return out;
}

// (K-1,) radians or (K-1, 2) cos/sin pairs
TwistSet to_twists(const py::array_t<double>& arr) {
    TwistSet out;
    if (arr.ndim() == 1) {
        const auto a = arr.unchecked<1>();
        for (py::ssize_t i = 0; i < a.shape(0); ++i) {
            out.push_back(TwistAngle::from_angle(a(i)));
        }
    } else if (arr.ndim() == 2 && arr.shape(1) == 2) {
        const auto a = arr.unchecked<2>();
        for (py::ssize_t i = 0; i < a.shape(0); ++i) {
            out.push_back(TwistAngle::from_pair(a(i, 0), a(i, 1)));
        }
    } else {
        throw DimensionMismatch("twists must have shape (K-1,) or (K-1, 2)");
    }
    return out;
}

py::array_t<double> twist_angles(const TwistSet& twists) {
    py::array_t<double> out(static_cast<py::ssize_t>(twists.size()));
    auto a = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < twists.size(); ++i) {
        a(static_cast<py::ssize_t>(i)) = twists[i].angle();
    }
    return out;
}

SolveMode to_mode(const std::string& mode) {
    if (mode == "naive") {
        return SolveMode::Naive;
    }
    if (mode == "adaptive") {
        return SolveMode::Adaptive;
    }
    throw ValidationError("mode must be 'naive' or 'adaptive'");
}

std::optional<RootTriple> default_triple(const BodyModel& model) {
    if (model.tree.index_of("spine") && model.tree.index_of("left_hip") &&
        model.tree.index_of("right_hip")) {
        return RootTriple::from_names(model.tree);
    }
    return std::nullopt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Twist-and-swing inverse kinematics for articulated body models";
    m.attr("__version__") = kVersion;

    const auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());

    py::class_<BodyModel>(m, "Model")
        .def_static("toy_biped", &toy_biped, "the bundled synthetic 24-joint biped")
        .def_static("load", &load_model, py::arg("path"))
        .def("save", &save_model, py::arg("path"), py::arg("full_precision") = false)
        .def_property_readonly("names",
                               [](const BodyModel& model) { return model.tree.names(); })
        .def_property_readonly("parents",
                               [](const BodyModel& model) { return model.tree.parents(); })
        .def_property_readonly("joint_count", &BodyModel::joint_count)
        .def_property_readonly("vertex_count", &BodyModel::vertex_count)
        .def_property_readonly("eval_regressor_names",
                               [](const BodyModel& model) {
                                   std::vector<std::string> names;
                                   for (const auto& [name, reg] : model.eval_regressors) {
                                       names.push_back(name);
                                   }
                                   return names;
                               })
        .def("__repr__", [](const BodyModel& model) {
            return "<hybrik.Model joints=" + std::to_string(model.joint_count()) +
                   " vertices=" + std::to_string(model.vertex_count()) + ">";
        });

    m.def(
        "rest_pose",
        [](const BodyModel& model, const std::optional<Eigen::VectorXd>& beta) {
            return from_joints(rest_pose_from_shape(model, to_beta(beta)));
        },
        py::arg("model"), py::arg("beta") = std::nullopt,
        "rest-pose joints (K, 3) for shape coefficients beta");

    m.def(
        "fk",
        [](const BodyModel& model, const std::vector<Mat3>& rotations,
           const std::optional<Eigen::VectorXd>& beta) {
            const JointSet rest = rest_pose_from_shape(model, to_beta(beta));
            return from_joints(fk(model.tree, rest, to_rotations(rotations)));
        },
        py::arg("model"), py::arg("rotations"), py::arg("beta") = std::nullopt,
        "forward kinematics: per-joint relative rotations (K, 3, 3) -> joints (K, 3)");

    m.def(
        "solve",
        [](const BodyModel& model, const Eigen::MatrixX3d& joints,
           const py::array_t<double>& twists, const std::optional<Eigen::VectorXd>& beta,
           const std::string& mode) {
            const JointSet rest = rest_pose_from_shape(model, to_beta(beta));
            const SolveReport report =
                solve(model.tree, rest, to_joints(joints, JointTag::Predicted),
                      to_twists(twists), default_triple(model), to_mode(mode));
            py::dict out;
            out["rotations"] = from_rotations(report.rotations);
            out["joints"] = from_joints(report.reconstructed);
            out["per_joint_error"] = report.per_joint_error;
            out["bone_eps"] = report.bone_eps;
            out["root_translation"] = Eigen::Vector3d(report.root_translation);
            std::vector<std::string> degenerate;
            for (int j : report.degenerate_swings) {
                degenerate.push_back(model.tree.name(j));
            }
            out["degenerate_joints"] = degenerate;
            return out;
        },
        py::arg("model"), py::arg("joints"), py::arg("twists"),
        py::arg("beta") = std::nullopt, py::arg("mode") = "adaptive",
        "inverse kinematics: target joints (K, 3) + twists -> rotations and report");

    m.def(
        "skin",
        [](const BodyModel& model, const std::vector<Mat3>& rotations,
           const std::optional<Eigen::VectorXd>& beta) {
            return skin(model, to_beta(beta), to_rotations(rotations)).vertices;
        },
        py::arg("model"), py::arg("rotations"), py::arg("beta") = std::nullopt,
        "linear blend skinning -> vertices (N, 3)");

    m.def(
        "regress",
        [](const BodyModel& model, const std::string& name, const Eigen::MatrixX3d& vertices) {
            const auto it = model.eval_regressors.find(name);
            if (it == model.eval_regressors.end()) {
                throw ValidationError("model has no eval regressor named '" + name + "'");
            }
            PosedMesh mesh;
            mesh.vertices = vertices;
            return from_joints(regress_joints(it->second, mesh));
        },
        py::arg("model"), py::arg("name"), py::arg("vertices"),
        "evaluation joints regressed from mesh vertices");

    m.def(
        "extract_twists",
        [](const BodyModel& model, const std::vector<Mat3>& rotations,
           const std::optional<Eigen::VectorXd>& beta) {
            const JointSet rest = rest_pose_from_shape(model, to_beta(beta));
            return twist_angles(extract_twists(model.tree, rest, to_rotations(rotations)));
        },
        py::arg("model"), py::arg("rotations"), py::arg("beta") = std::nullopt,
        "per-joint twist angles (radians) of the relative rotations");

    m.def(
        "gen_random_pose",
        [](const BodyModel& model, std::uint64_t seed,
           const std::optional<Eigen::VectorXd>& beta, double twist_min, double twist_max,
           double swing_max) {
            const GeneratedPose pose = gen_random_pose(model, to_beta(beta), seed, twist_min,
                                                       twist_max, swing_max);
            py::dict out;
            out["rotations"] = from_rotations(pose.rotations);
            out["joints"] = from_joints(pose.target);
            out["twists"] = twist_angles(pose.twists);
            return out;
        },
        py::arg("model"), py::arg("seed"), py::arg("beta") = std::nullopt,
        py::arg("twist_min") = -2.6, py::arg("twist_max") = 2.6, py::arg("swing_max") = 1.0,
        "sample a random pose; returns rotations, fk joints and ground-truth twists");

    m.def(
        "rodrigues",
        [](const Vec3& axis, double angle) { return rodrigues(axis, angle).matrix(); },
        py::arg("axis"), py::arg("angle"));
    m.def(
        "swing_between",
        [](const Vec3& t, const Vec3& p) { return swing_between(t, p).matrix(); },
        py::arg("t"), py::arg("p"));
    m.def(
        "twist_about",
        [](const Vec3& t, double angle) {
            return twist_about(t, TwistAngle::from_angle(angle)).matrix();
        },
        py::arg("t"), py::arg("angle"));
    m.def(
        "compose_twist_swing",
        [](const Vec3& t, const Vec3& p, double angle) {
            return compose_twist_swing(t, p, TwistAngle::from_angle(angle)).matrix();
        },
        py::arg("t"), py::arg("p"), py::arg("angle"));
    m.def(
        "extract_twist_swing",
        [](const Mat3& r, const Vec3& t) {
            const TwistSwing split = extract_twist_swing(Rotation::from_matrix(r), t);
            return py::make_tuple(split.swing.matrix(), split.twist.angle());
        },
        py::arg("rotation"), py::arg("t"),
        "split a rotation into (swing matrix, twist angle) about t");

    m.def(
        "solve_root_rotation",
        [](const Eigen::MatrixX3d& rest, const Eigen::MatrixX3d& target,
           const std::array<int, 3>& triple) {
            return solve_root_rotation(to_joints(rest, JointTag::Template),
                                       to_joints(target, JointTag::Predicted),
                                       RootTriple{triple})
                .matrix();
        },
        py::arg("rest"), py::arg("target"), py::arg("triple"),
        "closed-form global rotation registering the root triple");

    m.def(
        "mpjpe",
        [](const Eigen::MatrixX3d& pred, const Eigen::MatrixX3d& gt, bool root_align) {
            return mpjpe(to_joints(pred, JointTag::Predicted),
                         to_joints(gt, JointTag::Reconstructed), root_align);
        },
        py::arg("pred"), py::arg("gt"), py::arg("root_align") = true);
    m.def(
        "pa_mpjpe",
        [](const Eigen::MatrixX3d& pred, const Eigen::MatrixX3d& gt) {
            return pa_mpjpe(to_joints(pred, JointTag::Predicted),
                            to_joints(gt, JointTag::Reconstructed));
        },
        py::arg("pred"), py::arg("gt"));
    m.def(
        "pve",
        [](const Eigen::MatrixX3d& pred, const Eigen::MatrixX3d& gt) {
            PosedMesh a;
            PosedMesh b;
            a.vertices = pred;
            b.vertices = gt;
            return pve(a, b);
        },
        py::arg("pred"), py::arg("gt"));
}
