#include "hybrik/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace hybrik {

double round_sig(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

namespace {

double emit(double v, bool full_precision) { return full_precision ? v : round_sig(v); }

Json vec3_json(const Vec3& v, bool full) {
    return Json::array({emit(v.x(), full), emit(v.y(), full), emit(v.z(), full)});
}

Json load_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("'" + path.string() + "': top level must be an object");
    }
    return doc;
}

const Json& require_field(const Json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw ParseError(std::string("missing field '") + name + "'");
    }
    return *it;
}

void check_format_version(const Json& doc) {
    const Json& v = require_field(doc, "format_version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
        throw ParseError("unsupported format_version (expected " +
                         std::to_string(kFormatVersion) + ")");
    }
}

double as_number(const Json& j, const char* what) {
    if (!j.is_number()) {
        throw ParseError(std::string("field '") + what + "' must contain numbers");
    }
    return j.get<double>();
}

std::vector<Vec3> parse_positions(const Json& j, const char* what) {
    if (!j.is_array()) {
        throw ParseError(std::string("field '") + what + "' must be an array of [x, y, z]");
    }
    std::vector<Vec3> out;
    out.reserve(j.size());
    for (const Json& row : j) {
        if (!row.is_array() || row.size() != 3) {
            throw ParseError(std::string("field '") + what + "' must be an array of [x, y, z]");
        }
        out.emplace_back(as_number(row[0], what), as_number(row[1], what),
                         as_number(row[2], what));
    }
    return out;
}

Eigen::MatrixXd parse_matrix(const Json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ParseError(std::string("field '") + what + "' must be a 2D array");
    }
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw ParseError(std::string("field '") + what + "' has ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                as_number(j[r][c], what);
        }
    }
    return m;
}

Json matrix_json(const Eigen::MatrixXd& m, bool full) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(emit(m(r, c), full));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_document(const Json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write '" + path.string() + "'");
    }
    out << doc.dump(1) << '\n';
}

}  // namespace

Json positions_to_json(const std::vector<Vec3>& positions, bool full_precision) {
    Json out = Json::array();
    for (const Vec3& p : positions) {
        out.push_back(vec3_json(p, full_precision));
    }
    return out;
}

Json matrix_rowmajor_to_json(const Mat3& m, bool full_precision) {
    Json out = Json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            out.push_back(emit(m(r, c), full_precision));
        }
    }
    return out;
}

PoseFile load_pose(const std::filesystem::path& path) {
    const Json doc = load_document(path);
    check_format_version(doc);

    PoseFile pose;
    if (doc.contains("joints")) {
        pose.joints = parse_positions(doc["joints"], "joints");
    }
    if (doc.contains("rotations")) {
        const Json& j = doc["rotations"];
        if (!j.is_array()) {
            throw ParseError("field 'rotations' must be an array of 9-number rows");
        }
        std::vector<Mat3> rotations;
        rotations.reserve(j.size());
        for (const Json& row : j) {
            if (!row.is_array() || row.size() != 9) {
                throw ParseError("field 'rotations' must be an array of 9-number rows");
            }
            Mat3 m;
            for (int i = 0; i < 9; ++i) {
                m(i / 3, i % 3) = as_number(row[i], "rotations");
            }
            rotations.push_back(m);
        }
        pose.rotations = std::move(rotations);
    }
    if (doc.contains("twists")) {
        const Json& j = doc["twists"];
        if (!j.is_array()) {
            throw ParseError("field 'twists' must be an array of [cos, sin]");
        }
        std::vector<std::array<double, 2>> twists;
        twists.reserve(j.size());
        for (const Json& row : j) {
            if (!row.is_array() || row.size() != 2) {
                throw ParseError("field 'twists' must be an array of [cos, sin]");
            }
            twists.push_back({as_number(row[0], "twists"), as_number(row[1], "twists")});
        }
        pose.twists = std::move(twists);
    }
    if (doc.contains("beta")) {
        const Json& j = doc["beta"];
        if (!j.is_array() || j.size() != ShapeCoeffs::kCount) {
            throw ParseError("field 'beta' must hold " + std::to_string(ShapeCoeffs::kCount) +
                             " numbers");
        }
        std::array<double, ShapeCoeffs::kCount> beta{};
        for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
            beta[i] = as_number(j[i], "beta");
            if (!std::isfinite(beta[i])) {
                throw ParseError("field 'beta' must be finite");
            }
        }
        for (double b : beta) {
            if (std::abs(b) > 5.0) {
                std::cerr << "warning: '" << path.string()
                          << "': beta entry outside the plausible range [-5, 5]\n";
                break;
            }
        }
        pose.beta = beta;
    }
    if (!pose.joints && !pose.rotations) {
        throw ParseError("pose file needs at least one of 'joints' or 'rotations'");
    }
    return pose;
}

void save_pose(const PoseFile& pose, const std::filesystem::path& path, bool full_precision) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    if (pose.joints) {
        doc["joints"] = positions_to_json(*pose.joints, full_precision);
    }
    if (pose.rotations) {
        Json rows = Json::array();
        for (const Mat3& m : *pose.rotations) {
            rows.push_back(matrix_rowmajor_to_json(m, full_precision));
        }
        doc["rotations"] = std::move(rows);
    }
    if (pose.twists) {
        Json rows = Json::array();
        for (const auto& t : *pose.twists) {
            rows.push_back(Json::array({emit(t[0], full_precision), emit(t[1], full_precision)}));
        }
        doc["twists"] = std::move(rows);
    }
    if (pose.beta) {
        Json row = Json::array();
        for (double b : *pose.beta) {
            row.push_back(emit(b, full_precision));
        }
        doc["beta"] = std::move(row);
    }
    write_document(doc, path);
}

BodyModel load_model(const std::filesystem::path& path) {
    const Json doc = load_document(path);
    check_format_version(doc);

    const Json& names_j = require_field(doc, "names");
    const Json& parents_j = require_field(doc, "parents");
    if (!names_j.is_array() || !parents_j.is_array() || names_j.size() != parents_j.size()) {
        throw ParseError("fields 'names' and 'parents' must be arrays of equal length");
    }
    std::vector<std::string> names;
    std::vector<int> parents;
    for (std::size_t i = 0; i < names_j.size(); ++i) {
        if (!names_j[i].is_string() || !parents_j[i].is_number_integer()) {
            throw ParseError("fields 'names'/'parents' must hold strings and integers");
        }
        names.push_back(names_j[i].get<std::string>());
        parents.push_back(parents_j[i].get<int>());
    }

    BodyModel model;
    model.tree = KinematicTree(parents, names);
    const int k_total = model.tree.joint_count();

    const Eigen::MatrixXd mean = parse_matrix(require_field(doc, "mean_vertices"), "mean_vertices");
    if (mean.cols() != 3) {
        throw DimensionMismatch("field 'mean_vertices' must have 3 columns");
    }
    model.mean_vertices = mean;
    const int n = model.vertex_count();

    const Json& basis_j = require_field(doc, "shape_basis");
    const Json& dims_j = require_field(basis_j, "dims");
    const Json& data_j = require_field(basis_j, "data");
    if (!dims_j.is_array() || dims_j.size() != 3 || !data_j.is_array()) {
        throw ParseError("field 'shape_basis' must hold 'dims' [N, 3, 10] and flat 'data'");
    }
    const auto d0 = dims_j[0].get<long>();
    const auto d1 = dims_j[1].get<long>();
    const auto d2 = dims_j[2].get<long>();
    if (d0 != n || d1 != 3 || d2 != ShapeCoeffs::kCount) {
        throw DimensionMismatch("field 'shape_basis' dims must be [" + std::to_string(n) +
                                ", 3, " + std::to_string(ShapeCoeffs::kCount) + "]");
    }
    if (static_cast<long>(data_j.size()) != d0 * d1 * d2) {
        throw DimensionMismatch("field 'shape_basis' data length does not match dims");
    }
    for (auto& b : model.shape_basis) {
        b.resize(n, 3);
    }
    // Row-major flattening: index = (vertex * 3 + axis) * 10 + component.
    std::size_t flat = 0;
    for (int v = 0; v < n; ++v) {
        for (int axis = 0; axis < 3; ++axis) {
            for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
                model.shape_basis[i](v, axis) = as_number(data_j[flat++], "shape_basis");
            }
        }
    }

    model.joint_regressor = parse_matrix(require_field(doc, "joint_regressor"), "joint_regressor");
    model.skin_weights = parse_matrix(require_field(doc, "skin_weights"), "skin_weights");
    if (model.joint_regressor.rows() != k_total || model.joint_regressor.cols() != n ||
        model.skin_weights.rows() != n || model.skin_weights.cols() != k_total) {
        throw DimensionMismatch("regressor/skin-weight shapes do not match the tree and mesh");
    }

    if (doc.contains("eval_regressors")) {
        const Json& evals = doc["eval_regressors"];
        if (!evals.is_object()) {
            throw ParseError("field 'eval_regressors' must map names to matrices");
        }
        for (const auto& [name, value] : evals.items()) {
            model.eval_regressors[name] = parse_matrix(value, "eval_regressors");
        }
    }

    model.validate();
    return model;
}

void save_model(const BodyModel& model, const std::filesystem::path& path, bool full_precision) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["names"] = model.tree.names();
    doc["parents"] = model.tree.parents();
    doc["mean_vertices"] = matrix_json(model.mean_vertices, full_precision);

    const int n = model.vertex_count();
    Json data = Json::array();
    for (int v = 0; v < n; ++v) {
        for (int axis = 0; axis < 3; ++axis) {
            for (int i = 0; i < ShapeCoeffs::kCount; ++i) {
                data.push_back(emit(model.shape_basis[i](v, axis), full_precision));
            }
        }
    }
    doc["shape_basis"] = Json{{"dims", Json::array({n, 3, ShapeCoeffs::kCount})},
                              {"data", std::move(data)}};
    doc["joint_regressor"] = matrix_json(model.joint_regressor, full_precision);
    doc["skin_weights"] = matrix_json(model.skin_weights, full_precision);
    if (!model.eval_regressors.empty()) {
        Json evals;
        for (const auto& [name, reg] : model.eval_regressors) {
            evals[name] = matrix_json(reg, full_precision);
        }
        doc["eval_regressors"] = std::move(evals);
    }
    write_document(doc, path);
}

void save_mesh(const PosedMesh& mesh, const std::filesystem::path& path, bool full_precision) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["vertices"] = matrix_json(mesh.vertices, full_precision);
    write_document(doc, path);
}

std::vector<Vec3> require_joints(const PoseFile& pose) {
    if (!pose.joints) {
        throw ParseError("pose file is missing field 'joints'");
    }
    return *pose.joints;
}

RotationSet require_rotations(const PoseFile& pose) {
    if (!pose.rotations) {
        throw ParseError("pose file is missing field 'rotations'");
    }
    RotationSet out;
    out.relative.reserve(pose.rotations->size());
    for (const Mat3& m : *pose.rotations) {
        out.relative.push_back(Rotation::from_matrix(m));
    }
    return out;
}

TwistSet require_twists(const PoseFile& pose) {
    if (!pose.twists) {
        throw ParseError("pose file is missing field 'twists'");
    }
    TwistSet out;
    out.reserve(pose.twists->size());
    for (const auto& t : *pose.twists) {
        out.push_back(TwistAngle::from_pair(t[0], t[1]));
    }
    return out;
}

ShapeCoeffs require_beta(const PoseFile& pose) {
    if (!pose.beta) {
        throw ParseError("pose file is missing field 'beta'");
    }
    ShapeCoeffs coeffs;
    coeffs.beta = *pose.beta;
    return coeffs;
}

}  // namespace hybrik
