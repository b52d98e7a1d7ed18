#include "curvespec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "curvespec/errors.hpp"

namespace curvespec {

namespace {

Json real_rows(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd parse_rows(const Json& rows, std::size_t n, const char* name) {
    if (!rows.is_array() || rows.size() != n)
        throw ValidationError(std::string("matrix JSON: \"") + name + "\" must have n rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const Json& row = rows[r];
        if (!row.is_array() || row.size() != n)
            throw ValidationError(std::string("matrix JSON: row ") + std::to_string(r) + " of \"" + name +
                                  "\" must have n entries");
        for (std::size_t c = 0; c < n; ++c) {
            if (!row[c].is_number())
                throw ValidationError(std::string("matrix JSON: non-numeric entry in \"") + name + "\"");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    return m;
}

Json cell_json(const Cell2D& c) { return Json::array({c.col, c.row}); }

Json real_vector(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json complex_vector(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
    return a;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("re"))
        throw ValidationError("matrix JSON must be an object with \"n\" and \"re\"");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        throw ValidationError("matrix JSON: \"n\" must be a positive integer");
    const auto n = static_cast<std::size_t>(j["n"].get<long long>());
    const Eigen::MatrixXd re = parse_rows(j["re"], n, "re");
    const Eigen::MatrixXd im =
        j.contains("im") ? parse_rows(j["im"], n, "im")
                         : Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Matrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json j;
    j["n"] = m.rows();
    j["re"] = real_rows(m.real());
    j["im"] = real_rows(m.imag());
    return j;
}

Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read input file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("input file '" + path + "' is not valid JSON: " + e.what());
    }
    return matrix_from_json(j);
}

Json to_json(const GridSet2D& set) {
    Json j;
    j["depth"] = set.depth;
    j["cells"] = Json::array();
    for (const auto& c : set.cells) j["cells"].push_back(cell_json(c));
    return j;
}

Json to_json(const GridSet1D& set) {
    Json j;
    j["depth"] = set.depth;
    j["intervals"] = set.intervals;
    return j;
}

GridSet2D grid2d_from_json(const Json& j) {
    try {
        const int depth = j.at("depth").get<int>();
        std::vector<Cell2D> cells;
        for (const auto& c : j.at("cells")) cells.push_back({depth, c.at(0).get<Index>(), c.at(1).get<Index>()});
        return GridSet2D(depth, std::move(cells));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("GridSet2D JSON: ") + e.what());
    }
}

GridSet1D grid1d_from_json(const Json& j) {
    try {
        return GridSet1D(j.at("depth").get<int>(), j.at("intervals").get<std::vector<Index>>());
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("GridSet1D JSON: ") + e.what());
    }
}

Json to_json(const SelectionTable& ts) {
    Json j;
    j["depth"] = ts.depth();
    j["entries"] = Json::array();
    for (const auto& e : ts.entries()) {
        Json entry;
        entry["cell"] = cell_json(e.cell);
        entry["t_num"] = e.t_num;
        entry["t_den"] = ts.denominator();
        j["entries"].push_back(std::move(entry));
    }
    return j;
}

SelectionTable selection_from_json(const Json& j) {
    try {
        const int depth = j.at("depth").get<int>();
        std::vector<Cell2D> cells;
        for (const auto& e : j.at("entries"))
            cells.push_back({depth, e.at("cell").at(0).get<Index>(), e.at("cell").at(1).get<Index>()});
        SelectionTable ts = build_selection(GridSet2D(depth, cells));
        for (const auto& e : j.at("entries")) {
            const Cell2D cell{depth, e.at("cell").at(0).get<Index>(), e.at("cell").at(1).get<Index>()};
            if (e.at("t_den").get<Index>() != ts.denominator() || e.at("t_num").get<Index>() != ts.psi_index(cell))
                throw ValidationError("selection JSON: stored ψ value disagrees with the curve");
        }
        return ts;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("selection JSON: ") + e.what());
    }
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const AffineFrame& frame) {
    Json j;
    j["center"] = complex_to_json(frame.center);
    j["scale"] = frame.scale;
    return j;
}

Json model_to_json(const SpectralModel& model) {
    Json j;
    j["n"] = model.eigen.values.size();
    j["norm"] = model.norm;
    j["normality_defect"] = model.normality_defect;
    j["eigen_backend"] = model.eigen.backend;
    j["eigen_residual"] = model.eigen.residual;
    j["eigen_unitarity_error"] = model.eigen.unitarity_error;
    j["multiplication_residual"] = model.multiplication_residual;
    j["cyclic_vector"] = complex_vector(model.cyclic);
    j["eigenvalues"] = complex_vector(model.eigen.values);
    j["eigen_weights"] = model.eigen_weights;
    j["atom_of_eigenpair"] = model.atom_of_eigenpair;
    j["multiplicity_free"] = model.mu.atoms.size() == static_cast<std::size_t>(model.eigen.values.size());
    Json atoms = Json::array();
    for (const auto& a : model.mu.atoms) {
        Json atom;
        atom["point"] = complex_to_json(a.point);
        atom["weight"] = a.weight;
        atoms.push_back(std::move(atom));
    }
    j["atoms"] = std::move(atoms);
    j["total_mass"] = model.mu.total_mass();
    return j;
}

Json to_json(const DiagonalSplit& split, bool include_matrices) {
    Json j;
    j["n"] = split.diagonal.size();
    j["window_width"] = split.window_width;
    j["window_count"] = split.window_count;
    j["diagonal"] = real_vector(split.diagonal);
    Json steps = Json::array();
    for (const auto& s : split.steps) {
        Json step;
        step["step"] = s.step;
        step["seed"] = s.seed;
        step["pass"] = s.pass;
        step["window"] = Json::array({s.window_lo, s.window_hi});
        step["mu"] = s.center;
        step["mass"] = s.mass;
        step["residual"] = s.residual;
        step["delta"] = s.delta;
        step["within_delta"] = s.within_delta;
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    Json skipped = Json::array();
    for (const auto& s : split.skipped) {
        Json entry;
        entry["seed"] = s.seed;
        entry["pass"] = s.pass;
        entry["residual_norm"] = s.residual_norm;
        skipped.push_back(std::move(entry));
    }
    j["skipped_seeds"] = std::move(skipped);
    j["basis_unitarity_error"] = split.unitarity_error;
    j["residuals_within_delta"] = split.residuals_within_delta;
    j["hs_norm_C"] = split.hs_norm;
    j["hs_bound"] = split.hs_bound;
    j["hs_within_bound"] = split.hs_within_bound;
    j["C_singular_values"] = spectra_to_json(truncated_singular_values(split.remainder));
    if (include_matrices) {
        j["F"] = matrix_to_json(split.basis);
        j["C"] = matrix_to_json(split.remainder);
    }
    return j;
}

Json telescoping_to_json(const std::vector<TelescopingCheck>& checks) {
    Json a = Json::array();
    for (const auto& c : checks) {
        Json entry;
        entry["k"] = c.power;
        entry["residual"] = c.residual;
        entry["tolerance"] = c.tolerance;
        entry["ok"] = c.ok;
        a.push_back(std::move(entry));
    }
    return a;
}

Json spectra_to_json(const std::vector<TruncatedSpectrum>& spectra) {
    Json a = Json::array();
    for (const auto& s : spectra) {
        Json entry;
        entry["size"] = s.size;
        entry["singular_values"] = s.singular_values;
        a.push_back(std::move(entry));
    }
    return a;
}

Json assembly_model_json(const AssemblyReport& rep) {
    Json j = model_to_json(rep.model);
    j["frame"] = to_json(rep.normalized.frame);
    Json gamma = Json::array();
    const Index den = pow9(rep.push.gamma.depth);
    for (std::size_t k = 0; k < rep.push.gamma.atoms.size(); ++k) {
        Json atom;
        atom["t_num"] = rep.push.gamma.atoms[k].index;
        atom["t_den"] = den;
        atom["t"] = rep.push.gamma.point(k);
        atom["weight"] = rep.push.gamma.atoms[k].weight;
        gamma.push_back(std::move(atom));
    }
    j["gamma"] = std::move(gamma);
    j["gamma_total_mass"] = rep.push.gamma.total_mass();
    j["pushforward_target"] = rep.push.target;
    j["B_diagonal"] = real_vector(rep.b.diagonal());
    j["phi_B_diagonal"] = complex_vector(rep.phi_b.diagonal());
    j["reconstruction_error"] = rep.reconstruction_error;
    j["reconstruction_bound"] = rep.reconstruction_bound;
    j["transport_unitarity_error"] = rep.transport_unitarity_error;
    j["transport_norm_error"] = rep.transport_norm_error;
    j["transport_roundtrip_error"] = rep.transport_roundtrip_error;
    return j;
}

Json assembly_decomposition_json(const AssemblyReport& rep) {
    Json j;
    j["dimension"] = rep.h.rows();
    j["rotation_seed"] = rep.options.seed;
    j["split"] = to_json(rep.split);
    Json approx = Json::array();
    for (const auto& p : rep.approximants) {
        Json entry;
        entry["degree"] = p.degree;
        entry["fitted_degree"] = p.fitted_degree;
        entry["sup_error"] = p.sup_error;
        entry["sup_error_re"] = p.sup_error_re;
        entry["sup_error_im"] = p.sup_error_im;
        entry["sampled_error"] = p.sampled_error;
        entry["samples"] = p.samples;
        Json coeffs = Json::array();
        for (Complex c : p.coefficients) coeffs.push_back(complex_to_json(c));
        entry["chebyshev_coefficients"] = std::move(coeffs);
        approx.push_back(std::move(entry));
    }
    j["approximants"] = std::move(approx);
    Json traces = Json::array();
    for (const auto& t : rep.traces) {
        Json entry;
        entry["degree"] = t.degree;
        entry["sup_error"] = t.sup_error;
        entry["cn_minus_l"] = t.cn_minus_l;
        entry["cn_bound"] = t.cn_bound;
        entry["cn_norm"] = t.cn_norm;
        entry["h_calculus_error"] = t.h_calculus_error;
        entry["d_calculus_error"] = t.d_calculus_error;
        traces.push_back(std::move(entry));
    }
    j["cn_trace"] = std::move(traces);
    j["cn_nonincreasing"] = rep.cn_nonincreasing;
    j["cn_within_bound"] = rep.cn_within_bound;
    j["calculus_within_bound"] = rep.calculus_within_bound;
    j["L_norm"] = rep.l_norm;
    j["identity_residual"] = rep.identity_residual;
    j["identity_tolerance"] = rep.identity_tolerance;
    j["oracle_gap"] = rep.oracle_gap;
    j["telescoping"] = telescoping_to_json(rep.telescoping);
    j["C_singular_values"] = spectra_to_json(rep.c_spectrum);
    j["L_singular_values"] = spectra_to_json(rep.l_spectrum);
    return j;
}

std::string traces_csv(const AssemblyReport& rep) {
    std::ostringstream os;
    os << "degree,fitted_degree,sup_error,cn_minus_l,cn_bound,cn_norm,h_calculus_error,d_calculus_error\n";
    for (const auto& t : rep.traces)
        os << t.degree << ',' << t.fitted_degree << ',' << format_double(t.sup_error) << ','
           << format_double(t.cn_minus_l) << ',' << format_double(t.cn_bound) << ',' << format_double(t.cn_norm)
           << ',' << format_double(t.h_calculus_error) << ',' << format_double(t.d_calculus_error) << '\n';
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

}  // namespace curvespec
