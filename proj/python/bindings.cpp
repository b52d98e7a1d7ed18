#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvespec/calculus.hpp"
#include "curvespec/cli.hpp"
#include "curvespec/errors.hpp"
#include "curvespec/io.hpp"

namespace py = pybind11;
using namespace curvespec;

namespace {

Vector cyclic_or_default(const std::optional<Vector>& x, Eigen::Index n) {
    if (!x) return default_cyclic_vector(n);
    if (x->size() != n) throw ValidationError("cyclic vector length does not match the matrix");
    const double norm = x->norm();
    if (!(norm > 0.0)) throw ValidationError("cyclic vector must be non-zero");
    return *x / norm;
}

std::string selection_json(const std::vector<Complex>& points, int depth) {
    const NormalizedSpectrum ns = normalize_spectrum(points, depth);
    const SelectionTable ts = build_selection(ns.cover);
    Json j = to_json(ts);
    j["frame"] = to_json(ns.frame);
    j["lambda"] = to_json(ts.lambda_cells());
    j["k"] = to_json(ts.k());
    return j.dump();
}

py::dict split(const Matrix& h, const std::vector<double>& delta) {
    std::vector<double> schedule = delta;
    if (schedule.size() == 1) schedule.assign(static_cast<std::size_t>(h.rows()), delta.front());
    const DiagonalSplit w = split_diagonal(h, schedule);
    py::dict d;
    d["basis"] = w.basis;
    d["diagonal"] = w.diagonal;
    d["remainder"] = w.remainder;
    d["report"] = to_json(w).dump();
    return d;
}

py::dict pipeline(const Matrix& a, int depth, std::vector<int> degrees, std::vector<double> delta,
                  std::uint64_t seed, const std::optional<Vector>& x) {
    AssemblyOptions o;
    o.depth = depth;
    o.degrees = std::move(degrees);
    o.delta = std::move(delta);
    o.seed = seed;
    const NormalMatrix na(a);
    const AssemblyReport rep = assemble_model(na, cyclic_or_default(x, na.dim()), o);
    py::dict d;
    d["model"] = assembly_model_json(rep).dump();
    d["decomposition"] = assembly_decomposition_json(rep).dump();
    d["traces_csv"] = traces_csv(rep);
    d["a_model"] = rep.a_model;
    d["phi_d"] = rep.phi_d;
    d["l"] = rep.l;
    d["h"] = rep.h;
    d["b"] = rep.b;
    return d;
}

py::tuple cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_curvespec, m) {
    m.doc() = "Peano-curve spectral models of normal matrices";
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ArithmeticError);

    m.def("cell_of_interval", [](int depth, Index j) {
        const Cell2D c = cell_of_interval({depth, j});
        return py::make_tuple(c.col, c.row);
    }, py::arg("depth"), py::arg("j"));
    m.def("interval_of_cell", [](int depth, Index col, Index row) {
        return interval_of_cell({depth, col, row}).index;
    }, py::arg("depth"), py::arg("col"), py::arg("row"));
    m.def("eval_point", [](double t, int depth) {
        const Point2 p = eval_point(t, depth);
        return py::make_tuple(p.x, p.y);
    }, py::arg("t"), py::arg("depth"));
    m.def("curve_vertex", [](int depth, Index j) {
        const Point2 p = curve_vertex(depth, j);
        return py::make_tuple(p.x, p.y);
    }, py::arg("depth"), py::arg("j"));
    m.def("surjectivity", [](int depth) {
        const SurjectivityReport r = surjectivity_report(depth);
        py::dict d;
        d["depth"] = r.depth;
        d["cell_count"] = r.cell_count;
        d["covered"] = r.covered;
        d["multiply_hit"] = r.multiply_hit;
        d["bijection"] = r.bijection;
        return d;
    }, py::arg("depth"));
    m.def("_selection_json", &selection_json, py::arg("points"), py::arg("depth"));
    m.def("_model_json", [](const Matrix& a, const std::optional<Vector>& x) {
        const NormalMatrix na(a);
        return model_to_json(build_model(na, cyclic_or_default(x, na.dim()))).dump();
    }, py::arg("a"), py::arg("x") = py::none());
    m.def("_split", &split, py::arg("h"), py::arg("delta"));
    m.def("_pipeline", &pipeline, py::arg("a"), py::arg("depth"), py::arg("degrees"), py::arg("delta"),
          py::arg("seed"), py::arg("x") = py::none());
    m.def("run_cli", &cli, py::arg("args"));
}
