#include "curvespec/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "curvespec/errors.hpp"

namespace curvespec {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    return parts;
}

void write_json(const std::string& dir, const std::string& name, const Json& j) {
    write_text_file((std::filesystem::path(dir) / name).string(), j.dump(2) + "\n");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
}

Json with_config(const PipelineConfig& cfg, const char* command, Json body) {
    Json j;
    j["command"] = command;
    j["config"] = cfg.to_json();
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
    return j;
}

struct Curve {
    std::string t = "0";
    int depth = 4;
};

// "p/q" or a decimal in [0, 1]
ParamInterval parse_parameter(const std::string& text, int depth, double& t_out) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const Index num = std::stoll(text.substr(0, slash));
            const Index den = std::stoll(text.substr(slash + 1));
            if (den <= 0) throw ValidationError("bad rational parameter '" + text + "'");
            t_out = static_cast<double>(num) / static_cast<double>(den);
            return interval_containing(num, den, depth);
        }
        std::size_t used = 0;
        t_out = std::stod(text, &used);
        if (used != text.size()) throw ValidationError("bad parameter '" + text + "'");
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ValidationError*>(&e)) throw;
        throw ValidationError("bad parameter '" + text + "'");
    }
    return interval_containing(t_out, depth);
}

int curve_eval(const Curve& c, std::ostream& out) {
    double t = 0.0;
    const ParamInterval iv = parse_parameter(c.t, c.depth, t);
    const Cell2D cell = cell_of_interval(iv);
    const Point2 p = cell.center();
    Json j;
    j["t"] = t;
    j["depth"] = c.depth;
    j["interval"] = iv.index;
    j["cell"] = Json::array({cell.col, cell.row});
    j["point"] = Json::array({p.x, p.y});
    j["error_bound"] = std::sqrt(2.0) / static_cast<double>(pow3(c.depth));
    out << j.dump(2) << "\n";
    return 0;
}

int curve_cells(const Curve& c, std::ostream& out) {
    if (c.depth > kMaxEnumerationDepth)
        throw ValidationError("curve cells: depth limited to " + std::to_string(kMaxEnumerationDepth));
    Json j;
    j["depth"] = c.depth;
    j["cells"] = Json::array();
    for (Index k = 0; k < pow9(c.depth); ++k) {
        const Cell2D cell = cell_of_interval({c.depth, k});
        j["cells"].push_back(Json::array({cell.col, cell.row}));
    }
    out << j.dump() << "\n";
    return 0;
}

int curve_surjectivity(const Curve& c, std::ostream& out) {
    const SurjectivityReport r = surjectivity_report(c.depth);
    out << r.covered << "/" << r.cell_count << " cells covered, bijection: " << (r.bijection ? "yes" : "no") << "\n";
    return r.bijection ? 0 : 3;
}

int cmd_select(const PipelineConfig& cfg, bool to_file, std::ostream& out) {
    const NormalMatrix a(read_matrix_file(cfg.input));
    const SpectralModel model = build_model(a, parse_cyclic_vector(cfg.vector, a.dim(), cfg.seed));
    const auto points = model.mu.points();
    const NormalizedSpectrum ns = normalize_spectrum(points, cfg.depth);
    const SelectionTable ts = build_selection(ns.cover);
    Json body = to_json(ts);
    body["frame"] = to_json(ns.frame);
    body["lambda"] = to_json(ts.lambda_cells());
    body["k"] = to_json(ts.k());
    const Json j = with_config(cfg, "select", std::move(body));
    if (to_file) {
        ensure_dir(cfg.out);
        write_json(cfg.out, "selection.json", j);
    } else {
        out << j.dump(2) << "\n";
    }
    return 0;
}

AssemblyReport run_assembly(const PipelineConfig& cfg) {
    const NormalMatrix a(read_matrix_file(cfg.input));
    return assemble_model(a, parse_cyclic_vector(cfg.vector, a.dim(), cfg.seed), cfg.assembly_options());
}

int cmd_model(const PipelineConfig& cfg, bool to_file, std::ostream& out) {
    const AssemblyReport rep = run_assembly(cfg);
    const Json j = with_config(cfg, "model", assembly_model_json(rep));
    if (to_file) {
        ensure_dir(cfg.out);
        write_json(cfg.out, "model.json", j);
    } else {
        out << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_decompose(const PipelineConfig& cfg, bool to_file, std::ostream& out) {
    const Matrix h = read_matrix_file(cfg.input);
    std::vector<double> schedule = cfg.delta;
    if (schedule.size() == 1) schedule.assign(static_cast<std::size_t>(h.rows()), cfg.delta.front());
    const DiagonalSplit split = split_diagonal(h, schedule);
    Json body = to_json(split, true);
    body["telescoping"] = telescoping_to_json(telescoping_checks(split.diagonal_operator(), split.remainder, 4));
    const Json j = with_config(cfg, "decompose", std::move(body));
    if (to_file) {
        ensure_dir(cfg.out);
        write_json(cfg.out, "decomposition.json", j);
    } else {
        out << j.dump(2) << "\n";
    }
    return split.residuals_within_delta ? 0 : 3;
}

int cmd_pipeline(const PipelineConfig& cfg, std::ostream& out) {
    const AssemblyReport rep = run_assembly(cfg);
    ensure_dir(cfg.out);
    Json sel = to_json(rep.selection);
    sel["frame"] = to_json(rep.normalized.frame);
    sel["lambda"] = to_json(rep.selection.lambda_cells());
    sel["k"] = to_json(rep.selection.k());
    write_json(cfg.out, "model.json", with_config(cfg, "pipeline", assembly_model_json(rep)));
    write_json(cfg.out, "selection.json", with_config(cfg, "pipeline", std::move(sel)));
    write_json(cfg.out, "decomposition.json", with_config(cfg, "pipeline", assembly_decomposition_json(rep)));
    write_text_file((std::filesystem::path(cfg.out) / "traces.csv").string(), traces_csv(rep));

    const bool recon_ok = rep.reconstruction_error <= rep.reconstruction_bound;
    const bool ident_ok = rep.identity_residual <= rep.identity_tolerance;
    out << "reconstruction error " << format_double(rep.reconstruction_error) << " <= scale*sqrt(2)*3^-"
        << cfg.depth << " = " << format_double(rep.reconstruction_bound) << (recon_ok ? "  ok" : "  FAIL") << "\n";
    for (const auto& t : rep.traces)
        out << "degree " << t.degree << ": ||C_n - L|| = " << format_double(t.cn_minus_l)
            << " <= 2*sup_error = " << format_double(t.cn_bound) << (t.cn_minus_l <= t.cn_bound ? "  ok" : "  FAIL")
            << "\n";
    out << "C_n trace non-increasing: " << (rep.cn_nonincreasing ? "yes" : "no") << "\n";
    out << "identity residual ||A_model - (phi(D) + L)|| = " << format_double(rep.identity_residual)
        << " <= " << format_double(rep.identity_tolerance) << (ident_ok ? "  ok" : "  FAIL") << "\n";
    out << "wrote model.json selection.json decomposition.json traces.csv to " << cfg.out << "\n";
    return 0;
}

void add_common(CLI::App* sub, PipelineConfig& cfg, std::string& degrees, std::string& delta, bool with_calculus) {
    sub->add_option("--input", cfg.input, "matrix JSON file {\"n\", \"re\", \"im\"}")->required();
    sub->add_option("--depth", cfg.depth, "subdivision depth (1..6)")->capture_default_str();
    sub->add_option("--vector", cfg.vector, "cyclic vector: ones | random | comma-separated reals")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output directory");
    if (with_calculus) {
        sub->add_option("--degrees", degrees, "ascending polynomial degrees, comma-separated")->capture_default_str();
        sub->add_option("--delta", delta, "window schedule δ_k, comma-separated (one value is repeated)")
            ->capture_default_str();
    }
}

}  // namespace

void PipelineConfig::validate() const {
    if (depth < 1 || depth > kMaxEnumerationDepth)
        throw ValidationError("--depth must lie in [1, " + std::to_string(kMaxEnumerationDepth) + "]");
    if (degrees.empty()) throw ValidationError("--degrees must not be empty");
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] < 0) throw ValidationError("--degrees must be non-negative");
        if (i > 0 && degrees[i] <= degrees[i - 1]) throw ValidationError("--degrees must be strictly ascending");
    }
    if (delta.empty()) throw ValidationError("--delta must not be empty");
    for (double d : delta)
        if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("--delta entries must be positive");
}

AssemblyOptions PipelineConfig::assembly_options() const {
    AssemblyOptions o;
    o.depth = depth;
    o.degrees = degrees;
    o.delta = delta;
    o.seed = seed;
    return o;
}

Json PipelineConfig::to_json() const {
    Json j;
    j["depth"] = depth;
    j["degrees"] = degrees;
    j["delta"] = delta;
    j["seed"] = seed;
    j["vector"] = vector;
    j["input"] = input;
    return j;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw ValidationError("bad integer '" + part + "' in list '" + text + "'");
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw ValidationError("bad number '" + part + "' in list '" + text + "'");
        }
    }
    return out;
}

Vector parse_cyclic_vector(const std::string& spec, Eigen::Index n, std::uint64_t seed) {
    if (spec == "ones") return default_cyclic_vector(n);
    Vector x(n);
    if (spec == "random") {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(gauss(rng), gauss(rng));
    } else {
        const std::vector<double> v = parse_double_list(spec);
        if (static_cast<Eigen::Index>(v.size()) != n)
            throw ValidationError("--vector has " + std::to_string(v.size()) + " entries, matrix has n = " +
                                  std::to_string(n));
        for (Eigen::Index i = 0; i < n; ++i) x(i) = v[static_cast<std::size_t>(i)];
    }
    const double norm = x.norm();
    if (!(norm > 0.0)) throw ValidationError("--vector must be non-zero");
    return x / norm;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Peano-curve spectral models of normal matrices"};
    app.require_subcommand(1);

    Curve curve;
    auto* curve_cmd = app.add_subcommand("curve", "Peano curve at finite depth");
    curve_cmd->require_subcommand(1);
    auto* eval_cmd = curve_cmd->add_subcommand("eval", "evaluate the curve at a parameter");
    eval_cmd->add_option("--t", curve.t, "parameter in [0,1], decimal or p/q")->required();
    eval_cmd->add_option("--depth", curve.depth, "subdivision depth")->capture_default_str();
    auto* cells_cmd = curve_cmd->add_subcommand("cells", "cells in curve order");
    cells_cmd->add_option("--depth", curve.depth, "subdivision depth")->capture_default_str();
    auto* surj_cmd = curve_cmd->add_subcommand("surjectivity", "exhaustive bijection check");
    surj_cmd->add_option("--depth", curve.depth, "subdivision depth")->capture_default_str();

    PipelineConfig cfg;
    std::string degrees = "8,16,32";
    std::string delta = "0.05";
    auto* select_cmd = app.add_subcommand("select", "preimage K and the selection ψ of a matrix spectrum");
    add_common(select_cmd, cfg, degrees, delta, false);
    auto* model_cmd = app.add_subcommand("model", "spectral measure, pushforward and Hermitian model");
    add_common(model_cmd, cfg, degrees, delta, false);
    auto* decompose_cmd = app.add_subcommand("decompose", "greedy diagonal-plus-remainder split of a Hermitian matrix");
    decompose_cmd->add_option("--input", cfg.input, "Hermitian matrix JSON file")->required();
    decompose_cmd->add_option("--delta", delta, "window schedule δ_k")->capture_default_str();
    decompose_cmd->add_option("--out", cfg.out, "output directory");
    auto* pipeline_cmd = app.add_subcommand("pipeline", "full chain, writes all report files");
    add_common(pipeline_cmd, cfg, degrees, delta, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (curve_cmd->parsed()) {
            if (curve.depth < 0 || curve.depth > kMaxDepth) throw ValidationError("--depth out of range");
            if (eval_cmd->parsed()) return curve_eval(curve, out);
            if (cells_cmd->parsed()) return curve_cells(curve, out);
            return curve_surjectivity(curve, out);
        }
        cfg.degrees = parse_int_list(degrees);
        cfg.delta = parse_double_list(delta);
        auto wrote_out = [](CLI::App* sub) { return sub->parsed() && sub->get_option("--out")->count() > 0; };
        const bool to_file = wrote_out(select_cmd) || wrote_out(model_cmd) || wrote_out(decompose_cmd);
        cfg.validate();
        if (select_cmd->parsed()) return cmd_select(cfg, to_file, out);
        if (model_cmd->parsed()) return cmd_model(cfg, to_file, out);
        if (decompose_cmd->parsed()) return cmd_decompose(cfg, to_file, out);
        return cmd_pipeline(cfg, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace curvespec
