#include "curvespec/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "curvespec/errors.hpp"

namespace curvespec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double hermitian_defect(const Matrix& h) {
    return h.size() == 0 ? 0.0 : (h - h.adjoint()).cwiseAbs().maxCoeff();
}

void check_hermitian(const Matrix& h, const char* who) {
    if (h.rows() != h.cols() || h.rows() == 0) throw ValidationError(std::string(who) + ": matrix must be square");
    const double scale = std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (hermitian_defect(h) > 1e-10 * scale) throw ValidationError(std::string(who) + ": matrix is not Hermitian");
}

Matrix symmetrized(const Matrix& h) { return 0.5 * (h + h.adjoint()); }

// Chebyshev values T_0..T_n at x in [-1, 1]
void chebyshev_row(double x, int n, double* out) {
    out[0] = 1.0;
    if (n >= 1) out[1] = x;
    for (int k = 2; k <= n; ++k) out[k] = 2.0 * x * out[k - 1] - out[k - 2];
}

Complex clenshaw(const std::vector<Complex>& c, double x) {
    Complex b1, b2;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        const Complex b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + x * b1 - b2;
}

struct Certificate {
    double sup = 0.0, sup_re = 0.0, sup_im = 0.0, sampled = 0.0;
    std::size_t samples = 0;
};

// sup_[0,1] |p - φ| <= max over samples + h²/8 max|p''| + round-off, because φ is
// linear between consecutive samples (every knot in [0,1] is a sample).
Certificate certify(const std::vector<Complex>& coeffs, const ExtendedPhi& phi) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    const std::size_t uniform = std::max<std::size_t>(2000, 100 * static_cast<std::size_t>(n) * (n + 1));
    std::vector<double> xs;
    xs.reserve(uniform + 1 + phi.knots().size());
    for (std::size_t i = 0; i <= uniform; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(uniform));
    for (double k : phi.knots())
        if (k >= 0.0 && k <= 1.0) xs.push_back(k);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    Certificate cert;
    cert.samples = xs.size();
    double gap = 0.0;
    double max_phi = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) gap = std::max(gap, xs[i] - xs[i - 1]);
        const Complex target = phi(xs[i]);
        const Complex e = clenshaw(coeffs, 2.0 * xs[i] - 1.0) - target;
        max_phi = std::max(max_phi, std::abs(target));
        cert.sampled = std::max(cert.sampled, std::abs(e));
        cert.sup_re = std::max(cert.sup_re, std::abs(e.real()));
        cert.sup_im = std::max(cert.sup_im, std::abs(e.imag()));
    }
    // |T_k''| <= k²(k²-1)/3 on [-1,1]; d/dt = 2 d/dx
    double curv = 0.0, curv_re = 0.0, curv_im = 0.0, coeff_sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double w = 4.0 * kk * kk * (kk * kk - 1.0) / 3.0;
        curv += w * std::abs(coeffs[static_cast<std::size_t>(k)]);
        curv_re += w * std::abs(coeffs[static_cast<std::size_t>(k)].real());
        curv_im += w * std::abs(coeffs[static_cast<std::size_t>(k)].imag());
        coeff_sum += std::abs(coeffs[static_cast<std::size_t>(k)]);
    }
    const double between = gap * gap / 8.0;
    const double roundoff = 8.0 * (n + 2) * kEps * (coeff_sum + max_phi);
    cert.sup = cert.sampled + between * curv + roundoff;
    cert.sup_re = cert.sup_re + between * curv_re + roundoff;
    cert.sup_im = cert.sup_im + between * curv_im + roundoff;
    return cert;
}

}  // namespace

ExtendedPhi::ExtendedPhi(std::vector<double> knots, std::vector<Complex> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.empty() || knots_.size() != values_.size())
        throw ValidationError("ExtendedPhi: need matching, non-empty knots and values");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1])) throw ValidationError("ExtendedPhi: knots must increase strictly");
}

Complex ExtendedPhi::operator()(double t) const {
    if (t <= knots_.front()) return values_.front();
    if (t >= knots_.back()) return values_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());
    const std::size_t lo = hi - 1;
    const double s = (t - knots_[lo]) / (knots_[hi] - knots_[lo]);
    return values_[lo] + s * (values_[hi] - values_[lo]);
}

double ExtendedPhi::lipschitz() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i)
        worst = std::max(worst, std::abs(values_[i] - values_[i - 1]) / (knots_[i] - knots_[i - 1]));
    return worst;
}

ExtendedPhi extend_phi(const SelectionTable& ts, const AffineFrame& frame) {
    const auto& k = ts.k().intervals;
    if (k.empty()) throw PreconditionError("extend_phi: K is empty");
    std::vector<double> knots;
    std::vector<Complex> values;
    const double den = static_cast<double>(ts.denominator());
    for (Index j : k) {
        knots.push_back(static_cast<double>(j) / den);
        values.push_back(frame.restore(cell_of_interval({ts.depth(), j}).center()));
    }
    return ExtendedPhi(std::move(knots), std::move(values));
}

Complex PolyApprox::operator()(double t) const { return clenshaw(coefficients, 2.0 * t - 1.0); }

PolyApprox fit_polynomial(const ExtendedPhi& phi, int degree) {
    if (degree < 0) throw ValidationError("polynomial degree must be non-negative");
    const int cols = degree + 1;
    const int rows = std::max(2000, 20 * cols);
    RealMatrix design(rows, cols);
    RealMatrix rhs(rows, 2);
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (int i = 0; i < rows; ++i) {
        const double x = std::cos(M_PI * static_cast<double>(i) / static_cast<double>(rows - 1));
        chebyshev_row(x, degree, row.data());
        for (int k = 0; k < cols; ++k) design(i, k) = row[static_cast<std::size_t>(k)];
        const Complex y = phi(0.5 * (x + 1.0));
        rhs(i, 0) = y.real();
        rhs(i, 1) = y.imag();
    }
    const RealMatrix sol = design.colPivHouseholderQr().solve(rhs);
    PolyApprox p;
    p.degree = degree;
    p.fitted_degree = degree;
    p.coefficients.resize(static_cast<std::size_t>(cols));
    for (int k = 0; k < cols; ++k) p.coefficients[static_cast<std::size_t>(k)] = Complex(sol(k, 0), sol(k, 1));
    const Certificate cert = certify(p.coefficients, phi);
    p.sup_error = cert.sup;
    p.sup_error_re = cert.sup_re;
    p.sup_error_im = cert.sup_im;
    p.sampled_error = cert.sampled;
    p.samples = cert.samples;
    return p;
}

std::vector<PolyApprox> approx_sequence(const ExtendedPhi& phi, std::span<const int> degrees) {
    std::vector<PolyApprox> out;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] < 0) throw ValidationError("polynomial degree must be non-negative");
        if (i > 0 && degrees[i] <= degrees[i - 1]) throw ValidationError("degrees must be strictly increasing");
        PolyApprox p = fit_polynomial(phi, degrees[i]);
        if (!out.empty() && p.sup_error > out.back().sup_error) {
            // a polynomial of lower degree is also one of degree <= degrees[i]
            PolyApprox kept = out.back();
            kept.degree = degrees[i];
            p = kept;
        }
        out.push_back(std::move(p));
    }
    return out;
}

void check_unit_spectrum(const Matrix& h) {
    check_hermitian(h, "functional calculus");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(h), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    constexpr double slack = 1e-12;
    if (ev.minCoeff() < -slack || ev.maxCoeff() > 1.0 + slack) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "spectrum [" << ev.minCoeff() << ", " << ev.maxCoeff() << "] outside [0, 1]";
        throw ValidationError(msg.str());
    }
}

Matrix apply_poly(const PolyApprox& p, const Matrix& h) {
    check_unit_spectrum(h);
    const auto n = h.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix x = 2.0 * symmetrized(h) - id;
    const auto& c = p.coefficients;
    Matrix b1 = Matrix::Zero(n, n), b2 = Matrix::Zero(n, n);
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        Matrix b0 = 2.0 * (x * b1) - b2;
        b0.diagonal().array() += c[k];
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    Matrix out = x * b1 - b2;
    out.diagonal().array() += c[0];
    return out;
}

Matrix apply_function(const ExtendedPhi& phi, const Matrix& h) {
    check_hermitian(h, "apply_function");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(h));
    const Matrix& v = solver.eigenvectors();
    Vector f(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) f(k) = phi(solver.eigenvalues()(k));
    return v * f.asDiagonal() * v.adjoint();
}

Matrix DiagonalSplit::diagonal_operator() const {
    return basis * diagonal.cast<Complex>().asDiagonal() * basis.adjoint();
}

DiagonalSplit split_diagonal(const Matrix& h_in, std::span<const double> schedule) {
    check_hermitian(h_in, "split_diagonal");
    const Eigen::Index n = h_in.rows();
    if (schedule.size() < static_cast<std::size_t>(n))
        throw ValidationError("δ schedule has " + std::to_string(schedule.size()) + " entries, need " +
                              std::to_string(n));
    for (double d : schedule)
        if (!(d > 0.0)) throw ValidationError("δ schedule entries must be positive");
    const Matrix h = symmetrized(h_in);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const Matrix& u = solver.eigenvectors();
    const Eigen::VectorXd& t = solver.eigenvalues();  // ascending

    DiagonalSplit out;
    out.window_width = *std::min_element(schedule.begin(), schedule.begin() + n);

    struct Window {
        Eigen::Index first = 0;
        Eigen::Index count = 0;
        double lo = 0.0, hi = 0.0;
        std::vector<Vector> chosen;  // in eigen coordinates of the window
    };
    std::vector<Window> windows;
    for (Eigen::Index i = 0; i < n;) {
        Window w;
        w.first = i;
        w.lo = t(i);
        while (i < n && t(i) - w.lo <= out.window_width) ++i;
        w.count = i - w.first;
        w.hi = t(i - 1);
        windows.push_back(std::move(w));
    }
    out.window_count = windows.size();

    out.basis = Matrix::Zero(n, n);
    out.diagonal = Eigen::VectorXd::Zero(n);
    Eigen::Index found = 0;
    for (std::size_t pass = 0; found < n; ++pass) {
        if (pass > static_cast<std::size_t>(n))
            throw PreconditionError("split_diagonal: seeds exhausted before an orthonormal basis was built");
        for (Eigen::Index seed = 0; seed < n && found < n; ++seed) {
            const Vector y = u.row(seed).adjoint();  // U* e_seed
            double best_mass = -1.0;
            std::size_t best = 0;
            Vector best_vec;
            double total = 0.0;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                Vector proj = y.segment(windows[w].first, windows[w].count);
                for (int sweep = 0; sweep < 2; ++sweep)
                    for (const Vector& f : windows[w].chosen) proj -= f * f.dot(proj);
                const double mass = proj.norm();
                total += mass * mass;
                if (mass > best_mass) {
                    best_mass = mass;
                    best = w;
                    best_vec = std::move(proj);
                }
            }
            if (best_mass < 1e-12) {
                out.skipped.push_back({seed, pass, std::sqrt(total)});
                continue;
            }
            Window& win = windows[best];
            best_vec /= best_mass;
            win.chosen.push_back(best_vec);
            const Vector f = u.middleCols(win.first, win.count) * best_vec;
            SplitStep step;
            step.step = static_cast<std::size_t>(found);
            step.seed = seed;
            step.pass = pass;
            step.window_lo = win.lo;
            step.window_hi = win.hi;
            step.center = 0.5 * (win.lo + win.hi);
            step.mass = best_mass;
            step.residual = (h * f - step.center * f).norm();
            step.delta = schedule[static_cast<std::size_t>(found)];
            step.within_delta = step.residual <= step.delta;
            out.basis.col(found) = f;
            out.diagonal(found) = step.center;
            out.steps.push_back(step);
            ++found;
        }
    }

    out.remainder = h - out.diagonal_operator();
    out.unitarity_error = (out.basis.adjoint() * out.basis - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    out.hs_norm = out.remainder.norm();
    double sum_sq = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) sum_sq += schedule[static_cast<std::size_t>(k)] * schedule[static_cast<std::size_t>(k)];
    out.hs_bound = 2.0 * std::sqrt(sum_sq);
    out.hs_within_bound = out.hs_norm <= out.hs_bound;
    out.residuals_within_delta =
        std::all_of(out.steps.begin(), out.steps.end(), [](const SplitStep& s) { return s.within_delta; });
    return out;
}

std::vector<TelescopingCheck> telescoping_checks(const Matrix& d, const Matrix& c, int max_power) {
    const auto n = d.rows();
    const double h_norm = operator_norm(d + c);
    std::vector<TelescopingCheck> out;
    for (int k = 1; k <= max_power; ++k) {
        Matrix lhs_sum = Matrix::Identity(n, n), lhs_d = Matrix::Identity(n, n);
        for (int i = 0; i < k; ++i) {
            lhs_sum = lhs_sum * (d + c);
            lhs_d = lhs_d * d;
        }
        const Matrix lhs = lhs_sum - lhs_d;
        Matrix mixed = Matrix::Zero(n, n);
        for (unsigned word = 1; word < (1u << k); ++word) {  // bit i set: factor i is C
            Matrix prod = Matrix::Identity(n, n);
            for (int i = 0; i < k; ++i) prod = prod * (((word >> i) & 1u) ? c : d);
            mixed += prod;
        }
        TelescopingCheck check;
        check.power = k;
        check.residual = operator_norm(lhs - mixed);
        check.tolerance = 1e-9 * std::pow(h_norm, k);
        check.ok = check.residual <= check.tolerance;
        out.push_back(check);
    }
    return out;
}

std::vector<double> singular_values(const Matrix& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

std::vector<TruncatedSpectrum> truncated_singular_values(const Matrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> sizes;
    for (Eigen::Index q = 1; q <= 4; ++q) {
        const Eigen::Index s = (q * n + 3) / 4;
        if (s >= 1 && (sizes.empty() || sizes.back() != s)) sizes.push_back(s);
    }
    std::vector<TruncatedSpectrum> out;
    for (Eigen::Index s : sizes) out.push_back({s, singular_values(m.topLeftCorner(s, s))});
    return out;
}

AssemblyReport assemble_model(const NormalMatrix& a, const Vector& cyclic, const AssemblyOptions& options) {
    if (options.depth < 1 || options.depth > kMaxDepth) throw ValidationError("depth out of range");
    AssemblyReport rep;
    rep.options = options;
    rep.model = with_stage("model", [&] { return build_model(a, cyclic); });
    const std::vector<Complex> points = rep.model.mu.points();
    rep.normalized = with_stage("compact", [&] { return normalize_spectrum(points, options.depth); });
    rep.selection = with_stage("selection", [&] { return build_selection(rep.normalized.cover); });
    rep.push = with_stage("pushforward", [&] { return pushforward(rep.model.mu, rep.selection, rep.normalized.frame); });
    const TransportOperator transport = with_stage("transport", [&] { return build_transport(rep.model.mu, rep.push); });
    rep.transport_unitarity_error = transport.unitarity_error();

    std::mt19937_64 rng(options.seed);
    const auto m = static_cast<Eigen::Index>(rep.push.gamma.atoms.size());
    rep.rotation = random_unitary(m, rng);
    {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int probe = 0; probe < 100; ++probe) {
            Vector g(m);
            for (Eigen::Index k = 0; k < m; ++k) g(k) = Complex(gauss(rng), gauss(rng));
            const double ng = weighted_norm(g, transport.gamma_weights());
            const double ntg = weighted_norm(transport.apply(g), transport.mu_weights());
            rep.transport_norm_error = std::max(rep.transport_norm_error, std::abs(ntg / ng - 1.0));
            const Vector f = transport.apply(g);
            rep.transport_roundtrip_error = std::max(
                rep.transport_roundtrip_error, (transport.apply(transport.adjoint_apply(f)) - f).cwiseAbs().maxCoeff());
        }
    }

    rep.b = hermitian_model(rep.push.gamma);
    rep.phi_b = reconstruct(rep.b, rep.selection, rep.normalized.frame);
    rep.reconstruction_error = reconstruction_error(rep.model.mu, rep.push, rep.phi_b);
    rep.reconstruction_bound = rep.normalized.frame.scale * std::sqrt(2.0) / static_cast<double>(pow3(options.depth));

    const Matrix& q = rep.rotation;
    rep.h = q * rep.b.cast<Complex>() * q.adjoint();
    rep.h = symmetrized(rep.h);

    std::vector<double> schedule = options.delta;
    if (schedule.size() == 1) schedule.assign(static_cast<std::size_t>(m), options.delta.front());
    rep.split = with_stage("decompose", [&] { return split_diagonal(rep.h, schedule); });

    rep.phi = extend_phi(rep.selection, rep.normalized.frame);
    rep.approximants = with_stage("approximation", [&] { return approx_sequence(rep.phi, options.degrees); });

    rep.a_model = q * rep.phi_b * q.adjoint();
    Vector phi_mu(m);
    for (Eigen::Index k = 0; k < m; ++k) phi_mu(k) = rep.phi(rep.split.diagonal(k));
    rep.phi_d = rep.split.basis * phi_mu.asDiagonal() * rep.split.basis.adjoint();
    rep.l = rep.a_model - rep.phi_d;
    rep.l_norm = operator_norm(rep.l);
    rep.identity_residual = operator_norm(rep.a_model - (rep.phi_d + rep.l));
    rep.identity_tolerance = 1e-10 * rep.model.norm;
    const Matrix phi_h = apply_function(rep.phi, rep.h);
    rep.oracle_gap = operator_norm(rep.a_model - phi_h);

    const Matrix d_op = rep.split.diagonal_operator();
    rep.cn_within_bound = true;
    rep.calculus_within_bound = true;
    rep.cn_nonincreasing = true;
    for (const PolyApprox& p : rep.approximants) {
        const Matrix p_h = apply_poly(p, rep.h);
        const Matrix p_d = apply_poly(p, d_op);
        const Matrix c_n = p_h - p_d;
        DegreeTrace tr;
        tr.degree = p.degree;
        tr.fitted_degree = p.fitted_degree;
        tr.sup_error = p.sup_error;
        tr.cn_minus_l = operator_norm(c_n - rep.l);
        tr.cn_bound = 2.0 * p.sup_error;
        tr.cn_norm = operator_norm(c_n);
        tr.h_calculus_error = operator_norm(p_h - phi_h);
        tr.d_calculus_error = operator_norm(p_d - rep.phi_d);
        rep.cn_within_bound = rep.cn_within_bound && tr.cn_minus_l <= tr.cn_bound;
        rep.calculus_within_bound =
            rep.calculus_within_bound && tr.h_calculus_error <= p.sup_error && tr.d_calculus_error <= p.sup_error;
        if (!rep.traces.empty() && tr.cn_minus_l > rep.traces.back().cn_minus_l + kCnSlack * std::max(1.0, rep.model.norm))
            rep.cn_nonincreasing = false;
        rep.traces.push_back(tr);
    }

    rep.telescoping = telescoping_checks(d_op, rep.split.remainder, 4);
    rep.c_spectrum = truncated_singular_values(rep.split.remainder);
    rep.l_spectrum = truncated_singular_values(rep.l);
    return rep;
}

}  // namespace curvespec
