#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "curvespec/calculus.hpp"
#include "curvespec/errors.hpp"
#include "support.hpp"

using namespace curvespec;

namespace {

// max |p - φ| on a grid unrelated to the one used by the certificate
double sampled_sup(const PolyApprox& p, const ExtendedPhi& phi, int count = 50'000) {
    double worst = 0.0;
    for (int i = 0; i <= count; ++i) {
        const double t = (i + 0.5 * std::sin(i)) / count;
        const double tc = std::clamp(t, 0.0, 1.0);
        worst = std::max(worst, std::abs(p(tc) - phi(tc)));
    }
    return worst;
}

ExtendedPhi full_square_phi(int depth) {
    return extend_phi(build_selection(GridSet2D::full(depth)), AffineFrame::unit_square());
}

// φ(H) through the given eigendecomposition
Matrix spectral_oracle(const ExtendedPhi& phi, const Matrix& q, const Eigen::VectorXd& ev) {
    Vector f(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) f(k) = phi(ev(k));
    return q * f.asDiagonal() * q.adjoint();
}

}  // namespace

TEST_CASE("extended phi") {
    SUBCASE("single interval is constant") {
        const SelectionTable ts = build_selection(GridSet2D(2, {Cell2D{2, 4, 4}}));
        const ExtendedPhi phi = extend_phi(ts, AffineFrame::unit_square());
        CHECK(phi(0.0) == phi(1.0));
        CHECK(phi(0.3) == Complex{0.5, 0.5});
        CHECK(phi.lipschitz() == 0.0);
    }
    SUBCASE("full square at depth 1 visits the nine centres in order") {
        const ExtendedPhi phi = full_square_phi(1);
        REQUIRE(phi.knots().size() == 9);
        for (Index j = 0; j < 9; ++j) {
            const Point2 c = cell_of_interval({1, j}).center();
            CHECK(std::abs(phi(phi.knots()[static_cast<std::size_t>(j)]) - Complex{c.x, c.y}) < 1e-15);
        }
        CHECK(std::abs(phi(1.0 / 18.0) - Complex{1.0 / 6.0, 1.0 / 3.0}) < 1e-15);
        CHECK(phi(1.0) == phi(8.0 / 9.0));
    }
    SUBCASE("circle spectrum agrees with reconstruction at every knot") {
        std::vector<Complex> pts;
        for (int i = 0; i < 40; ++i) pts.push_back(std::polar(1.0, 2 * std::numbers::pi * i / 40));
        const auto ns = normalize_spectrum(pts, 4);
        const SelectionTable ts = build_selection(ns.cover);
        const ExtendedPhi phi = extend_phi(ts, ns.frame);
        RealMatrix b = RealMatrix::Zero(static_cast<Eigen::Index>(ts.k().size()), static_cast<Eigen::Index>(ts.k().size()));
        for (std::size_t i = 0; i < ts.k().size(); ++i)
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = phi.knots()[i];
        const Matrix r = reconstruct(b, ts, ns.frame);
        for (std::size_t i = 0; i < ts.k().size(); ++i)
            CHECK(phi(phi.knots()[i]) == r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    }
    CHECK_THROWS_AS(ExtendedPhi({0.5, 0.5}, {Complex{}, Complex{}}), ValidationError);
}

TEST_CASE("polynomial fixed points") {
    const ExtendedPhi id({0.0, 1.0}, {Complex{0.0}, Complex{1.0}});
    const PolyApprox p1 = fit_polynomial(id, 1);
    CHECK(p1.sup_error <= 1e-12);
    CHECK(std::abs(p1(0.25) - 0.25) < 1e-14);
    const ExtendedPhi c({0.2}, {Complex{0.3, -0.7}});
    const PolyApprox p0 = fit_polynomial(c, 0);
    CHECK(p0.sup_error <= 1e-12);
    CHECK(std::abs(p0.coefficients[0] - Complex{0.3, -0.7}) < 1e-14);
    CHECK_THROWS_AS(fit_polynomial(c, -1), ValidationError);
}

TEST_CASE("sup error certificate dominates an independent sampled sup norm") {
    const ExtendedPhi phi = full_square_phi(2);
    const std::vector<int> degrees{4, 8, 16, 32};
    const auto seq = approx_sequence(phi, degrees);
    REQUIRE(seq.size() == 4);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].degree == degrees[i]);
        CHECK(std::isfinite(seq[i].sup_error));
        CHECK(sampled_sup(seq[i], phi) <= seq[i].sup_error);
        CHECK(seq[i].sup_error_re <= seq[i].sup_error + 1e-15);
        CHECK(seq[i].sup_error_im <= seq[i].sup_error + 1e-15);
        CHECK(seq[i].samples >= static_cast<std::size_t>(100 * degrees[i]));
        if (i > 0) CHECK(seq[i].sup_error < seq[i - 1].sup_error);
    }
}

TEST_CASE("approx sequence is non-increasing and validates degrees") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int run = 0; run < 10; ++run) {
        std::vector<double> knots{0.0};
        std::vector<Complex> values{Complex{u(rng), u(rng)}};
        for (int i = 0; i < 12; ++i) {
            knots.push_back(knots.back() + 0.01 + 0.1 * (u(rng) + 1));
            values.emplace_back(u(rng), u(rng));
        }
        for (double& k : knots) k /= knots.back();
        const ExtendedPhi phi(knots, values);
        const std::vector<int> degrees{1, 2, 3, 5, 8, 13, 21};
        const auto seq = approx_sequence(phi, degrees);
        for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i].sup_error <= seq[i - 1].sup_error);
        for (const auto& p : seq) CHECK(p.fitted_degree <= p.degree);
    }
    const ExtendedPhi phi = full_square_phi(1);
    CHECK_THROWS_AS(approx_sequence(phi, std::vector<int>{4, 4}), ValidationError);
    CHECK_THROWS_AS(approx_sequence(phi, std::vector<int>{-1, 4}), ValidationError);
}

TEST_CASE("apply poly") {
    std::mt19937_64 rng(16);
    SUBCASE("identity polynomial") {
        const ExtendedPhi id({0.0, 1.0}, {Complex{0.0}, Complex{1.0}});
        const PolyApprox p = fit_polynomial(id, 1);
        const Matrix h = testing::random_hermitian_unit_spectrum(6, rng);
        CHECK((apply_poly(p, h) - h).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("diagonal input") {
        const PolyApprox p = fit_polynomial(full_square_phi(1), 7);
        Matrix h = Matrix::Zero(4, 4);
        const double d[4] = {0.0, 0.2, 0.71, 1.0};
        for (int i = 0; i < 4; ++i) h(i, i) = d[i];
        const Matrix ph = apply_poly(p, h);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(ph(i, i) - p(d[i])) < 1e-13);
        CHECK((ph - Matrix(ph.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("16x16 against the eigendecomposition oracle") {
        const ExtendedPhi phi = full_square_phi(2);
        const PolyApprox p = fit_polynomial(phi, 16);
        for (int run = 0; run < 5; ++run) {
            Eigen::VectorXd ev;
            Matrix q;
            {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                ev.resize(16);
                for (int i = 0; i < 16; ++i) ev(i) = u(rng);
                q = random_unitary(16, rng);
            }
            const Matrix h = q * ev.cast<Complex>().asDiagonal() * q.adjoint();
            const Matrix oracle = spectral_oracle(phi, q, ev);
            CHECK(testing::op_norm(apply_poly(p, h) - oracle) <= p.sup_error);
            CHECK(testing::op_norm(apply_function(phi, h) - oracle) < 1e-12);
        }
    }
    SUBCASE("spectrum outside the unit interval") {
        const PolyApprox p = fit_polynomial(full_square_phi(1), 3);
        Matrix h = Matrix::Identity(2, 2) * 1.5;
        CHECK_THROWS_AS(apply_poly(p, h), ValidationError);
        Matrix nh(2, 2);
        nh << 0.5, 0.1, 0.2, 0.5;
        CHECK_THROWS_AS(apply_poly(p, nh), ValidationError);
    }
}

TEST_CASE("greedy split on a diagonal matrix recovers the diagonal") {
    const int n = 12;
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = std::pow(0.7, i);
    const std::vector<double> schedule(n, 1e-6);
    const DiagonalSplit w = split_diagonal(h, schedule);
    CHECK(w.unitarity_error <= 1e-10);
    CHECK(w.hs_within_bound);
    CHECK(w.residuals_within_delta);
    std::vector<double> got(w.diagonal.data(), w.diagonal.data() + n), want;
    for (int i = 0; i < n; ++i) want.push_back(std::pow(0.7, i));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) <= 0.5e-6);
}

TEST_CASE("greedy split postconditions on rotated diagonals") {
    std::mt19937_64 rng(44);
    for (int n : {2, 5, 16, 40}) {
        for (double delta : {1e-3, 0.05, 0.3}) {
            Eigen::VectorXd ev;
            const Matrix h = testing::random_hermitian_unit_spectrum(n, rng, &ev);
            const std::vector<double> schedule(n, delta);
            const DiagonalSplit w = split_diagonal(h, schedule);
            CHECK(w.steps.size() == static_cast<std::size_t>(n));
            CHECK(w.unitarity_error <= 1e-10);
            CHECK(w.residuals_within_delta);
            for (const auto& s : w.steps) CHECK(s.residual <= s.delta);
            const Matrix back = w.diagonal_operator() + w.remainder;
            CHECK((back - h).cwiseAbs().maxCoeff() <= 1e-10 * testing::op_norm(h));
            CHECK(w.hs_within_bound);
        }
    }
}

TEST_CASE("greedy split on the discrete Laplacian") {
    for (int n : {16, 32, 64}) {
        const Matrix h = testing::laplacian(n);
        const std::vector<double> schedule(n, 0.25);
        const DiagonalSplit w = split_diagonal(h, schedule);
        CHECK(w.residuals_within_delta);
        CHECK(w.unitarity_error <= 1e-10);
        const auto sv = singular_values(w.remainder);
        for (double s : sv) CHECK(s >= 0.0);
        CHECK(std::is_sorted(sv.rbegin(), sv.rend()));
    }
}

TEST_CASE("greedy split schedule validation") {
    const Matrix h = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(split_diagonal(h, std::vector<double>{0.1, 0.1}), ValidationError);
    CHECK_THROWS_AS(split_diagonal(h, std::vector<double>{0.1, -0.1, 0.1}), ValidationError);
    Matrix nh = Matrix::Identity(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(split_diagonal(nh, std::vector<double>{0.1, 0.1}), ValidationError);
}

TEST_CASE("telescoping identity") {
    std::mt19937_64 rng(8);
    const Matrix h = testing::random_hermitian_unit_spectrum(10, rng);
    const DiagonalSplit w = split_diagonal(h, std::vector<double>(10, 0.2));
    const auto checks = telescoping_checks(w.diagonal_operator(), w.remainder, 4);
    REQUIRE(checks.size() == 4);
    for (const auto& c : checks) CHECK(c.ok);
    // k = 2 by hand: (D+C)² - D² = DC + CD + C²
    const Matrix d = w.diagonal_operator(), c = w.remainder;
    const Matrix lhs = (d + c) * (d + c) - d * d;
    CHECK(testing::op_norm(lhs - (d * c + c * d + c * c)) <= 1e-12);
}

TEST_CASE("truncated singular values") {
    const auto t = truncated_singular_values(testing::laplacian(10));
    REQUIRE(t.size() == 4);
    CHECK(t[0].size == 3);
    CHECK(t[1].size == 5);
    CHECK(t[2].size == 8);
    CHECK(t[3].size == 10);
    CHECK(truncated_singular_values(Matrix::Identity(1, 1)).size() == 1);
}

TEST_CASE("assembly on small inputs") {
    SUBCASE("1x1") {
        Vector x(1);
        x << 1.0;
        const AssemblyReport r = assemble_model(NormalMatrix(Matrix::Constant(1, 1, Complex{0.3, -2.0})), x, {});
        CHECK(r.split.basis.rows() == 1);
        CHECK(r.l_norm <= 1e-14);
        for (const auto& tr : r.traces) CHECK(tr.cn_norm <= 1e-14);
        CHECK(r.identity_residual <= r.identity_tolerance);
    }
    SUBCASE("diag(i, -i)") {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = Complex{0, 1};
        a(1, 1) = Complex{0, -1};
        const AssemblyReport r = assemble_model(NormalMatrix(a), default_cyclic_vector(2), {});
        CHECK(r.identity_residual <= 1e-10);
        CHECK(r.cn_nonincreasing);
        CHECK(r.cn_within_bound);
        CHECK(r.reconstruction_error <= r.reconstruction_bound);
    }
    SUBCASE("random 8x8") {
        std::mt19937_64 rng(88);
        const AssemblyReport r = assemble_model(NormalMatrix(testing::random_normal(8, rng)), default_cyclic_vector(8), {});
        CHECK(r.identity_residual <= r.identity_tolerance);
        CHECK(r.cn_within_bound);
        CHECK(r.calculus_within_bound);
        CHECK(r.transport_unitarity_error <= 1e-12);
        CHECK(r.transport_norm_error <= 1e-12);
        CHECK(r.reconstruction_error <= r.reconstruction_bound);
        CHECK(r.split.residuals_within_delta);
        for (const auto& t : r.telescoping) CHECK(t.ok);
        for (std::size_t i = 1; i < r.approximants.size(); ++i)
            CHECK(r.approximants[i].sup_error <= r.approximants[i - 1].sup_error);
    }
    SUBCASE("stage prefix on a collision") {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = Complex{0, 0};
        a(1, 1) = Complex{1e-4, 0};
        Matrix big = Matrix::Zero(3, 3);
        big.topLeftCorner(2, 2) = a;
        big(2, 2) = Complex{1, 0};
        AssemblyOptions o;
        o.depth = 2;
        try {
            assemble_model(NormalMatrix(big), default_cyclic_vector(3), o);
            FAIL("expected PreconditionError");
        } catch (const PreconditionError& e) {
            CHECK(std::string(e.what()).rfind("[transport] ", 0) == 0);
        }
    }
}
