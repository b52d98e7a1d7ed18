#include <doctest.h>

#include <map>
#include <numbers>
#include <random>

#include "curvespec/errors.hpp"
#include "curvespec/selection.hpp"
#include "support.hpp"

using namespace curvespec;

namespace {

std::vector<Complex> circle(int count) {
    std::vector<Complex> pts;
    for (int i = 0; i < count; ++i) pts.push_back(std::polar(1.0, 2.0 * std::numbers::pi * i / count));
    return pts;
}

const AffineFrame kCircleFrame{{0.0, 0.0}, 2.5};

// minimum over all intervals hitting each cell, by scanning every interval
std::map<std::pair<Index, Index>, Index> scan_minima(int depth) {
    std::map<std::pair<Index, Index>, Index> best;
    for (Index j = 0; j < pow9(depth); ++j) {
        const Cell2D c = cell_of_interval({depth, j});
        auto [it, inserted] = best.try_emplace({c.col, c.row}, j);
        if (!inserted && j < it->second) it->second = j;
    }
    return best;
}

}  // namespace

TEST_CASE("preimage examples") {
    const GridSet1D all = preimage(GridSet2D::full(2));
    CHECK(all.size() == 81);
    CHECK(all.intervals.front() == 0);
    CHECK(all.intervals.back() == 80);

    const GridSet1D one = preimage(GridSet2D(1, {Cell2D{1, 0, 0}}));
    REQUIRE(one.size() == 1);
    CHECK(cell_of_interval({1, one.intervals[0]}) == Cell2D{1, 0, 0});

    CHECK_THROWS_AS(preimage(GridSet2D(1, {})), PreconditionError);
}

TEST_CASE("preimage of a circle cover, exhaustive scan") {
    const GridSet2D lambda = rasterize(circle(100), kCircleFrame, 4);
    const GridSet1D k = preimage(lambda);
    for (Index j = 0; j < pow9(4); ++j)
        CHECK(k.contains(j) == lambda.contains(cell_of_interval({4, j})));
}

TEST_CASE("psi is the least preimage and a right inverse") {
    const GridSet2D lambda = rasterize(circle(100), kCircleFrame, 4);
    const SelectionTable ts = build_selection(lambda);
    const auto minima = scan_minima(4);
    for (const auto& e : ts.entries()) {
        CHECK(e.t_num == minima.at({e.cell.col, e.cell.row}));
        CHECK(ts.phi(e.t_num) == e.cell);
    }
    CHECK_THROWS_AS(ts.psi_index(Cell2D{4, 40, 40}), ValidationError);
}

TEST_CASE("psi on the full square at depth 1") {
    const SelectionTable ts = build_selection(GridSet2D::full(1));
    for (Index j = 0; j < 9; ++j) CHECK(ts.psi(cell_of_interval({1, j})) == doctest::Approx(j / 9.0));
}

TEST_CASE("psi of a two-cell set at depth 2") {
    const GridSet2D lambda(2, {Cell2D{2, 4, 4}, Cell2D{2, 0, 8}});
    const SelectionTable ts = build_selection(lambda);
    const auto minima = scan_minima(2);
    CHECK(ts.psi_index(Cell2D{2, 4, 4}) == minima.at({4, 4}));
    CHECK(ts.psi_index(Cell2D{2, 0, 8}) == minima.at({0, 8}));
}

TEST_CASE("sublevel sets") {
    const SelectionTable ts = build_selection(GridSet2D::full(2));
    CHECK(sublevel(ts, 1.0) == ts.lambda_cells());
    const GridSet2D zero = sublevel(ts, 0.0);
    REQUIRE(zero.size() == 1);
    CHECK(zero.cells[0] == Cell2D{2, 0, 0});
    std::vector<Cell2D> expect;
    for (Index j = 0; j <= 40; ++j) expect.push_back(cell_of_interval({2, j}));
    CHECK(sublevel(ts, 0.5) == GridSet2D(2, expect));
    CHECK_THROWS_AS(sublevel(ts, 1.5), ValidationError);
}

TEST_CASE("sublevel routes agree and nest") {
    const GridSet2D lambda = rasterize(circle(100), kCircleFrame, 4);
    const SelectionTable ts = build_selection(lambda);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GridSet2D prev = sublevel(ts, 0.0);
    std::vector<double> rs;
    for (int i = 0; i < 200; ++i) rs.push_back(u(rng));
    for (Index j : ts.k().intervals) rs.push_back(static_cast<double>(j) / 6561.0);
    std::sort(rs.begin(), rs.end());
    for (double r : rs) {
        const GridSet2D s = sublevel(ts, r);
        CHECK(s == sublevel_from_parameters(ts, r));
        CHECK(is_subset(prev, s));
        prev = s;
    }
}

TEST_CASE("refinement monotonicity") {
    SUBCASE("origin cell on the full square") {
        for (int d = 1; d <= 4; ++d) {
            const SelectionTable a = build_selection(GridSet2D::full(d));
            const SelectionTable b = build_selection(GridSet2D::full(d + 1));
            CHECK(a.psi_index(Cell2D{d, 0, 0}) == 0);
            CHECK(b.psi_index(Cell2D{d + 1, 0, 0}) == 0);
        }
    }
    SUBCASE("singleton spectrum") {
        const std::vector<Complex> pts{Complex{0.3, -0.2}};
        const auto ns = normalize_spectrum(pts, 3);
        const SelectionTable a = build_selection(ns.cover);
        const SelectionTable b = refine_selection(a, pts, ns.frame);
        const auto check = refinement_monotone(a, b, pts, ns.frame);
        CHECK(check.monotone);
    }
    SUBCASE("circle cover, 3 to 4") {
        const auto pts = circle(100);
        const SelectionTable a = build_selection(rasterize(pts, kCircleFrame, 3));
        const SelectionTable b = refine_selection(a, pts, kCircleFrame);
        CHECK(b.depth() == 4);
        const auto check = refinement_monotone(a, b, pts, kCircleFrame);
        CHECK(check.points.size() == pts.size());
        for (const auto& v : check.points) CHECK(v.fine_num >= 9 * v.coarse_num);
        CHECK(check.monotone);
    }
    SUBCASE("depth mismatch") {
        const SelectionTable a = build_selection(GridSet2D::full(1));
        CHECK_THROWS_AS(refinement_monotone(a, a, std::vector<Complex>{}, AffineFrame{}), ValidationError);
    }
}
