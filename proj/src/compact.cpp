#include "curvespec/compact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curvespec/errors.hpp"
#include "exact_floor.hpp"

namespace curvespec {

namespace {

constexpr double kMargin = 0.9;  // bounding square fills 90% of the unit square

bool col_row_less(const Cell2D& a, const Cell2D& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
}

void normalize_cells(std::vector<Cell2D>& cells) {
    std::sort(cells.begin(), cells.end(), col_row_less);
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

}  // namespace

Point2 AffineFrame::embed(Complex z) const {
    const Complex w = (z - center) / scale;
    return {w.real() + 0.5, w.imag() + 0.5};
}

Complex AffineFrame::restore(Point2 p) const {
    return center + scale * Complex(p.x - 0.5, p.y - 0.5);
}

GridSet2D::GridSet2D(int depth_, std::vector<Cell2D> cells_) : depth(depth_), cells(std::move(cells_)) {
    for (const auto& c : cells) {
        validate(c);
        if (c.depth != depth) throw ValidationError("GridSet2D cells must share one depth");
    }
    normalize_cells(cells);
}

GridSet2D GridSet2D::full(int depth) {
    const Index n = pow3(depth);
    std::vector<Cell2D> cells;
    cells.reserve(static_cast<std::size_t>(n * n));
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) cells.push_back({depth, c, r});
    return GridSet2D(depth, std::move(cells));
}

bool GridSet2D::contains(const Cell2D& cell) const {
    return cell.depth == depth && std::binary_search(cells.begin(), cells.end(), cell, col_row_less);
}

GridSet1D::GridSet1D(int depth_, std::vector<Index> intervals_)
    : depth(depth_), intervals(std::move(intervals_)) {
    for (Index j : intervals) validate(ParamInterval{depth, j});
    std::sort(intervals.begin(), intervals.end());
    intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
}

bool GridSet1D::contains(Index j) const {
    return std::binary_search(intervals.begin(), intervals.end(), j);
}

Cell2D cell_of_point(Point2 p, int depth) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "point (" << p.x << ", " << p.y << ") outside the unit square";
        throw ValidationError(msg.str());
    }
    const Index n = pow3(depth);
    const Index col = std::min(detail::floor_scaled(p.x, n), n - 1);
    const Index row = std::min(detail::floor_scaled(p.y, n), n - 1);
    return {depth, col, row};
}

GridSet2D rasterize(std::span<const Complex> points, const AffineFrame& frame, int depth) {
    if (depth < 0 || depth > kMaxDepth) throw ValidationError("rasterize: depth out of range");
    std::vector<Cell2D> cells;
    cells.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 p = frame.embed(points[i]);
        if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "point #" << i << " = " << points[i].real() << (points[i].imag() < 0 ? "-" : "+")
                << std::abs(points[i].imag()) << "i maps to (" << p.x << ", " << p.y
                << "), outside the frame";
            throw ValidationError(msg.str());
        }
        cells.push_back(cell_of_point(p, depth));
    }
    return GridSet2D(depth, std::move(cells));
}

NormalizedSpectrum normalize_spectrum(std::span<const Complex> eigs, int depth) {
    if (eigs.empty())
        throw PreconditionError("normalize_spectrum: empty input (spectrum of a bounded operator is non-empty)");
    double lo_re = std::numeric_limits<double>::infinity(), hi_re = -lo_re;
    double lo_im = lo_re, hi_im = -lo_re;
    for (const Complex& z : eigs) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ValidationError("normalize_spectrum: non-finite eigenvalue");
        lo_re = std::min(lo_re, z.real());
        hi_re = std::max(hi_re, z.real());
        lo_im = std::min(lo_im, z.imag());
        hi_im = std::max(hi_im, z.imag());
    }
    AffineFrame frame;
    frame.center = Complex(0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im));
    const double side = std::max(hi_re - lo_re, hi_im - lo_im);
    frame.scale = side > 0.0 ? side / kMargin : 1.0;
    return {frame, rasterize(eigs, frame, depth)};
}

double hausdorff(const GridSet2D& a, const GridSet2D& b) {
    if (a.depth != b.depth) throw ValidationError("hausdorff: depth mismatch");
    if (a.empty() || b.empty()) throw ValidationError("hausdorff: empty cover");
    auto directed = [](const GridSet2D& from, const GridSet2D& to) {
        double worst = 0.0;
        for (const auto& c : from.cells) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& d : to.cells) best = std::min(best, distance(c.center(), d.center()));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

GridSet2D coarsen(const GridSet2D& set) {
    std::vector<Cell2D> parents;
    parents.reserve(set.size());
    for (const auto& c : set.cells) parents.push_back(c.parent());
    return GridSet2D(set.depth - 1, std::move(parents));
}

GridSet2D set_union(const GridSet2D& a, const GridSet2D& b) {
    if (a.depth != b.depth) throw ValidationError("set_union: depth mismatch");
    std::vector<Cell2D> cells = a.cells;
    cells.insert(cells.end(), b.cells.begin(), b.cells.end());
    return GridSet2D(a.depth, std::move(cells));
}

bool is_subset(const GridSet2D& a, const GridSet2D& b) {
    if (a.depth != b.depth) return false;
    return std::all_of(a.cells.begin(), a.cells.end(), [&](const Cell2D& c) { return b.contains(c); });
}

}  // namespace curvespec
