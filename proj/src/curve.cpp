#include "curvespec/curve.hpp"

#include <cmath>
#include <string>

#include "curvespec/errors.hpp"
#include "exact_floor.hpp"

namespace curvespec {

namespace {

// serpentine position of digit k in canonical orientation
constexpr int local_col(int k) { return k / 3; }
constexpr int local_row(int k) { return (k / 3) % 2 == 0 ? k % 3 : 2 - k % 3; }

constexpr int digit_of(int c, int r) { return 3 * c + (c % 2 == 0 ? r : 2 - r); }

CurveOrientation sub_orientation(int c, int r) { return {r == 1, c == 1}; }

void check_depth(int depth) {
    if (depth < 0 || depth > kMaxDepth)
        throw ValidationError("depth " + std::to_string(depth) + " outside [0, " +
                              std::to_string(kMaxDepth) + "]");
}

// Walk the base-9 digits of iv; returns the cell and the final orientation.
std::pair<Cell2D, CurveOrientation> descend(const ParamInterval& iv) {
    validate(iv);
    CurveOrientation orient;
    Index col = 0;
    Index row = 0;
    Index place = pow9(iv.depth);
    for (int level = 0; level < iv.depth; ++level) {
        place /= 9;
        const int k = static_cast<int>((iv.index / place) % 9);
        const int c = local_col(k);
        const int r = local_row(k);
        const int ac = orient.flip_x ? 2 - c : c;
        const int ar = orient.flip_y ? 2 - r : r;
        col = 3 * col + ac;
        row = 3 * row + ar;
        orient = orient.compose(sub_orientation(c, r));
    }
    return {Cell2D{iv.depth, col, row}, orient};
}

}  // namespace

Index pow3(int depth) {
    Index p = 1;
    for (int i = 0; i < depth; ++i) p *= 3;
    return p;
}

Index pow9(int depth) {
    Index p = 1;
    for (int i = 0; i < depth; ++i) p *= 9;
    return p;
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double ParamInterval::left() const {
    return static_cast<double>(index) / static_cast<double>(pow9(depth));
}

double ParamInterval::right() const {
    return static_cast<double>(index + 1) / static_cast<double>(pow9(depth));
}

ParamInterval ParamInterval::child(int digit) const { return {depth + 1, 9 * index + digit}; }

ParamInterval ParamInterval::parent() const {
    if (depth == 0) throw ValidationError("depth-0 interval has no parent");
    return {depth - 1, index / 9};
}

double Cell2D::side() const { return 1.0 / static_cast<double>(pow3(depth)); }

double Cell2D::diameter() const { return std::sqrt(2.0) * side(); }

Point2 Cell2D::center() const {
    const auto n = static_cast<double>(pow3(depth));
    return {(static_cast<double>(col) + 0.5) / n, (static_cast<double>(row) + 0.5) / n};
}

Point2 Cell2D::lower_left() const {
    const auto n = static_cast<double>(pow3(depth));
    return {static_cast<double>(col) / n, static_cast<double>(row) / n};
}

Cell2D Cell2D::parent() const {
    if (depth == 0) throw ValidationError("depth-0 cell has no parent");
    return {depth - 1, col / 3, row / 3};
}

bool Cell2D::contains(const Cell2D& finer) const {
    if (finer.depth < depth) return false;
    const Index ratio = pow3(finer.depth - depth);
    return finer.col / ratio == col && finer.row / ratio == row;
}

void validate(const ParamInterval& iv) {
    check_depth(iv.depth);
    if (iv.index < 0 || iv.index >= pow9(iv.depth))
        throw ValidationError("interval index " + std::to_string(iv.index) +
                              " outside [0, 9^" + std::to_string(iv.depth) + ")");
}

void validate(const Cell2D& cell) {
    check_depth(cell.depth);
    const Index n = pow3(cell.depth);
    if (cell.col < 0 || cell.col >= n || cell.row < 0 || cell.row >= n)
        throw ValidationError("cell (" + std::to_string(cell.col) + "," +
                              std::to_string(cell.row) + ") outside the depth-" +
                              std::to_string(cell.depth) + " grid");
}

Cell2D cell_of_interval(const ParamInterval& iv) { return descend(iv).first; }

CurveOrientation orientation_of_interval(const ParamInterval& iv) { return descend(iv).second; }

ParamInterval interval_of_cell(const Cell2D& cell) {
    validate(cell);
    CurveOrientation orient;
    Index index = 0;
    Index place = pow3(cell.depth);
    for (int level = 0; level < cell.depth; ++level) {
        place /= 3;
        const int ac = static_cast<int>((cell.col / place) % 3);
        const int ar = static_cast<int>((cell.row / place) % 3);
        const int c = orient.flip_x ? 2 - ac : ac;
        const int r = orient.flip_y ? 2 - ar : ar;
        index = 9 * index + digit_of(c, r);
        orient = orient.compose(sub_orientation(c, r));
    }
    return {cell.depth, index};
}

ParamInterval interval_containing(double t, int depth) {
    check_depth(depth);
    if (!(t >= 0.0 && t <= 1.0))
        throw ValidationError("curve parameter t = " + std::to_string(t) + " outside [0, 1]");
    const Index n = pow9(depth);
    const Index j = detail::floor_scaled(t, n);
    return {depth, j >= n ? n - 1 : j};
}

ParamInterval interval_containing(Index num, Index den, int depth) {
    check_depth(depth);
    if (den <= 0 || num < 0 || num > den)
        throw ValidationError("rational parameter " + std::to_string(num) + "/" +
                              std::to_string(den) + " outside [0, 1]");
    const Index n = pow9(depth);
    const auto j = static_cast<Index>(static_cast<__int128>(num) * n / den);
    return {depth, j >= n ? n - 1 : j};
}

Point2 eval_point(double t, int depth) {
    return cell_of_interval(interval_containing(t, depth)).center();
}

Point2 curve_vertex(int depth, Index j) {
    check_depth(depth);
    const Index n = pow9(depth);
    if (j < 0 || j > n)
        throw ValidationError("vertex index " + std::to_string(j) + " outside [0, 9^d]");
    if (j == n) return {1.0, 1.0};
    const auto [cell, orient] = descend({depth, j});
    const Point2 base = cell.lower_left();
    const double s = cell.side();
    return {base.x + (orient.flip_x ? s : 0.0), base.y + (orient.flip_y ? s : 0.0)};
}

bool edge_adjacent(const Cell2D& a, const Cell2D& b) {
    if (a.depth != b.depth) return false;
    const Index dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    const Index dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    return dc + dr == 1;
}

SurjectivityReport surjectivity_report(int depth) {
    if (depth < 0 || depth > kMaxEnumerationDepth)
        throw ValidationError("exhaustive enumeration limited to depth <= " +
                              std::to_string(kMaxEnumerationDepth) + " (got " +
                              std::to_string(depth) + ")");
    SurjectivityReport report;
    report.depth = depth;
    const Index n = pow9(depth);
    const Index side = pow3(depth);
    report.cell_count = n;
    report.permutation.resize(static_cast<std::size_t>(n));
    std::vector<unsigned char> hits(static_cast<std::size_t>(n), 0);
    for (Index j = 0; j < n; ++j) {
        const Cell2D cell = cell_of_interval({depth, j});
        const Index flat = cell.row * side + cell.col;
        report.permutation[static_cast<std::size_t>(j)] = flat;
        auto& h = hits[static_cast<std::size_t>(flat)];
        if (h == 1) ++report.multiply_hit;
        if (h < 2) ++h;
    }
    for (auto h : hits)
        if (h > 0) ++report.covered;
    report.bijection = report.covered == n && report.multiply_hit == 0;
    return report;
}

}  // namespace curvespec
