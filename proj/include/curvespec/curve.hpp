#pragma once

// Peano curve f: [0,1] -> [0,1]^2 at finite subdivision depth.
//
// At depth d the parameter interval [0,1] is cut into 9^d closed intervals
// [j 9^-d, (j+1) 9^-d] and the square into 3^d x 3^d closed cells.  The curve
// maps interval j exactly onto one cell; the map is computed digit by digit in
// base 9, carrying the reflection state of the current sub-square.
//
// Variant: the nine sub-squares are visited in serpentine column order
//
//     2 3 8
//     1 4 7
//     0 5 6
//
// and the sub-square in local column c, row r is traversed by a copy of the
// curve reflected in x when r == 1 and reflected in y when c == 1.  The curve
// starts at (0,0) and ends at (1,1).

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

namespace curvespec {

using Index = std::int64_t;

inline constexpr int kMaxDepth = 19;             // 9^19 < 2^63
inline constexpr int kMaxEnumerationDepth = 6;   // 9^6 = 531441 intervals

Index pow3(int depth);
Index pow9(int depth);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2 a, Point2 b);

struct ParamInterval {
    int depth = 0;
    Index index = 0;

    double left() const;
    double right() const;
    ParamInterval child(int digit) const;
    ParamInterval parent() const;

    auto operator<=>(const ParamInterval&) const = default;
};

struct Cell2D {
    int depth = 0;
    Index col = 0;
    Index row = 0;

    double side() const;
    double diameter() const;
    Point2 center() const;
    Point2 lower_left() const;
    Cell2D parent() const;
    bool contains(const Cell2D& finer) const;

    auto operator<=>(const Cell2D&) const = default;
};

// Reflection state of a sub-square; the four states form the Klein group.
struct CurveOrientation {
    bool flip_x = false;
    bool flip_y = false;

    static constexpr CurveOrientation identity() { return {}; }
    CurveOrientation compose(CurveOrientation other) const {
        return {flip_x != other.flip_x, flip_y != other.flip_y};
    }
    auto operator<=>(const CurveOrientation&) const = default;
};

// Throw ValidationError unless 0 <= depth <= kMaxDepth and the index/coords fit.
void validate(const ParamInterval& iv);
void validate(const Cell2D& cell);

Cell2D cell_of_interval(const ParamInterval& iv);
// Inverse of cell_of_interval at the same depth.
ParamInterval interval_of_cell(const Cell2D& cell);
// Orientation of the curve inside the cell of `iv` (composition of all digit states).
CurveOrientation orientation_of_interval(const ParamInterval& iv);

// Depth-d interval containing t: floor(t 9^d), with t = 1 assigned to 9^d - 1.
ParamInterval interval_containing(double t, int depth);
ParamInterval interval_containing(Index num, Index den, int depth);

// Centre of the cell of the depth-d interval containing t; within sqrt(2)/2 3^-d of f(t).
Point2 eval_point(double t, int depth);

// Exact curve value f(j 9^-d) for 0 <= j <= 9^d: the corner where the curve
// enters cell j (or (1,1) for j = 9^d).
Point2 curve_vertex(int depth, Index j);

bool edge_adjacent(const Cell2D& a, const Cell2D& b);

struct SurjectivityReport {
    int depth = 0;
    Index cell_count = 0;       // 9^d
    Index covered = 0;          // distinct cells hit
    Index multiply_hit = 0;     // cells hit more than once
    bool bijection = false;
    // permutation[j] = row * 3^d + col of cell_of_interval(j)
    std::vector<Index> permutation;
};

// Exhaustive enumeration; depth limited to kMaxEnumerationDepth.
SurjectivityReport surjectivity_report(int depth);

}  // namespace curvespec
