#pragma once

// Finite-resolution outer covers of compact sets in the plane and the line.

#include <complex>
#include <span>
#include <vector>

#include "curvespec/curve.hpp"

namespace curvespec {

using Complex = std::complex<double>;

// Similarity z -> ((z - center) / scale) + (1/2, 1/2) onto the unit square.
struct AffineFrame {
    Complex center{0.5, 0.5};
    double scale = 1.0;

    // center (0.5, 0.5), scale 1: coordinates pass through unchanged
    static AffineFrame unit_square() { return {}; }

    Point2 embed(Complex z) const;
    Complex restore(Point2 p) const;
    bool operator==(const AffineFrame&) const = default;
};

struct GridSet2D {
    int depth = 0;
    std::vector<Cell2D> cells;  // sorted by (col, row), unique

    GridSet2D() = default;
    GridSet2D(int depth, std::vector<Cell2D> cells);

    static GridSet2D full(int depth);

    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }
    bool contains(const Cell2D& cell) const;
    bool operator==(const GridSet2D&) const = default;
};

struct GridSet1D {
    int depth = 0;
    std::vector<Index> intervals;  // sorted, unique

    GridSet1D() = default;
    GridSet1D(int depth, std::vector<Index> intervals);

    bool empty() const { return intervals.empty(); }
    std::size_t size() const { return intervals.size(); }
    bool contains(Index j) const;
    bool operator==(const GridSet1D&) const = default;
};

// Cell containing the embedded point, floor convention, u = 1 goes to the last cell.
Cell2D cell_of_point(Point2 p, int depth);

GridSet2D rasterize(std::span<const Complex> points, const AffineFrame& frame, int depth);

struct NormalizedSpectrum {
    AffineFrame frame;
    GridSet2D cover;
};

// Frame mapping the bounding square of eigs, enlarged so its points sit in
// [0.05, 0.95]^2, onto the unit square; together with the depth-d cover.
NormalizedSpectrum normalize_spectrum(std::span<const Complex> eigs, int depth);

// Symmetric Hausdorff distance between the cell-centre sets.
double hausdorff(const GridSet2D& a, const GridSet2D& b);

GridSet2D coarsen(const GridSet2D& set);
GridSet2D set_union(const GridSet2D& a, const GridSet2D& b);
bool is_subset(const GridSet2D& a, const GridSet2D& b);

}  // namespace curvespec
