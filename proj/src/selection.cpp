#include "curvespec/selection.hpp"

#include <algorithm>
#include <cmath>

#include "curvespec/errors.hpp"
#include "exact_floor.hpp"

namespace curvespec {

SelectionTable::SelectionTable(GridSet2D lambda_cells, GridSet1D k, std::vector<SelectionEntry> entries)
    : lambda_(std::move(lambda_cells)), k_(std::move(k)), entries_(std::move(entries)) {}

Index SelectionTable::psi_index(const Cell2D& cell) const {
    const auto& cells = lambda_.cells;
    const auto it = std::lower_bound(cells.begin(), cells.end(), cell, [](const Cell2D& a, const Cell2D& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    if (it == cells.end() || *it != cell)
        throw ValidationError("cell not in the selection cover at depth " + std::to_string(depth()));
    return entries_[static_cast<std::size_t>(it - cells.begin())].t_num;
}

double SelectionTable::psi(const Cell2D& cell) const {
    return static_cast<double>(psi_index(cell)) / static_cast<double>(denominator());
}

Cell2D SelectionTable::phi(Index j) const {
    if (!k_.contains(j)) throw ValidationError("interval " + std::to_string(j) + " not in K");
    return cell_of_interval({depth(), j});
}

GridSet1D preimage(const GridSet2D& lambda) {
    if (lambda.empty()) throw PreconditionError("preimage: empty cover (Λ must be non-empty)");
    std::vector<Index> k;
    k.reserve(lambda.size());
    for (const auto& cell : lambda.cells) k.push_back(interval_of_cell(cell).index);
    return GridSet1D(lambda.depth, std::move(k));
}

SelectionTable build_selection(const GridSet2D& lambda) {
    GridSet1D k = preimage(lambda);
    // Fold over K: keep the least interval mapping to each cell.
    std::vector<Index> best(lambda.size(), -1);
    for (Index j : k.intervals) {
        const Cell2D cell = cell_of_interval({lambda.depth, j});
        const auto it = std::lower_bound(lambda.cells.begin(), lambda.cells.end(), cell,
                                         [](const Cell2D& a, const Cell2D& b) {
                                             return a.col != b.col ? a.col < b.col : a.row < b.row;
                                         });
        auto& slot = best[static_cast<std::size_t>(it - lambda.cells.begin())];
        if (slot < 0 || j < slot) slot = j;
    }
    std::vector<SelectionEntry> entries;
    entries.reserve(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) entries.push_back({lambda.cells[i], best[i]});
    return SelectionTable(lambda, std::move(k), std::move(entries));
}

namespace {

void check_threshold(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("sublevel threshold must lie in [0, 1]");
}

}  // namespace

GridSet2D sublevel(const SelectionTable& ts, double r) {
    check_threshold(r);
    // psi <= r  <=>  t_num <= floor(r 9^d)
    const Index cutoff = detail::floor_scaled(r, ts.denominator());
    std::vector<Cell2D> cells;
    for (const auto& e : ts.entries())
        if (e.t_num <= cutoff) cells.push_back(e.cell);
    return GridSet2D(ts.depth(), std::move(cells));
}

GridSet2D sublevel_from_parameters(const SelectionTable& ts, double r) {
    check_threshold(r);
    // [j, j+1) 9^-d inside [0, r + 9^-d)  <=>  j + 1 <= r 9^d + 1, exact since j + 1 is an integer
    const Index reach = detail::floor_scaled(r, ts.denominator()) + 1;
    std::vector<Cell2D> cells;
    for (Index j : ts.k().intervals) {
        if (j + 1 <= reach) cells.push_back(cell_of_interval({ts.depth(), j}));
    }
    return GridSet2D(ts.depth(), std::move(cells));
}

SelectionTable refine_selection(const SelectionTable& ts, std::span<const Complex> points,
                                const AffineFrame& frame) {
    return build_selection(rasterize(points, frame, ts.depth() + 1));
}

RefinementCheck refinement_monotone(const SelectionTable& coarse, const SelectionTable& fine,
                                    std::span<const Complex> points, const AffineFrame& frame) {
    if (fine.depth() != coarse.depth() + 1)
        throw ValidationError("refinement_monotone: tables must be at consecutive depths");
    RefinementCheck check;
    for (const Complex& z : points) {
        const Point2 p = frame.embed(z);
        RefinementCheck::PointValues v;
        v.coarse_num = coarse.psi_index(cell_of_point(p, coarse.depth()));
        v.fine_num = fine.psi_index(cell_of_point(p, fine.depth()));
        // compare fine_num / 9^(d+1) >= coarse_num / 9^d
        v.monotone = v.fine_num >= 9 * v.coarse_num;
        check.monotone = check.monotone && v.monotone;
        check.points.push_back(v);
    }
    return check;
}

}  // namespace curvespec
