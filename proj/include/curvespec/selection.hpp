#pragma once

// Preimage K = f^-1(Λ) of a cell cover, the restriction φ = f|_K, and the
// least-parameter right inverse ψ: Λ -> K.

#include <span>
#include <vector>

#include "curvespec/compact.hpp"
#include "curvespec/curve.hpp"

namespace curvespec {

struct SelectionEntry {
    Cell2D cell;
    Index t_num = 0;  // ψ(cell) = t_num / 9^depth
};

class SelectionTable {
public:
    SelectionTable() = default;
    SelectionTable(GridSet2D lambda_cells, GridSet1D k, std::vector<SelectionEntry> entries);

    int depth() const { return lambda_.depth; }
    Index denominator() const { return pow9(lambda_.depth); }
    const GridSet2D& lambda_cells() const { return lambda_; }
    const GridSet1D& k() const { return k_; }
    // one per cell of lambda_cells(), same order
    const std::vector<SelectionEntry>& entries() const { return entries_; }

    // Throws ValidationError if `cell` is not in the cover.
    Index psi_index(const Cell2D& cell) const;
    double psi(const Cell2D& cell) const;
    // φ at resolution: interval index of K -> its cell
    Cell2D phi(Index j) const;

private:
    GridSet2D lambda_;
    GridSet1D k_;
    std::vector<SelectionEntry> entries_;
};

GridSet1D preimage(const GridSet2D& lambda);

SelectionTable build_selection(const GridSet2D& lambda);

// {z in Λ : ψ(z) <= r}
GridSet2D sublevel(const SelectionTable& ts, double r);

// Cell image of the j in K whose half-open interval [j, j+1) 9^-d lies in
// [0, r + 9^-d), each j being the unique, hence minimal, preimage interval of
// its cell.  Equal to sublevel(ts, r).
GridSet2D sublevel_from_parameters(const SelectionTable& ts, double r);

// Selection for the same points re-rasterized one level deeper.
SelectionTable refine_selection(const SelectionTable& ts, std::span<const Complex> points,
                                const AffineFrame& frame);

struct RefinementCheck {
    struct PointValues {
        Index coarse_num = 0;  // over 9^d
        Index fine_num = 0;    // over 9^(d+1)
        bool monotone = false;
    };
    std::vector<PointValues> points;
    bool monotone = true;
};

// ψ_{d+1}(cell_{d+1}(λ)) >= ψ_d(cell_d(λ)) at every point, compared exactly.
RefinementCheck refinement_monotone(const SelectionTable& coarse, const SelectionTable& fine,
                                    std::span<const Complex> points, const AffineFrame& frame);

}  // namespace curvespec
