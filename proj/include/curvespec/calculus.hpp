#pragma once

// Polynomial functional calculus on Hermitian matrices, a greedy
// spectral-window diagonalization H = D + C, and the assembly of a normal
// matrix model as φ(D) + L with L = φ(H) - φ(D).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvespec/selection.hpp"
#include "curvespec/spectral.hpp"

namespace curvespec {

// Continuous piecewise-linear map R -> C through (knot, value) pairs,
// constant to the left of the first knot and to the right of the last.
class ExtendedPhi {
public:
    ExtendedPhi(std::vector<double> knots, std::vector<Complex> values);

    Complex operator()(double t) const;
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<Complex>& values() const { return values_; }
    // largest |slope| over the segments
    double lipschitz() const;

private:
    std::vector<double> knots_;
    std::vector<Complex> values_;
};

// Knots at the left endpoints of K, values the frame image of each interval's cell centre.
ExtendedPhi extend_phi(const SelectionTable& ts, const AffineFrame& frame);

// p(t) = sum_k c_k T_k(2t - 1) on [0, 1].
struct PolyApprox {
    int degree = 0;
    int fitted_degree = 0;   // < degree when a lower-degree fit was kept because it was better
    std::vector<Complex> coefficients;
    double sup_error = 0.0;  // certified bound on sup_[0,1] |p - φ|
    double sup_error_re = 0.0;
    double sup_error_im = 0.0;
    double sampled_error = 0.0;
    std::size_t samples = 0;

    Complex operator()(double t) const;
};

// Least-squares fit on a dense Chebyshev grid with a certified error bound.
PolyApprox fit_polynomial(const ExtendedPhi& phi, int degree);

// Fits for strictly increasing degrees; sup_error is non-increasing along the result.
std::vector<PolyApprox> approx_sequence(const ExtendedPhi& phi, std::span<const int> degrees);

// Throws ValidationError unless H is Hermitian with spectrum in [0, 1].
void check_unit_spectrum(const Matrix& h);

// p(H) by the matrix Clenshaw recurrence.
Matrix apply_poly(const PolyApprox& p, const Matrix& h);

// φ(H) = V diag(φ(λ)) V* from a Hermitian eigendecomposition.
Matrix apply_function(const ExtendedPhi& phi, const Matrix& h);

struct SplitStep {
    std::size_t step = 0;
    Eigen::Index seed = 0;
    std::size_t pass = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double center = 0.0;    // μ_k, window midpoint
    double mass = 0.0;      // norm of the localized seed before normalization
    double residual = 0.0;  // ‖(H - μ_k) f_k‖
    double delta = 0.0;
    bool within_delta = false;
};

struct SkippedSeed {
    Eigen::Index seed = 0;
    std::size_t pass = 0;
    double residual_norm = 0.0;
};

struct DiagonalSplit {
    Matrix basis;                 // F, columns f_k
    Eigen::VectorXd diagonal;     // μ_k: D = diag(μ) in basis F
    Matrix remainder;             // C = H - F D F*
    std::vector<SplitStep> steps;
    std::vector<SkippedSeed> skipped;
    double window_width = 0.0;
    std::size_t window_count = 0;
    double unitarity_error = 0.0;
    double hs_norm = 0.0;         // ‖C‖_HS
    double hs_bound = 0.0;        // 2 (sum δ_k²)^1/2
    bool hs_within_bound = false;
    bool residuals_within_delta = false;

    Matrix diagonal_operator() const;  // F diag(μ) F*
};

// Orthonormal f_1..f_n built from the standard basis seeds: each seed's
// component orthogonal to the vectors already chosen is localized to the
// spectral window of H carrying the most of its mass, normalized, and paired
// with the window midpoint.  Windows are disjoint runs of eigenvalues of span
// at most min_k δ_k, so every residual is at most δ_k / 2 up to round-off.
DiagonalSplit split_diagonal(const Matrix& h, std::span<const double> schedule);

struct TelescopingCheck {
    int power = 0;
    double residual = 0.0;   // ‖((D+C)^k - D^k) - sum of mixed words‖_op
    double tolerance = 0.0;  // 1e-9 ‖H‖^k
    bool ok = false;
};

// (D+C)^k - D^k against the sum of all length-k words in {D, C} containing C.
std::vector<TelescopingCheck> telescoping_checks(const Matrix& d, const Matrix& c, int max_power);

struct TruncatedSpectrum {
    Eigen::Index size = 0;
    std::vector<double> singular_values;  // descending
};

// Singular values of the leading m x m blocks for m in {n/4, n/2, 3n/4, n} (rounded up, distinct).
std::vector<TruncatedSpectrum> truncated_singular_values(const Matrix& m);

std::vector<double> singular_values(const Matrix& m);

// round-off allowance when comparing consecutive ‖C_n - L‖ values, relative to max(1, ‖A‖)
inline constexpr double kCnSlack = 1e-12;

struct AssemblyOptions {
    int depth = 4;
    std::vector<int> degrees{8, 16, 32};
    std::vector<double> delta{0.05};  // one value is repeated to the model dimension
    std::uint64_t seed = 1;
};

struct DegreeTrace {
    int degree = 0;
    int fitted_degree = 0;
    double sup_error = 0.0;
    double cn_minus_l = 0.0;        // ‖C_n - L‖_op
    double cn_bound = 0.0;          // 2 sup_error
    double cn_norm = 0.0;           // ‖C_n‖_op
    double h_calculus_error = 0.0;  // ‖p_n(H) - φ(H)‖_op
    double d_calculus_error = 0.0;  // ‖p_n(D) - φ(D)‖_op
};

struct AssemblyReport {
    AssemblyOptions options;
    SpectralModel model;
    NormalizedSpectrum normalized;
    SelectionTable selection;
    Pushforward push;
    double transport_unitarity_error = 0.0;
    double transport_norm_error = 0.0;   // max |‖Tg‖/‖g‖ - 1| over the random probes
    double transport_roundtrip_error = 0.0;  // max |T T* f - f| over the probes
    RealMatrix b;
    Matrix phi_b;
    double reconstruction_error = 0.0;
    double reconstruction_bound = 0.0;   // frame.scale √2 3^-d

    Matrix rotation;                     // Q
    Matrix h;                            // Q B Q*
    DiagonalSplit split;
    ExtendedPhi phi{{0.0}, {Complex{}}};
    std::vector<PolyApprox> approximants;

    Matrix a_model;                      // φ_d(H) = Q φ_d(B) Q*
    Matrix phi_d;                        // φ(D)
    Matrix l;                            // A_model - φ(D)
    double l_norm = 0.0;
    double identity_residual = 0.0;      // ‖A_model - (φ(D) + L)‖_op
    double identity_tolerance = 0.0;     // 1e-10 ‖A‖
    double oracle_gap = 0.0;             // ‖A_model - φ(H) by eigendecomposition‖_op
    std::vector<DegreeTrace> traces;
    bool cn_nonincreasing = false;
    bool cn_within_bound = false;
    bool calculus_within_bound = false;
    std::vector<TelescopingCheck> telescoping;
    std::vector<TruncatedSpectrum> c_spectrum;
    std::vector<TruncatedSpectrum> l_spectrum;
};

AssemblyReport assemble_model(const NormalMatrix& a, const Vector& cyclic, const AssemblyOptions& options);

}  // namespace curvespec
