#pragma once

// Spectral model of a normal matrix with a cyclic vector: atomic spectral
// measure μ, its image γ = μ∘ψ^-1 on the curve parameter line, the transport
// unitary g -> g∘ψ, and the Hermitian multiplication operator B on L²(γ).

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "curvespec/compact.hpp"
#include "curvespec/selection.hpp"

namespace curvespec {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kNormalityTolerance = 1e-10;   // relative to ‖A‖_F²
inline constexpr double kEigenResidualTolerance = 1e-8; // relative to ‖A‖
inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kMinAtomWeight = 1e-10;
inline constexpr double kMergeTolerance = 1e-8;         // relative to ‖A‖

// ‖AA* - A*A‖_F
double normality_defect(const Matrix& a);

double operator_norm(const Matrix& a);

class NormalMatrix {
public:
    // Throws PreconditionError when ‖AA* - A*A‖_F > kNormalityTolerance ‖A‖_F².
    explicit NormalMatrix(Matrix a);

    const Matrix& matrix() const { return a_; }
    Eigen::Index dim() const { return a_.rows(); }
    double defect() const { return defect_; }

private:
    Matrix a_;
    double defect_ = 0.0;
};

struct Eigenpairs {
    Vector values;
    Matrix vectors;          // unitary columns
    std::string backend;     // "hermitian-pair" or "schur"
    double residual = 0.0;   // max_i ‖A v_i - λ_i v_i‖
    double unitarity_error = 0.0;
};

// Eigenvectors of (A + A*)/2 + θ (A - A*)/(2i); the two Hermitian parts commute when A is normal.
Eigenpairs hermitian_pair_eigensolve(const Matrix& a);
// Complex Schur form A = Q T Q*, T diagonal up to round-off for normal A.
Eigenpairs schur_eigensolve(const Matrix& a);
// hermitian-pair, falling back to Schur when residual or unitarity tolerances fail.
Eigenpairs normal_eigensolve(const Matrix& a);

struct SpectralAtom {
    Complex point;
    double weight = 0.0;
};

struct SpectralMeasure {
    std::vector<SpectralAtom> atoms;

    double total_mass() const;
    std::vector<Complex> points() const;
};

struct SpectralModel {
    Eigenpairs eigen;
    Vector cyclic;
    std::vector<double> eigen_weights;             // |<v_i, x>|²
    SpectralMeasure mu;                            // distinct eigenvalues, sorted (re, im)
    std::vector<std::size_t> atom_of_eigenpair;
    double norm = 0.0;                             // ‖A‖_op
    double normality_defect = 0.0;
    double multiplication_residual = 0.0;          // ‖V diag(λ) V* - A‖_op
};

Vector default_cyclic_vector(Eigen::Index n);

SpectralModel build_model(const NormalMatrix& a, const Vector& x);

struct ParameterAtom {
    Index index = 0;  // point = index / 9^depth
    double weight = 0.0;
};

struct ParameterMeasure {
    int depth = 0;
    std::vector<ParameterAtom> atoms;  // sorted by index, distinct

    double point(std::size_t i) const;
    double total_mass() const;
};

struct Pushforward {
    ParameterMeasure gamma;
    std::vector<std::size_t> target;  // μ-atom i lands on γ-atom target[i]
};

Pushforward pushforward(const SpectralMeasure& mu, const SelectionTable& ts, const AffineFrame& frame);

double weighted_norm(const Vector& g, std::span<const double> weights);

// g -> g∘ψ from L²(γ) to L²(μ).  matrix() is its representation in the
// orthonormal bases {1_atom / sqrt(weight)}.
class TransportOperator {
public:
    TransportOperator(std::vector<double> mu_weights, std::vector<double> gamma_weights,
                      std::vector<std::size_t> target);

    const RealMatrix& matrix() const { return matrix_; }
    const std::vector<double>& mu_weights() const { return mu_weights_; }
    const std::vector<double>& gamma_weights() const { return gamma_weights_; }

    // (Tg)_i = g_{target[i]}
    Vector apply(const Vector& g) const;
    // (T* f)_k = f at the μ-atom paired with k, i.e. f∘φ
    Vector adjoint_apply(const Vector& f) const;
    // max(‖T*T - I‖_max, ‖TT* - I‖_max) in orthonormal coordinates
    double unitarity_error() const;

private:
    std::vector<double> mu_weights_;
    std::vector<double> gamma_weights_;
    std::vector<std::size_t> target_;
    std::vector<std::size_t> source_;
    RealMatrix matrix_;
};

TransportOperator build_transport(const SpectralMeasure& mu, const Pushforward& push);

// B = diag(points of γ)
RealMatrix hermitian_model(const ParameterMeasure& gamma);
// Same from raw points; throws ValidationError on a point with non-zero imaginary part.
RealMatrix hermitian_model(std::span<const Complex> points);

// Entrywise φ_d on the diagonal of B: parameter -> interval -> cell centre -> frame coordinates.
Matrix reconstruct(const RealMatrix& b, const SelectionTable& ts, const AffineFrame& frame);

// max_i |φ_d(B)_{target[i]} - λ_i|
double reconstruction_error(const SpectralMeasure& mu, const Pushforward& push, const Matrix& phi_b);

Matrix random_unitary(Eigen::Index n, std::mt19937_64& rng);

}  // namespace curvespec
