#include "curvespec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "curvespec/errors.hpp"

namespace curvespec {

namespace {

constexpr double kPairMix = 0.6180339887498949;

double unitarity_error_of(const Matrix& v) {
    const auto n = v.cols();
    return (v.adjoint() * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

void fill_diagnostics(const Matrix& a, Eigenpairs& e) {
    if (a.rows() == 0) return;
    const Matrix r = a * e.vectors - e.vectors * e.values.asDiagonal();
    e.residual = r.colwise().norm().maxCoeff();
    e.unitarity_error = unitarity_error_of(e.vectors);
}

std::string format_complex(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

double normality_defect(const Matrix& a) {
    return (a * a.adjoint() - a.adjoint() * a).norm();
}

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

NormalMatrix::NormalMatrix(Matrix a) : a_(std::move(a)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols())
        throw ValidationError("matrix must be square and non-empty");
    if (!a_.allFinite()) throw ValidationError("matrix has non-finite entries");
    defect_ = normality_defect(a_);
    const double fro = a_.norm();
    if (defect_ > kNormalityTolerance * fro * fro) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "normality check failed: ‖AA*−A*A‖_F = " << defect_ << " > " << kNormalityTolerance
            << "·‖A‖_F² = " << kNormalityTolerance * fro * fro;
        throw PreconditionError(msg.str());
    }
}

Eigenpairs hermitian_pair_eigensolve(const Matrix& a) {
    const Complex i(0.0, 1.0);
    const Matrix re_part = 0.5 * (a + a.adjoint());
    const Matrix im_part = (a - a.adjoint()) / (2.0 * i);
    const Matrix mixed = re_part + kPairMix * im_part;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (mixed + mixed.adjoint()));
    if (solver.info() != Eigen::Success) throw PreconditionError("Hermitian eigensolver did not converge");
    Eigenpairs e;
    e.backend = "hermitian-pair";
    e.vectors = solver.eigenvectors();
    e.values.resize(a.rows());
    for (Eigen::Index k = 0; k < a.rows(); ++k)
        e.values(k) = e.vectors.col(k).dot(a * e.vectors.col(k));  // v* A v
    fill_diagnostics(a, e);
    return e;
}

Eigenpairs schur_eigensolve(const Matrix& a) {
    Eigen::ComplexSchur<Matrix> schur(a);
    if (schur.info() != Eigen::Success) throw PreconditionError("Schur decomposition did not converge");
    Eigenpairs e;
    e.backend = "schur";
    e.vectors = schur.matrixU();
    e.values = schur.matrixT().diagonal();
    fill_diagnostics(a, e);
    return e;
}

Eigenpairs normal_eigensolve(const Matrix& a) {
    const double tol = kEigenResidualTolerance * operator_norm(a);
    Eigenpairs pair = hermitian_pair_eigensolve(a);
    if (pair.residual <= tol && pair.unitarity_error <= kUnitarityTolerance) return pair;
    Eigenpairs schur = schur_eigensolve(a);
    if (schur.residual <= tol && schur.unitarity_error <= kUnitarityTolerance) return schur;
    return pair.residual <= schur.residual ? pair : schur;
}

double SpectralMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& atom : atoms) s += atom.weight;
    return s;
}

std::vector<Complex> SpectralMeasure::points() const {
    std::vector<Complex> p;
    p.reserve(atoms.size());
    for (const auto& atom : atoms) p.push_back(atom.point);
    return p;
}

Vector default_cyclic_vector(Eigen::Index n) {
    return Vector::Ones(n) / std::sqrt(static_cast<double>(n));
}

SpectralModel build_model(const NormalMatrix& a, const Vector& x) {
    const Eigen::Index n = a.dim();
    if (x.size() != n)
        throw ValidationError("cyclic vector has length " + std::to_string(x.size()) + ", expected " +
                              std::to_string(n));
    if (std::abs(x.norm() - 1.0) > 1e-12) throw ValidationError("cyclic vector must have unit norm");

    SpectralModel model;
    model.normality_defect = a.defect();
    model.norm = operator_norm(a.matrix());
    model.eigen = normal_eigensolve(a.matrix());
    const double tol = kEigenResidualTolerance * model.norm;
    if (model.eigen.residual > tol || model.eigen.unitarity_error > kUnitarityTolerance) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "eigendecomposition failed tolerances: residual " << model.eigen.residual << " (limit " << tol
            << "), unitarity error " << model.eigen.unitarity_error;
        throw PreconditionError(msg.str());
    }
    model.cyclic = x;
    const Matrix& v = model.eigen.vectors;
    model.multiplication_residual =
        operator_norm(v * model.eigen.values.asDiagonal() * v.adjoint() - a.matrix());

    model.eigen_weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        model.eigen_weights[static_cast<std::size_t>(k)] = std::norm(v.col(k).dot(x));

    // Merge repeated eigenvalues (union-find over pairs closer than the tolerance).
    const double merge_tol = kMergeTolerance * model.norm;
    std::vector<std::size_t> root(static_cast<std::size_t>(n));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t i) {
        while (root[i] != i) i = root[i] = root[root[i]];
        return i;
    };
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q)
            if (std::abs(model.eigen.values(p) - model.eigen.values(q)) <= merge_tol)
                root[find(static_cast<std::size_t>(q))] = find(static_cast<std::size_t>(p));

    struct Group {
        Complex sum;
        double weight = 0.0;
        std::size_t count = 0;
        std::vector<std::size_t> members;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> group_of_root(static_cast<std::size_t>(n), SIZE_MAX);
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
        const std::size_t r = find(k);
        if (group_of_root[r] == SIZE_MAX) {
            group_of_root[r] = groups.size();
            groups.emplace_back();
        }
        Group& g = groups[group_of_root[r]];
        g.sum += model.eigen.values(static_cast<Eigen::Index>(k));
        g.weight += model.eigen_weights[k];
        ++g.count;
        g.members.push_back(k);
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    auto point_of = [&](std::size_t g) { return groups[g].sum / static_cast<double>(groups[g].count); };
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        const Complex a_ = point_of(l), b_ = point_of(r);
        return a_.real() != b_.real() ? a_.real() < b_.real() : a_.imag() < b_.imag();
    });
    model.atom_of_eigenpair.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
        const Group& g = groups[order[slot]];
        const Complex point = point_of(order[slot]);
        if (g.weight < kMinAtomWeight) {
            std::ostringstream msg;
            msg.precision(3);
            msg << "not cyclic for this vector: eigenvalue " << format_complex(point) << " carries weight "
                << g.weight << " < " << kMinAtomWeight << " (try --vector random)";
            throw PreconditionError(msg.str());
        }
        model.mu.atoms.push_back({point, g.weight});
        for (std::size_t k : g.members) model.atom_of_eigenpair[k] = slot;
    }
    return model;
}

double ParameterMeasure::point(std::size_t i) const {
    return static_cast<double>(atoms[i].index) / static_cast<double>(pow9(depth));
}

double ParameterMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& atom : atoms) s += atom.weight;
    return s;
}

Pushforward pushforward(const SpectralMeasure& mu, const SelectionTable& ts, const AffineFrame& frame) {
    Pushforward push;
    push.gamma.depth = ts.depth();
    std::vector<Index> index_of_atom;
    index_of_atom.reserve(mu.atoms.size());
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const Point2 p = frame.embed(mu.atoms[i].point);
        Cell2D cell;
        try {
            cell = cell_of_point(p, ts.depth());
        } catch (const ValidationError& e) {
            throw PreconditionError(std::string("pushforward: atom outside the frame: ") + e.what());
        }
        if (!ts.lambda_cells().contains(cell))
            throw PreconditionError("pushforward: atom #" + std::to_string(i) + " " +
                                    format_complex(mu.atoms[i].point) +
                                    " is not covered by Λ at this resolution; increase --depth");
        index_of_atom.push_back(ts.psi_index(cell));
    }
    std::vector<Index> distinct = index_of_atom;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    push.gamma.atoms.reserve(distinct.size());
    for (Index j : distinct) push.gamma.atoms.push_back({j, 0.0});
    push.target.resize(mu.atoms.size());
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), index_of_atom[i]) - distinct.begin());
        push.target[i] = k;
        push.gamma.atoms[k].weight += mu.atoms[i].weight;
    }
    return push;
}

double weighted_norm(const Vector& g, std::span<const double> weights) {
    if (static_cast<std::size_t>(g.size()) != weights.size())
        throw ValidationError("weighted_norm: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * std::norm(g(static_cast<Eigen::Index>(i)));
    return std::sqrt(s);
}

TransportOperator::TransportOperator(std::vector<double> mu_weights, std::vector<double> gamma_weights,
                                     std::vector<std::size_t> target)
    : mu_weights_(std::move(mu_weights)), gamma_weights_(std::move(gamma_weights)), target_(std::move(target)) {
    const std::size_t m = mu_weights_.size();
    const std::size_t g = gamma_weights_.size();
    if (target_.size() != m) throw ValidationError("transport: pairing length mismatch");
    if (m != g)
        throw PreconditionError("transport: mismatched atom counts (" + std::to_string(m) + " spectrum atoms, " +
                                std::to_string(g) +
                                " parameter atoms); two eigenvalues share a cell, increase --depth");
    source_.assign(g, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) {
        if (target_[i] >= g || source_[target_[i]] != SIZE_MAX)
            throw PreconditionError("transport: pairing is not a bijection");
        source_[target_[i]] = i;
    }
    matrix_ = RealMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < m; ++i)
        matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(target_[i])) =
            std::sqrt(mu_weights_[i]) / std::sqrt(gamma_weights_[target_[i]]);
}

Vector TransportOperator::apply(const Vector& g) const {
    if (static_cast<std::size_t>(g.size()) != gamma_weights_.size())
        throw ValidationError("transport apply: length mismatch");
    Vector f(static_cast<Eigen::Index>(target_.size()));
    for (std::size_t i = 0; i < target_.size(); ++i)
        f(static_cast<Eigen::Index>(i)) = g(static_cast<Eigen::Index>(target_[i]));
    return f;
}

Vector TransportOperator::adjoint_apply(const Vector& f) const {
    if (static_cast<std::size_t>(f.size()) != mu_weights_.size())
        throw ValidationError("transport adjoint: length mismatch");
    Vector g(static_cast<Eigen::Index>(source_.size()));
    for (std::size_t k = 0; k < source_.size(); ++k)
        g(static_cast<Eigen::Index>(k)) = f(static_cast<Eigen::Index>(source_[k]));
    return g;
}

double TransportOperator::unitarity_error() const {
    const auto m = matrix_.rows();
    const double a = (matrix_.transpose() * matrix_ - RealMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
    const double b = (matrix_ * matrix_.transpose() - RealMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
    return std::max(a, b);
}

TransportOperator build_transport(const SpectralMeasure& mu, const Pushforward& push) {
    std::vector<double> mw, gw;
    for (const auto& atom : mu.atoms) mw.push_back(atom.weight);
    for (const auto& atom : push.gamma.atoms) gw.push_back(atom.weight);
    return TransportOperator(std::move(mw), std::move(gw), push.target);
}

RealMatrix hermitian_model(const ParameterMeasure& gamma) {
    const auto n = static_cast<Eigen::Index>(gamma.atoms.size());
    RealMatrix b = RealMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) b(k, k) = gamma.point(static_cast<std::size_t>(k));
    return b;
}

RealMatrix hermitian_model(std::span<const Complex> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    RealMatrix b = RealMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex z = points[static_cast<std::size_t>(k)];
        if (z.imag() != 0.0)
            throw ValidationError("hermitian_model: atom point " + format_complex(z) + " is not real");
        b(k, k) = z.real();
    }
    return b;
}

Matrix reconstruct(const RealMatrix& b, const SelectionTable& ts, const AffineFrame& frame) {
    if (b.rows() != b.cols()) throw ValidationError("reconstruct: B must be square");
    const auto n = b.rows();
    if (n > 0 && (b - RealMatrix(b.diagonal().asDiagonal())).cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("reconstruct: B must be diagonal");
    const Index den = ts.denominator();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = b(k, k);
        const auto j = static_cast<Index>(std::llround(t * static_cast<double>(den)));
        if (!(std::abs(t * static_cast<double>(den) - static_cast<double>(j)) <= 1e-6) || !ts.k().contains(j)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "reconstruct: diagonal entry " << t << " is not a left endpoint of K at depth " << ts.depth();
            throw ValidationError(msg.str());
        }
        out(k, k) = frame.restore(ts.phi(j).center());
    }
    return out;
}

double reconstruction_error(const SpectralMeasure& mu, const Pushforward& push, const Matrix& phi_b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(push.target[i]);
        worst = std::max(worst, std::abs(phi_b(k, k) - mu.atoms[i].point));
    }
    return worst;
}

Matrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) g(r, c) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

}  // namespace curvespec
