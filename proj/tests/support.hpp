#pragma once

// Test-only generators and brute-force oracles.  Nothing here calls the code
// path it is used to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvespec/spectral.hpp"

namespace curvespec::testing {

// Peano's construction by whole-curve recursion: the depth-(d+1) cell sequence
// is nine reflected, translated copies of the depth-d sequence.
inline std::vector<std::pair<Index, Index>> recursive_peano_cells(int depth) {
    std::vector<std::pair<Index, Index>> seq{{0, 0}};
    Index n = 1;
    for (int level = 0; level < depth; ++level) {
        std::vector<std::pair<Index, Index>> next;
        next.reserve(seq.size() * 9);
        for (int k = 0; k < 9; ++k) {
            const int c = k / 3;
            const int r = c % 2 == 0 ? k % 3 : 2 - k % 3;
            const bool fx = r == 1;
            const bool fy = c == 1;
            for (auto [x, y] : seq) {
                const Index xx = fx ? n - 1 - x : x;
                const Index yy = fy ? n - 1 - y : y;
                next.emplace_back(c * n + xx, r * n + yy);
            }
        }
        seq = std::move(next);
        n *= 3;
    }
    return seq;
}

inline Matrix random_normal(int n, std::mt19937_64& rng, double half_width = 2.0, Vector* eigenvalues = nullptr,
                            Matrix* eigenvectors = nullptr) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    Vector ev(n);
    for (int i = 0; i < n; ++i) ev(i) = Complex(u(rng), u(rng));
    const Matrix q = random_unitary(n, rng);
    if (eigenvalues) *eigenvalues = ev;
    if (eigenvectors) *eigenvectors = q;
    return q * ev.asDiagonal() * q.adjoint();
}

inline Matrix random_hermitian_unit_spectrum(int n, std::mt19937_64& rng, Eigen::VectorXd* spectrum = nullptr) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd ev(n);
    for (int i = 0; i < n; ++i) ev(i) = u(rng);
    const Matrix q = random_unitary(n, rng);
    if (spectrum) *spectrum = ev;
    Matrix h = q * ev.cast<Complex>().asDiagonal() * q.adjoint();
    return 0.5 * (h + h.adjoint());
}

inline Matrix laplacian(int n) {
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = 2.0;
        if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -1.0;
    }
    return h;
}

inline Vector random_unit_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = Complex(g(rng), g(rng));
    return x / x.norm();
}

inline double op_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace curvespec::testing
