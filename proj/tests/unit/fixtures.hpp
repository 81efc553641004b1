#pragma once

#include "ncmart/types.hpp"
#include "ncmart/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <random>

namespace fixtures {

using ncmart::Complex;
using ncmart::Index;
using ncmart::Matrix;
using ncmart::RealVector;

inline Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = static_cast<Index>(rows.begin()->size());
    Matrix m(r, c);
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (const auto& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Matrix diag(std::initializer_list<double> d) {
    Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index i = 0;
    for (double v : d) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

inline Matrix unit(Index n, Index i, Index j) {
    Matrix m = Matrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
    }
    return m;
}

inline Matrix gaussian(std::mt19937_64& rng, Index n) { return gaussian(rng, n, n); }

inline Matrix hermitian(std::mt19937_64& rng, Index n) {
    const Matrix g = gaussian(rng, n);
    return (g + g.adjoint()) / 2.0;
}

inline Matrix positive(std::mt19937_64& rng, Index n) {
    const Matrix g = gaussian(rng, n);
    return g.adjoint() * g;
}

inline Matrix unitary(std::mt19937_64& rng, Index n) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n));
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Orthonormal columns spanning a random r-dimensional subspace.
inline Matrix frame(std::mt19937_64& rng, Index n, Index r) {
    return unitary(rng, n).leftCols(r);
}

/// Spectral norm through a one-sided Jacobi SVD, independent of the library.
inline double spectral_norm(const Matrix& x) {
    if (x.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(x);
    return svd.singularValues()(0);
}

inline double dist(const Matrix& a, const Matrix& b) { return spectral_norm(a - b); }

/// Σ_j s_j for unit weights, through a Jacobi SVD.
inline double trace_norm(const Matrix& x) {
    Eigen::JacobiSVD<Matrix> svd(x);
    return svd.singularValues().sum();
}

} // namespace fixtures
