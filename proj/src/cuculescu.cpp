#include "ncmart/cuculescu.hpp"

#include "ncmart/norms.hpp"

#include <algorithm>
#include <string>

namespace ncmart {

namespace {

Matrix symmetrized(const Matrix& x, std::size_t k, double tol) {
    if (norm_within(x - x.adjoint(), tol)) return (x + x.adjoint()) / 2.0;
    const double drift = hermitian_defect(x);
    if (drift > tol * std::max(1.0, op_norm(x))) {
        throw InvariantViolation("cuculescu: term x_" + std::to_string(k) + " is not self-adjoint",
                                 drift);
    }
    return (x + x.adjoint()) / 2.0;
}

void check_matching(const Martingale& x, const CuculescuSequence& c, const char* who) {
    if (c.q.size() != x.length() + 1) {
        throw Error(std::string(who) + ": projection sequence has length " +
                    std::to_string(c.length()) + ", martingale has " + std::to_string(x.length()));
    }
    for (const auto& p : c.q) {
        if (p.dim() != x.dim()) throw Error(std::string(who) + ": dimension mismatch");
    }
}

} // namespace

CuculescuSequence cuculescu(const Martingale& x, double lambda, double tol) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error("cuculescu: lambda must be positive and finite");
    }
    CuculescuSequence c;
    c.lambda = lambda;
    c.q.push_back(Projection::identity(x.dim()));
    const Interval window = Interval::closed(-lambda, lambda);
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix xk = symmetrized(x.term(k), k, tol);
        const Projection& prev = c.q.back();
        if (prev.is_zero()) {
            c.q.push_back(prev);
            continue;
        }
        c.q.push_back(compressed_spectral_projection(xk, prev, window));
    }
    return c;
}

CuculescuDefects measure_cuculescu(const Martingale& x, const CuculescuSequence& c) {
    check_matching(x, c, "measure_cuculescu");
    const Filtration& f = *x.filtration();
    CuculescuDefects d;
    d.compression = -c.lambda;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix& qp = c.q[k - 1].matrix();
        const Matrix& qk = c.q[k].matrix();
        const Matrix& xk = x.term(k);
        d.decreasing = std::max(d.decreasing, op_norm(qp * qk - qk));
        d.adaptedness = std::max(d.adaptedness, op_norm(f.expectation(k, qk) - qk));
        const Matrix comp = qp * xk * qp;
        d.commutation = std::max(d.commutation, op_norm(qk * comp - comp * qk));
        const double nrm = op_norm(qk * xk * qk);
        d.max_compression_norm = std::max(d.max_compression_norm, nrm);
    }
    d.compression = d.max_compression_norm - c.lambda;
    const RealVector& w = x.algebra().weights();
    d.lambda_mass = c.lambda * (w.sum() - c.terminal().trace(w));
    d.mass = d.lambda_mass - x.norm(1.0);
    return d;
}

RandriEstimates randri_estimates(const Martingale& x, const CuculescuSequence& c) {
    check_matching(x, c, "randri_estimates");
    const RealVector& w = x.algebra().weights();
    const Index n = x.dim();
    RandriEstimates r;
    r.x_norm1 = x.norm(1.0);
    Matrix lhs = Matrix::Zero(n, n);
    Matrix rhs = Matrix::Zero(n, n);
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix& qp = c.q[k - 1].matrix();
        const Matrix& qk = c.q[k].matrix();
        const Matrix& xk = x.term(k);
        const Matrix& xprev = x.term(k - 1);
        const Matrix dx = x.difference(k);
        r.compressed_terms += lp_norm(Matrix(qp * xk * qp - qk * xk * qk), 1.0, w);
        if (k > 1) {
            r.compressed_previous += lp_norm(Matrix(qp * xprev * qp - qk * xprev * qk), 1.0, w);
        }
        const Matrix qdq = qp * dx * qp;
        r.compressed_differences += lp_norm(Matrix(qdq - qk * dx * qk), 1.0, w);
        lhs += qdq;
        const Matrix delta = qp - qk;
        rhs += delta * xk * delta;
    }
    const Matrix& qn = c.terminal().matrix();
    rhs += qn * x.last() * qn;
    r.identity_residual = op_norm(lhs - rhs);
    r.compressed_sum = lp_norm(lhs, 1.0, w);
    return r;
}

} // namespace ncmart
