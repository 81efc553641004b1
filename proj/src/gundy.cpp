#include "ncmart/gundy.hpp"

#include "ncmart/norms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ncmart {

const char* to_string(DecompositionVariant v) {
    return v == DecompositionVariant::Gundy ? "gundy" : "burkholder";
}

namespace {

const Matrix& generator_of(const Martingale& x) {
    return x.final_element() ? *x.final_element() : x.last();
}

struct PieceParts {
    DifferenceSequence alpha, beta, gamma, upsilon;
    std::vector<Projection> witnesses;
};

PieceParts build_parts(const Martingale& x, const CuculescuSequence& q,
                       const CuculescuSequence* pi) {
    const Filtration& f = *x.filtration();
    PieceParts parts;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix dx = x.difference(k);
        const Matrix& qp = q.q[k - 1].matrix();
        const Matrix& qk = q.q[k].matrix();
        const Matrix inner = qk * dx * qk;
        const Matrix drift = f.expectation(k - 1, inner);
        const Matrix dy = inner - drift;
        const Matrix qdq = qp * dx * qp;
        const Matrix bracket = qdq - inner + drift;
        if (pi) {
            const Matrix& pp = pi->q[k - 1].matrix();
            const Matrix qpi = qp * pp;
            parts.alpha.terms.push_back(pp * dy * pp);
            parts.beta.terms.push_back(pp * bracket * pp);
            const Matrix right = dx * qpi;
            parts.gamma.terms.push_back(dx - right);
            parts.upsilon.terms.push_back(right - pp * qdq * pp);
            parts.witnesses.push_back(proj_meet(pi->q[k - 1], q.q[k - 1]));
        } else {
            parts.alpha.terms.push_back(dy);
            parts.beta.terms.push_back(bracket);
            const Matrix right = dx * qp;
            parts.gamma.terms.push_back(dx - right);
            parts.upsilon.terms.push_back(right - qdq);
            parts.witnesses.push_back(q.q[k - 1]);
        }
    }
    return parts;
}

double martingale_residual(const Filtration& f, const DifferenceSequence& d) {
    double worst = difference_defect(f, d);
    for (std::size_t k = 1; k <= d.size(); ++k) {
        worst = std::max(worst, op_norm(f.expectation(k, d(k)) - d(k)));
    }
    return worst;
}

FourPartDecomposition decompose(const Martingale& x, double lambda, double tol,
                                DecompositionVariant variant) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error("decompose: lambda must be positive and finite");
    }
    const bool gundy = variant == DecompositionVariant::Gundy;
    const Matrix& fin = generator_of(x);
    const Index n = x.dim();
    const double scale = std::max(1.0, op_norm(fin));

    std::vector<std::pair<Complex, Matrix>> generators;
    const bool positive = is_positive_martingale(x, tol);
    if (positive) {
        generators.emplace_back(Complex(1.0, 0.0), (fin + fin.adjoint()) / 2.0);
    } else {
        const double zero_cut = 1e-14 * scale;
        auto add_jordan = [&](const Matrix& h, Complex c) {
            const JordanParts jp = jordan_parts(h);
            if (!norm_within(jp.plus, zero_cut)) generators.emplace_back(c, jp.plus);
            if (!norm_within(jp.minus, zero_cut)) generators.emplace_back(-c, jp.minus);
        };
        const Matrix h = (fin + fin.adjoint()) / 2.0;
        const Matrix k = (fin - fin.adjoint()) / Complex(0.0, 2.0);
        add_jordan(h, Complex(1.0, 0.0));
        if (!norm_within(k, tol * scale)) add_jordan(k, Complex(0.0, 1.0));
    }

    const std::size_t len = x.length();
    DifferenceSequence da, db, dg, du;
    for (std::size_t k = 0; k < len; ++k) {
        da.terms.push_back(Matrix::Zero(n, n));
        db.terms.push_back(Matrix::Zero(n, n));
        dg.terms.push_back(Matrix::Zero(n, n));
        du.terms.push_back(Matrix::Zero(n, n));
    }
    std::vector<Projection> witnesses(len, Projection::identity(n));
    std::vector<DecompositionPiece> pieces;

    for (const auto& [coef, gen] : generators) {
        DecompositionPiece piece;
        piece.coefficient = coef;
        piece.generator = gen;
        const Martingale xp = Martingale::from_final(x.filtration(), gen, 1e-8);
        piece.q = cuculescu(xp, lambda, tol);
        const CuculescuSequence* pi = nullptr;
        if (gundy) {
            piece.y = step1_intermediate(xp, piece.q);
            piece.pi = cuculescu(*piece.y, lambda, tol);
            pi = &*piece.pi;
        }
        const PieceParts parts = build_parts(xp, piece.q, pi);
        for (std::size_t k = 0; k < len; ++k) {
            da.terms[k] += coef * parts.alpha.terms[k];
            db.terms[k] += coef * parts.beta.terms[k];
            dg.terms[k] += coef * parts.gamma.terms[k];
            du.terms[k] += coef * parts.upsilon.terms[k];
            witnesses[k] = generators.size() == 1 ? parts.witnesses[k]
                                                  : proj_meet(witnesses[k], parts.witnesses[k]);
        }
        pieces.push_back(std::move(piece));
    }

    const FiltrationPtr& f = x.filtration();
    FourPartDecomposition d{variant,
                            lambda,
                            !positive,
                            x,
                            Martingale::from_differences(f, da),
                            Martingale::from_differences(f, db),
                            Martingale::from_differences(f, dg),
                            Martingale::from_differences(f, du),
                            std::move(pieces),
                            std::move(witnesses),
                            {}};
    d.measured = measure_decomposition(d);
    const double guard = 1e3 * tol * std::max(1.0, d.measured.scale);
    if (d.measured.reconstruction > guard) {
        throw InvariantViolation("decompose: reconstruction failed", d.measured.reconstruction);
    }
    return d;
}

} // namespace

bool is_positive_martingale(const Martingale& x, double tol) {
    const Matrix& fin = generator_of(x);
    const double scale = std::max(1.0, op_norm(fin));
    if (!norm_within(fin - fin.adjoint(), tol * scale)) return false;
    const Matrix h = (fin + fin.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol * scale;
}

Martingale step1_intermediate(const Martingale& x, const CuculescuSequence& q) {
    if (q.q.size() != x.length() + 1) throw Error("step1_intermediate: mismatched projections");
    const Filtration& f = *x.filtration();
    DifferenceSequence dy;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix& qk = q.q[k].matrix();
        const Matrix inner = qk * x.difference(k) * qk;
        dy.terms.push_back(inner - f.expectation(k - 1, inner));
    }
    return Martingale::from_differences(x.filtration(), dy);
}

FourPartDecomposition gundy_decompose(const Martingale& x, double lambda, double tol) {
    return decompose(x, lambda, tol, DecompositionVariant::Gundy);
}

FourPartDecomposition burkholder_decompose(const Martingale& x, double lambda, double tol) {
    return decompose(x, lambda, tol, DecompositionVariant::Burkholder);
}

DecompositionMeasurements measure_decomposition(const FourPartDecomposition& d) {
    const Martingale& x = d.x;
    const Filtration& f = *x.filtration();
    const RealVector& w = x.algebra().weights();
    DecompositionMeasurements m;
    m.x_norm1 = x.norm(1.0);
    m.scale = x.difference_scale();
    const RankTolerance rank{kRankTol, kRankTol * std::max(m.scale, 1e-300)};

    std::vector<Projection> gamma_supports, upsilon_supports;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix dx = x.difference(k);
        const Matrix ga = d.gamma.difference(k);
        const Matrix up = d.upsilon.difference(k);
        const Matrix sum = d.alpha.difference(k) + d.beta.difference(k) + ga + up;
        m.reconstruction = std::max(m.reconstruction, op_norm(dx - sum));
        m.beta_variation += lp_norm(d.beta.difference(k), 1.0, w);
        const Matrix& r = d.witnesses[k - 1].matrix();
        m.gamma_witness = std::max(m.gamma_witness, op_norm(ga * r));
        m.upsilon_witness = std::max(m.upsilon_witness, op_norm(r * up));
        gamma_supports.push_back(support(ga, rank));
        upsilon_supports.push_back(left_support(up, rank));
    }
    for (const Martingale* part : {&d.alpha, &d.beta, &d.gamma, &d.upsilon}) {
        m.difference_residual =
            std::max(m.difference_residual, martingale_residual(f, part->differences()));
    }
    if (d.variant == DecompositionVariant::Gundy && x.length() >= 1) {
        m.first_terms = op_norm(d.alpha.term(1)) + op_norm(d.beta.term(1) - x.term(1)) +
                        op_norm(d.gamma.term(1)) + op_norm(d.upsilon.term(1));
    }
    m.alpha_l1 = d.alpha.norm(1.0);
    const double l2 = d.alpha.norm(2.0);
    m.alpha_l2_squared = l2 * l2;
    m.alpha_linf = d.alpha.norm(kInfinity);
    m.gamma_support_mass = d.lambda * proj_join_all(gamma_supports).trace(w);
    m.upsilon_support_mass = d.lambda * proj_join_all(upsilon_supports).trace(w);
    if (!d.reduced && d.pieces.size() == 1 && d.pieces.front().y) {
        const Martingale& y = *d.pieces.front().y;
        m.y_norm1 = y.norm(1.0);
        m.y_increment_sup = y.difference_scale();
    }
    return m;
}

ThreePartDecomposition three_part(const Martingale& x, double lambda, double tol) {
    FourPartDecomposition g = gundy_decompose(x, lambda, tol);
    const Martingale c = g.gamma + g.upsilon;
    const Filtration& f = *x.filtration();
    const RealVector& w = x.algebra().weights();
    ThreePartDecomposition t{lambda, g.alpha, g.beta, c, g.witnesses};
    t.x_norm1 = g.measured.x_norm1;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix dc = c.difference(k);
        const Matrix& r = t.witnesses[k - 1].matrix();
        t.witness_residual = std::max(t.witness_residual, op_norm(r * dc * r));
        const Matrix sum = t.a.difference(k) + t.b.difference(k) + dc;
        t.reconstruction = std::max(t.reconstruction, op_norm(x.difference(k) - sum));
    }
    for (const Martingale* part : {&t.a, &t.b, &t.c}) {
        t.difference_residual =
            std::max(t.difference_residual, martingale_residual(f, part->differences()));
    }
    const Projection meet = proj_meet_all(t.witnesses);
    t.support_mass = lambda * (w.sum() - meet.trace(w));
    return t;
}

} // namespace ncmart
