#include "ncmart/applications.hpp"

#include "ncmart/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ncmart {

double orthogonality_defect(std::span<const Projection> family) {
    double worst = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            if (family[i].is_zero() || family[j].is_zero()) continue;
            worst = std::max(worst, op_norm(family[i].basis().adjoint() * family[j].basis()));
        }
    }
    return worst;
}

Matrix triangular_truncation(const Matrix& x, std::span<const Projection> family, double tol) {
    if (family.empty()) return Matrix::Zero(x.rows(), x.cols());
    const double defect = orthogonality_defect(family);
    if (defect > tol) {
        throw InvariantViolation("triangular_truncation: family is not mutually orthogonal", defect);
    }
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    Matrix left = Matrix::Zero(x.rows(), x.rows());
    for (const auto& p : family) {
        if (p.dim() != x.rows()) throw Error("triangular_truncation: dimension mismatch");
        left += p.matrix();
        if (!p.is_zero()) out += left * x * p.matrix();
    }
    return out;
}

std::span<const Projection> ScaleProjectionFamily::complete(std::size_t n) const {
    return {blocks.at(n - 1).data(), blocks.at(n - 1).size()};
}

std::span<const Projection> ScaleProjectionFamily::truncated(std::size_t n) const {
    return {blocks.at(n - 1).data(), std::min<std::size_t>(m + 1, blocks.at(n - 1).size())};
}

namespace {

/// Projection onto range(big) ⊖ range(small), assuming small ≤ big.
Projection nested_difference(const Projection& big, const Projection& small) {
    const Index r = big.rank() - small.rank();
    if (r <= 0) return Projection::zero(big.dim());
    Matrix residual = big.basis();
    if (!small.is_zero()) residual -= small.basis() * (small.basis().adjoint() * big.basis());
    const SingularDecomposition svd = singular_decomposition(residual, true, false);
    return Projection(svd.u.leftCols(r));
}

} // namespace

ScaleProjectionFamily scale_projections(const Martingale& x, unsigned m, double tol) {
    if (!is_positive_martingale(x, tol)) throw Error("scale_projections: martingale is not positive");
    const Matrix& fin = x.final_element() ? *x.final_element() : x.last();
    const double top_norm = op_norm(fin);
    ScaleProjectionFamily f;
    f.m = m;
    f.top = std::max<unsigned>(m, static_cast<unsigned>(std::ceil(std::log2(top_norm + 1.0))));
    for (unsigned k = 0; k <= f.top; ++k) {
        f.sequences.push_back(cuculescu(x, std::ldexp(1.0, static_cast<int>(k)), tol));
    }
    const Index dim = x.dim();
    for (std::size_t n = 1; n <= x.length(); ++n) {
        // meets[i] = ⋀_{k=i..K} q_n^{(2^k)}, built from the top down.
        std::vector<Projection> meets(f.top + 1);
        meets[f.top] = f.sequences[f.top].q[n];
        for (int i = static_cast<int>(f.top) - 1; i >= 0; --i) {
            meets[i] = proj_meet(meets[i + 1], f.sequences[i].q[n]);
        }
        std::vector<Projection> blocks;
        blocks.push_back(meets[0]);
        for (unsigned i = 1; i <= f.top; ++i) blocks.push_back(nested_difference(meets[i], meets[i - 1]));
        f.remainder.push_back(meets[m].complement());
        if (!meets[f.top].is_identity()) {
            throw InvariantViolation("scale_projections: top scale does not stabilize",
                                     static_cast<double>(dim - meets[f.top].rank()));
        }
        f.blocks.push_back(std::move(blocks));
    }
    return f;
}

FamilyDefects measure_family(const ScaleProjectionFamily& f) {
    FamilyDefects d;
    for (std::size_t n = 1; n <= f.length(); ++n) {
        const auto full = f.complete(n);
        d.disjointness = std::max(d.disjointness, orthogonality_defect(full));
        const Index dim = full.front().dim();
        Matrix sum = f.remainder[n - 1].matrix();
        for (std::size_t i = 0; i <= f.m && i < full.size(); ++i) sum += full[i].matrix();
        d.partition = std::max(d.partition, op_norm(sum - Matrix::Identity(dim, dim)));
        Matrix total = Matrix::Zero(dim, dim);
        for (const auto& p : full) total += p.matrix();
        d.partition = std::max(d.partition, op_norm(total - Matrix::Identity(dim, dim)));
    }
    return d;
}

YZSplit burkholder_yz(const Martingale& x, const ScaleProjectionFamily& f) {
    if (f.length() != x.length()) throw Error("burkholder_yz: family length mismatch");
    YZSplit s;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        const Matrix dx = x.difference(k);
        Matrix dy = triangular_truncation(dx, f.complete(family_index(k)));
        s.dz.terms.push_back(dx - dy);
        s.dy.terms.push_back(std::move(dy));
    }
    return s;
}

Matrix truncated_square_function(const DifferenceSequence& dx, const ScaleProjectionFamily& f) {
    if (dx.size() != f.length()) throw Error("truncated_square_function: family length mismatch");
    DifferenceSequence t;
    for (std::size_t k = 1; k <= dx.size(); ++k) {
        t.terms.push_back(triangular_truncation(dx(k), f.truncated(family_index(k))));
    }
    return square_function_column(t);
}

TruncationReductionReport truncation_reduction(const Martingale& x, const ScaleProjectionFamily& f,
                                               const YZSplit& split) {
    const RealVector& w = x.algebra().weights();
    TruncationReductionReport r;
    r.lambda = std::ldexp(1.0, static_cast<int>(f.m));
    const double xn = x.norm(1.0);
    const Matrix sc = square_function_column(split.dy);
    const Matrix trunc = truncated_square_function(x.differences(), f);
    r.lhs = r.lambda * singular_profile(sc, w).mass_above(r.lambda);
    r.rhs = 2.0 * r.lambda * singular_profile(trunc, w).mass_above(r.lambda / 2.0) + 4.0 * xn;
    r.main_ratio = xn > 0.0 ? r.lhs / xn : 0.0;
    return r;
}

double cancellation_residual(const FourPartDecomposition& b, const ScaleProjectionFamily& f) {
    if (b.variant != DecompositionVariant::Burkholder) {
        throw Error("cancellation_residual: requires the burkholder variant");
    }
    double worst = 0.0;
    for (std::size_t k = 1; k <= b.x.length(); ++k) {
        const Matrix d = b.gamma.difference(k) + b.upsilon.difference(k);
        worst = std::max(worst, op_norm(triangular_truncation(d, f.truncated(family_index(k)))));
    }
    return worst;
}

namespace {

struct Objective {
    const DifferenceSequence& d;
    const RealVector& w;

    Matrix combine(const std::vector<double>& a) const {
        Matrix s = Matrix::Zero(d.terms.front().rows(), d.terms.front().cols());
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * d.terms[k];
        return s;
    }
    double value(const std::vector<double>& a) const { return lp_norm(combine(a), 1.0, w); }

    /// Re τ(U* d_k) with U the partial isometry of the polar decomposition.
    std::vector<double> gradient(const std::vector<double>& a) const {
        const Matrix s = combine(a);
        const SingularDecomposition svd = singular_decomposition(s, true, true);
        const double cut = 1e-12 * std::max(1.0, svd.values(0));
        Matrix u = Matrix::Zero(s.rows(), s.cols());
        for (Index j = 0; j < svd.values.size(); ++j) {
            if (svd.values(j) > cut) u += svd.u.col(j) * svd.v.col(j).adjoint();
        }
        std::vector<double> g(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            const Matrix ud = u.adjoint() * d.terms[k];
            double acc = 0.0;
            for (Index i = 0; i < ud.rows(); ++i) acc += w(i) * ud(i, i).real();
            g[k] = acc;
        }
        return g;
    }
};

void normalize(std::vector<double>& a) {
    double nrm = 0.0;
    for (double v : a) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : a) v /= nrm;
}

} // namespace

ColacunaryEstimate colacunary_estimate(const DifferenceSequence& d, const RealVector& weights,
                                       const ColacunaryOptions& options) {
    if (d.terms.empty()) throw Error("colacunary_estimate: empty difference sequence");
    double largest = 0.0;
    std::vector<double> norms;
    for (const auto& dk : d.terms) {
        norms.push_back(lp_norm(dk, 1.0, weights));
        largest = std::max(largest, norms.back());
    }
    for (std::size_t k = 0; k < norms.size(); ++k) {
        if (norms[k] <= 1e-12 * std::max(1.0, largest)) {
            throw Error("colacunary_estimate: difference " + std::to_string(k + 1) +
                        " has negligible L1 norm");
        }
    }
    const std::size_t n = d.size();
    const Objective obj{d, weights};
    ColacunaryEstimate best;
    best.delta = std::numeric_limits<double>::infinity();
    if (n == 1) {
        best.delta = norms[0];
        best.witness = {1.0};
        return best;
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (norms[k] < best.delta) {
            best.delta = norms[k];
            best.witness.assign(n, 0.0);
            best.witness[k] = 1.0;
        }
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (unsigned t = 0; t < options.trials; ++t) {
        std::vector<double> a(n);
        for (double& v : a) v = gauss(rng);
        normalize(a);
        double fa = obj.value(a);
        double step = 0.5;
        for (unsigned s = 0; s < options.descent_steps && step > 1e-12; ++s) {
            std::vector<double> g = obj.gradient(a);
            double radial = 0.0;
            for (std::size_t k = 0; k < n; ++k) radial += g[k] * a[k];
            double gn = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                g[k] -= radial * a[k];
                gn += g[k] * g[k];
            }
            gn = std::sqrt(gn);
            if (!(gn > 0.0)) break;
            std::vector<double> cand(n);
            for (std::size_t k = 0; k < n; ++k) cand[k] = a[k] - step * g[k] / gn;
            normalize(cand);
            const double fc = obj.value(cand);
            if (fc < fa) {
                a = std::move(cand);
                fa = fc;
                step *= 1.2;
            } else {
                step *= 0.5;
            }
        }
        if (fa < best.delta) {
            best.delta = fa;
            best.witness = a;
        }
    }
    return best;
}

} // namespace ncmart
