#include "ncmart/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncmart {

namespace {
Matrix hermitian_part_of(const Matrix& a) { return (a + a.adjoint()) / 2.0; }
} // namespace

double op_norm(const Matrix& x) {
    if (x.size() == 0) return 0.0;
    const Matrix g = x.cols() <= x.rows() ? Matrix(x.adjoint() * x) : Matrix(x * x.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

SingularDecomposition singular_decomposition(const Matrix& x, bool want_u, bool want_v) {
    SingularDecomposition out;
    const double fro = x.norm();
    if (x.rows() == x.cols() && (x - x.adjoint()).norm() <= 1e-13 * fro) {
        // x = V Λ V* = (V sgn Λ) |Λ| V*
        Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part_of(x));
        const RealVector& lam = eig.eigenvalues();
        std::vector<Index> order(static_cast<std::size_t>(lam.size()));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return std::abs(lam(a)) > std::abs(lam(b)); });
        const Index n = lam.size();
        out.values.resize(n);
        if (want_u) out.u.resize(n, n);
        if (want_v) out.v.resize(n, n);
        for (Index j = 0; j < n; ++j) {
            const Index src = order[static_cast<std::size_t>(j)];
            out.values(j) = std::abs(lam(src));
            if (want_v) out.v.col(j) = eig.eigenvectors().col(src);
            if (want_u) out.u.col(j) = eig.eigenvectors().col(src) * (lam(src) < 0.0 ? -1.0 : 1.0);
        }
        return out;
    }
    // Right vectors from the Gram matrix, values as ‖x v‖. Borderline values go to Jacobi.
    const Index m = x.rows();
    const Index n = x.cols();
    const Index k = std::min(m, n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(x.adjoint() * x);
    const Matrix w = x * eig.eigenvectors();
    RealVector norms(n);
    for (Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });
    const double top = n > 0 ? norms(order.front()) : 0.0;
    bool borderline = false;
    for (Index j = 0; j < n; ++j) {
        const double rel = top > 0.0 ? norms(j) / top : 0.0;
        if (rel > 1e-12 && rel < 1e-6) borderline = true;
    }
    if (borderline) {
        unsigned opts = 0;
        if (want_u) opts |= Eigen::ComputeFullU;
        if (want_v) opts |= Eigen::ComputeFullV;
        Eigen::JacobiSVD<Matrix> svd(x, opts);
        out.values = svd.singularValues();
        if (want_u) out.u = svd.matrixU();
        if (want_v) out.v = svd.matrixV();
        return out;
    }
    out.values.resize(k);
    for (Index j = 0; j < k; ++j) out.values(j) = norms(order[static_cast<std::size_t>(j)]);
    if (want_v) {
        out.v.resize(n, n);
        for (Index j = 0; j < n; ++j) out.v.col(j) = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
    }
    if (want_u) {
        Index live = 0;
        while (live < k && out.values(live) > 1e-12 * top) ++live;
        Matrix lead(m, live);
        for (Index j = 0; j < live; ++j) {
            lead.col(j) = w.col(order[static_cast<std::size_t>(j)]) / out.values(j);
        }
        Eigen::HouseholderQR<Matrix> qr(lead);
        out.u = qr.householderQ() * Matrix::Identity(m, m);
        for (Index j = 0; j < live; ++j) {
            const Complex dot = out.u.col(j).dot(lead.col(j));
            if (std::abs(dot) > 0.0) out.u.col(j) *= dot / std::abs(dot);
        }
    }
    return out;
}

bool norm_within(const Matrix& x, double bound) {
    return x.norm() <= bound || op_norm(x) <= bound;
}

double hermitian_defect(const Matrix& x) { return op_norm(x - x.adjoint()); }

bool all_finite(const Matrix& x) { return x.allFinite(); }

Matrix identity(Index n) { return Matrix::Identity(n, n); }

bool Interval::contains(double t, double eps) const {
    const bool lo_ok = std::isinf(lo) ? true : (lo_closed ? t >= lo - eps : t > lo + eps);
    const bool hi_ok = std::isinf(hi) ? true : (hi_closed ? t <= hi + eps : t < hi - eps);
    return lo_ok && hi_ok;
}

namespace {

Matrix hermitian_part(const Matrix& a) { return (a + a.adjoint()) / 2.0; }

void require_hermitian(const Matrix& a, double tol, const char* where) {
    if (norm_within(a - a.adjoint(), tol)) return;
    const double defect = hermitian_defect(a);
    if (defect > tol) {
        throw InvariantViolation(std::string(where) + ": input is not self-adjoint", defect);
    }
}

// Orthonormal basis of the orthogonal complement of range(q), q orthonormal.
Matrix orthonormal_complement(const Matrix& q) {
    const Index n = q.rows();
    const Index r = q.cols();
    if (r == 0) return Matrix::Identity(n, n);
    if (r == n) return Matrix(n, 0);
    Eigen::HouseholderQR<Matrix> qr(q);
    Matrix full = qr.householderQ() * Matrix::Identity(n, n);
    return full.rightCols(n - r);
}

Matrix select_columns(const Matrix& m, const std::vector<Index>& cols) {
    Matrix out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
    return out;
}

} // namespace

Projection::Projection(Matrix range_basis)
    : basis_(std::move(range_basis)), matrix_(basis_ * basis_.adjoint()) {}

Projection Projection::identity(Index n) { return Projection(Matrix::Identity(n, n)); }

Projection Projection::zero(Index n) { return Projection(Matrix(n, 0)); }

double projection_defect(const Matrix& p) {
    if (p.size() == 0) return 0.0;
    double defect = std::max(hermitian_defect(p), op_norm(p * p - p));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(p), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double t = eig.eigenvalues()(i);
        defect = std::max(defect, std::min(std::abs(t), std::abs(t - 1.0)));
    }
    return defect;
}

Projection Projection::from_matrix(const Matrix& p, double tol) {
    if (p.rows() != p.cols()) throw Error("Projection::from_matrix: matrix is not square");
    const double defect = projection_defect(p);
    if (defect > tol) throw InvariantViolation("Projection::from_matrix: not a projection", defect);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(p));
    std::vector<Index> keep;
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
        if (eig.eigenvalues()(i) > 0.5) keep.push_back(i);
    }
    return Projection(select_columns(eig.eigenvectors(), keep));
}

Projection Projection::complement() const { return Projection(orthonormal_complement(basis_)); }

double Projection::trace(const RealVector& weights) const {
    double t = 0.0;
    for (Index j = 0; j < basis_.cols(); ++j) {
        t += (weights.array() * basis_.col(j).cwiseAbs2().array()).sum();
    }
    return t;
}

Projection spectral_projection(const Matrix& a, const Interval& interval, double hermitian_tol,
                               double endpoint_tol) {
    require_hermitian(a, hermitian_tol, "spectral_projection");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(a));
    std::vector<Index> keep;
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
        if (interval.contains(eig.eigenvalues()(i), endpoint_tol)) keep.push_back(i);
    }
    if (static_cast<Index>(keep.size()) == a.rows()) return Projection::identity(a.rows());
    return Projection(select_columns(eig.eigenvectors(), keep));
}

Projection compressed_spectral_projection(const Matrix& a, const Projection& p,
                                          const Interval& interval, double hermitian_tol,
                                          double endpoint_tol) {
    require_hermitian(a, hermitian_tol, "compressed_spectral_projection");
    if (p.is_zero()) return p;
    const Matrix& u = p.basis();
    const Matrix restricted = hermitian_part(u.adjoint() * a * u);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted);
    std::vector<Index> keep;
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
        if (interval.contains(eig.eigenvalues()(i), endpoint_tol)) keep.push_back(i);
    }
    // Keeping everything must return p itself, bit for bit.
    if (static_cast<Index>(keep.size()) == p.rank()) return p;
    return Projection(u * select_columns(eig.eigenvectors(), keep));
}

Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(a));
    RealVector fd = eig.eigenvalues().unaryExpr(f);
    return eig.eigenvectors() * fd.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix psd_sqrt(const Matrix& a) {
    return hermitian_function(a, [](double t) { return t > 0.0 ? std::sqrt(t) : 0.0; });
}

Matrix abs(const Matrix& x) { return psd_sqrt(x.adjoint() * x); }

JordanParts jordan_parts(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(a));
    const RealVector plus = eig.eigenvalues().cwiseMax(0.0);
    const RealVector minus = (-eig.eigenvalues()).cwiseMax(0.0);
    const Matrix& v = eig.eigenvectors();
    return {v * plus.asDiagonal() * v.adjoint(), v * minus.asDiagonal() * v.adjoint()};
}

namespace {

Projection support_impl(const Matrix& x, const RankTolerance& tol, bool left) {
    const Index n = left ? x.rows() : x.cols();
    if (x.size() == 0) return Projection::zero(n);
    const SingularDecomposition svd = singular_decomposition(x, left, !left);
    const RealVector& s = svd.values;
    const double cutoff = tol.cutoff(s(0));
    std::vector<Index> keep;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) keep.push_back(i);
    }
    if (static_cast<Index>(keep.size()) == n) return Projection::identity(n);
    return Projection(select_columns(left ? svd.u : svd.v, keep));
}

} // namespace

Projection support(const Matrix& x, const RankTolerance& tol) { return support_impl(x, tol, false); }

Projection left_support(const Matrix& x, const RankTolerance& tol) {
    return support_impl(x, tol, true);
}

Projection proj_meet(const Projection& p, const Projection& q, double tol) {
    if (p.dim() != q.dim()) throw Error("proj_meet: dimension mismatch");
    if (p.is_zero() || q.is_identity()) return p;
    if (q.is_zero() || p.is_identity()) return q;
    // Directions of range(p) at distance <= tol from range(q).
    const Matrix& qp = p.basis();
    const Matrix& qq = q.basis();
    const Matrix residual = qp - qq * (qq.adjoint() * qp);
    const SingularDecomposition svd = singular_decomposition(residual, false, true);
    const RealVector& s = svd.values;
    std::vector<Index> keep;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) <= tol) keep.push_back(i);
    }
    if (static_cast<Index>(keep.size()) == p.rank()) return p;
    return Projection(qp * select_columns(svd.v, keep));
}

Projection proj_join(const Projection& p, const Projection& q, double tol) {
    if (p.dim() != q.dim()) throw Error("proj_join: dimension mismatch");
    if (q.is_zero() || p.is_identity()) return p;
    if (p.is_zero() || q.is_identity()) return q;
    const Matrix& qp = p.basis();
    const Matrix& qq = q.basis();
    const Matrix residual = qq - qp * (qp.adjoint() * qq);
    const SingularDecomposition svd = singular_decomposition(residual, true, false);
    const RealVector& s = svd.values;
    std::vector<Index> keep;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) keep.push_back(i);
    }
    if (keep.empty()) return p;
    const Index total = p.rank() + static_cast<Index>(keep.size());
    if (total >= p.dim()) return Projection::identity(p.dim());
    Matrix basis(p.dim(), total);
    basis.leftCols(p.rank()) = qp;
    basis.rightCols(static_cast<Index>(keep.size())) = select_columns(svd.u, keep);
    return Projection(std::move(basis));
}

Projection proj_meet_all(std::span<const Projection> ps, double tol) {
    if (ps.empty()) throw Error("proj_meet_all: empty family");
    Projection acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i) acc = proj_meet(acc, ps[i], tol);
    return acc;
}

Projection proj_join_all(std::span<const Projection> ps, double tol) {
    if (ps.empty()) throw Error("proj_join_all: empty family");
    Projection acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i) acc = proj_join(acc, ps[i], tol);
    return acc;
}

double SingularProfile::mu(double t) const {
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (t < cumulative[j]) return values[j];
    }
    return 0.0;
}

double SingularProfile::integral(double a, double b) const {
    double acc = 0.0;
    double start = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double lo = std::max(a, start);
        const double hi = std::min(b, cumulative[j]);
        if (hi > lo) acc += values[j] * (hi - lo);
        start = cumulative[j];
    }
    return acc;
}

double SingularProfile::mass_above(double lambda, double eps) const {
    double mass = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] > lambda + eps) mass += weights[j];
    }
    return mass;
}

SingularProfile singular_profile(const Matrix& x, const RealVector& weights) {
    if (x.rows() != x.cols() || x.rows() != weights.size()) {
        throw Error("singular_profile: shape mismatch between element and trace weights");
    }
    if ((weights.array() <= 0.0).any()) throw Error("singular_profile: weights must be positive");
    SingularProfile profile;
    const Index n = x.rows();
    if (n == 0) return profile;
    const SingularDecomposition svd = singular_decomposition(x, false, true);
    const RealVector& s = svd.values;
    const Matrix& v = svd.v;
    profile.values.resize(static_cast<std::size_t>(n));
    profile.weights.resize(static_cast<std::size_t>(n));
    profile.cumulative.resize(static_cast<std::size_t>(n));
    double running = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double w = (weights.array() * v.col(j).cwiseAbs2().array()).sum();
        running += w;
        profile.values[static_cast<std::size_t>(j)] = s(j);
        profile.weights[static_cast<std::size_t>(j)] = w;
        profile.cumulative[static_cast<std::size_t>(j)] = running;
    }
    return profile;
}

} // namespace ncmart
