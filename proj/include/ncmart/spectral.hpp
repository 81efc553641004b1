#pragma once

// Dense Hermitian spectral calculus, support projections, the projection
// lattice and singular-value profiles.

#include "ncmart/types.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ncmart {

/// Real interval with independently open/closed endpoints. Infinite endpoints
/// are always treated as open.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
    static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
    /// (lambda, ∞)
    static Interval above(double lambda) {
        return {lambda, std::numeric_limits<double>::infinity(), false, false};
    }
    /// [lambda, ∞)
    static Interval at_or_above(double lambda) {
        return {lambda, std::numeric_limits<double>::infinity(), true, false};
    }
    /// (−∞, lambda)
    static Interval below(double lambda) {
        return {-std::numeric_limits<double>::infinity(), lambda, false, false};
    }
    static Interval all() { return {}; }

    /// Membership with endpoint slack `eps`: values within eps of a closed
    /// endpoint are inside, values within eps of an open endpoint are outside.
    [[nodiscard]] bool contains(double t, double eps = kSpectralEndpointTol) const;
};

/// Orthogonal projection, stored as an orthonormal basis of its range.
class Projection {
public:
    Projection() = default;
    /// `range_basis` must have orthonormal columns (not re-checked).
    explicit Projection(Matrix range_basis);

    static Projection identity(Index n);
    static Projection zero(Index n);
    /// Validates self-adjointness, idempotence and {0,1} spectrum to `tol`.
    static Projection from_matrix(const Matrix& p, double tol = 1e-9);

    [[nodiscard]] Index dim() const { return basis_.rows(); }
    [[nodiscard]] Index rank() const { return basis_.cols(); }
    [[nodiscard]] bool is_zero() const { return rank() == 0; }
    [[nodiscard]] bool is_identity() const { return rank() == dim(); }
    [[nodiscard]] const Matrix& basis() const { return basis_; }
    [[nodiscard]] const Matrix& matrix() const { return matrix_; }

    /// 1 − p.
    [[nodiscard]] Projection complement() const;
    /// Weighted trace Σ_i w_i p_ii.
    [[nodiscard]] double trace(const RealVector& weights) const;

private:
    Matrix basis_;
    Matrix matrix_;
};

/// Largest violation among the projection invariants.
double projection_defect(const Matrix& p);

/// Σ of eigenprojections of `a` with eigenvalue in `interval`.
/// Throws InvariantViolation when ‖a − a*‖_∞ > hermitian_tol.
Projection spectral_projection(const Matrix& a, const Interval& interval,
                               double hermitian_tol = 1e-9,
                               double endpoint_tol = kSpectralEndpointTol);

/// p · χ_I(p a p), computed on range(p) so the result is exactly dominated by p.
Projection compressed_spectral_projection(const Matrix& a, const Projection& p,
                                          const Interval& interval,
                                          double hermitian_tol = 1e-9,
                                          double endpoint_tol = kSpectralEndpointTol);

/// f(a) for Hermitian a (symmetrized first).
Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f);

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues clamp to 0.
Matrix psd_sqrt(const Matrix& a);

/// x = U diag(values) V*, values descending. Near-Hermitian square input uses
/// the Hermitian eigensolver; everything else takes right vectors from x* x and
/// values as ‖x v‖, with a one-sided Jacobi SVD when a value is near the rank cutoff.
struct SingularDecomposition {
    RealVector values;
    Matrix u;
    Matrix v;
};
SingularDecomposition singular_decomposition(const Matrix& x, bool want_u, bool want_v);

/// |x| = (x* x)^{1/2}.
Matrix abs(const Matrix& x);

/// Jordan parts of a Hermitian matrix: a = plus − minus, both ⪰ 0.
struct JordanParts {
    Matrix plus;
    Matrix minus;
};
JordanParts jordan_parts(const Matrix& a);

/// supp|x|: projection onto range(x*), i.e. 1 − projection onto ker x.
Projection support(const Matrix& x, const RankTolerance& tol = {});
/// supp|x*|: projection onto range(x).
Projection left_support(const Matrix& x, const RankTolerance& tol = {});

/// Projection onto range(p) ∩ range(q).
Projection proj_meet(const Projection& p, const Projection& q, double tol = kRankTol);
/// Projection onto the closed span of range(p) ∪ range(q).
Projection proj_join(const Projection& p, const Projection& q, double tol = kRankTol);
Projection proj_meet_all(std::span<const Projection> ps, double tol = kRankTol);
Projection proj_join_all(std::span<const Projection> ps, double tol = kRankTol);

/// Distribution of the singular values of x with respect to a weighted trace.
/// μ_t(x) is the right-continuous step function equal to values[j] on
/// [cumulative[j-1], cumulative[j]).
struct SingularProfile {
    std::vector<double> values;      // descending, non-negative
    std::vector<double> weights;     // trace mass carried by each value
    std::vector<double> cumulative;  // running sums of weights

    [[nodiscard]] double total_weight() const {
        return cumulative.empty() ? 0.0 : cumulative.back();
    }
    /// μ_t(x).
    [[nodiscard]] double mu(double t) const;
    /// ∫_a^b μ_t dt.
    [[nodiscard]] double integral(double a, double b) const;
    /// τ(χ_(λ,∞)(|x|)) with the open-endpoint convention of Interval.
    [[nodiscard]] double mass_above(double lambda,
                                    double eps = kSpectralEndpointTol) const;
};

SingularProfile singular_profile(const Matrix& x, const RealVector& weights);

} // namespace ncmart
