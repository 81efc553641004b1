#pragma once

#include "ncmart/spectral.hpp"

#include <limits>

namespace ncmart {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ‖x‖_p = τ(|x|^p)^{1/p} for p ∈ [1, ∞]; p = ∞ is the operator norm.
double lp_norm(const Matrix& x, double p, const RealVector& weights);
double lp_norm(const SingularProfile& profile, double p);

/// ‖x‖_{1,∞} = sup_t t μ_t(x), evaluated exactly at the breakpoints of μ.
double weak_l1(const Matrix& x, const RealVector& weights);
double weak_l1(const SingularProfile& profile);

/// λ ↦ τ(χ_(λ,∞)(|x|)).
class DistributionFunction {
public:
    explicit DistributionFunction(SingularProfile profile) : profile_(std::move(profile)) {}

    [[nodiscard]] double operator()(double lambda) const { return profile_.mass_above(lambda); }
    /// lim_{t ↑ λ} τ(χ_(t,∞)(|x|)) = τ(χ_[λ,∞)(|x|)).
    [[nodiscard]] double left_limit(double lambda) const;
    /// sup_λ λ τ(χ_(λ,∞)(|x|)), taken over left limits at every distinct singular value.
    [[nodiscard]] double weak_l1_sup() const;
    [[nodiscard]] const SingularProfile& profile() const { return profile_; }

private:
    SingularProfile profile_;
};

/// ‖x‖_{L1+M} = ∫_0^1 μ_t(x) dt. Requires τ(1) ≥ 1.
double sum_norm_l1_plus_m(const Matrix& x, const RealVector& weights);

struct QuasiTriangleReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// λ τ(χ_(λ,∞)|x1+x2|) ≤ 2λ τ(χ_(λ/2,∞)|x1|) + 2λ τ(χ_(λ/2,∞)|x2|).
QuasiTriangleReport check_quasi_triangle(const Matrix& x1, const Matrix& x2, double lambda,
                                         const RealVector& weights);

} // namespace ncmart
