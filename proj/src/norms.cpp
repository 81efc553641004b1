#include "ncmart/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncmart {

double lp_norm(const SingularProfile& profile, double p) {
    if (!(p >= 1.0)) throw Error("lp_norm: exponent must satisfy p >= 1");
    if (profile.values.empty()) return 0.0;
    if (std::isinf(p)) return profile.values.front();
    double acc = 0.0;
    for (std::size_t j = 0; j < profile.values.size(); ++j) {
        acc += profile.weights[j] * std::pow(profile.values[j], p);
    }
    return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double lp_norm(const Matrix& x, double p, const RealVector& weights) {
    if (!(p >= 1.0)) throw Error("lp_norm: exponent must satisfy p >= 1");
    if (std::isinf(p)) return op_norm(x);
    return lp_norm(singular_profile(x, weights), p);
}

double weak_l1(const SingularProfile& profile) {
    double best = 0.0;
    for (std::size_t j = 0; j < profile.values.size(); ++j) {
        best = std::max(best, profile.cumulative[j] * profile.values[j]);
    }
    return best;
}

double weak_l1(const Matrix& x, const RealVector& weights) {
    return weak_l1(singular_profile(x, weights));
}

double DistributionFunction::left_limit(double lambda) const {
    double mass = 0.0;
    for (std::size_t j = 0; j < profile_.values.size(); ++j) {
        if (profile_.values[j] >= lambda) mass += profile_.weights[j];
    }
    return mass;
}

double DistributionFunction::weak_l1_sup() const {
    double best = 0.0;
    for (double s : profile_.values) {
        if (s > 0.0) best = std::max(best, s * left_limit(s));
    }
    return best;
}

double sum_norm_l1_plus_m(const Matrix& x, const RealVector& weights) {
    if (weights.sum() < 1.0 - 1e-12) {
        throw Error("sum_norm_l1_plus_m: requires tau(1) >= 1, got " + std::to_string(weights.sum()));
    }
    return singular_profile(x, weights).integral(0.0, 1.0);
}

QuasiTriangleReport check_quasi_triangle(const Matrix& x1, const Matrix& x2, double lambda,
                                         const RealVector& weights) {
    if (!(lambda > 0.0)) throw Error("check_quasi_triangle: lambda must be positive");
    QuasiTriangleReport r;
    r.lhs = lambda * singular_profile(x1 + x2, weights).mass_above(lambda);
    r.rhs = 2.0 * lambda * singular_profile(x1, weights).mass_above(lambda / 2.0) +
            2.0 * lambda * singular_profile(x2, weights).mass_above(lambda / 2.0);
    r.pass = r.lhs <= r.rhs + 1e-12 * std::max(1.0, r.rhs);
    return r;
}

} // namespace ncmart
