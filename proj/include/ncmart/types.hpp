#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncmart {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structural precondition failed; carries the measured defect so callers
/// can report how far off the input was.
class InvariantViolation : public Error {
public:
    InvariantViolation(const std::string& what, double defect)
        : Error(what + " (defect " + std::to_string(defect) + ")"), defect_(defect) {}

    [[nodiscard]] double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// Absolute tolerance for eigenvalue-vs-interval-endpoint comparisons.
inline constexpr double kSpectralEndpointTol = 1e-10;
/// Relative singular-value cutoff used for rank decisions.
inline constexpr double kRankTol = 1e-9;
/// Largest matrix dimension the library accepts.
inline constexpr Index kMaxDim = 128;

/// Cutoff for numerical rank: s counts iff s > max(relative * s_max, absolute).
struct RankTolerance {
    double relative = kRankTol;
    double absolute = 0.0;

    [[nodiscard]] double cutoff(double s_max) const {
        const double rel = relative * s_max;
        return rel > absolute ? rel : absolute;
    }
};

/// Operator norm (largest singular value).
double op_norm(const Matrix& x);

/// ‖x‖_∞ ≤ bound, decided from the Frobenius norm when it suffices.
bool norm_within(const Matrix& x, double bound);

/// ‖x − x*‖_∞.
double hermitian_defect(const Matrix& x);

/// Entry-wise finiteness.
bool all_finite(const Matrix& x);

Matrix identity(Index n);

} // namespace ncmart
