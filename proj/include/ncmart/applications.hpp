#pragma once

// Triangular truncations, scale projections and the y/z splitting of a
// positive martingale, and the co-lacunary estimator.

#include "ncmart/gundy.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ncmart {

/// T(x) = Σ_{i≤j} p_i x p_j. Throws InvariantViolation if ‖p_i p_j‖ > tol for some i ≠ j.
Matrix triangular_truncation(const Matrix& x, std::span<const Projection> family,
                             double tol = 1e-9);

/// max_{i≠j} ‖p_i p_j‖_∞.
double orthogonality_defect(std::span<const Projection> family);

struct ScaleProjectionFamily {
    unsigned m = 0;
    unsigned top = 0;  // K: q^{(2^k)} ≡ 1 for k ≥ K
    std::vector<CuculescuSequence> sequences;      // q^{(2^k)}, k = 0..K
    std::vector<std::vector<Projection>> blocks;   // blocks[n−1][i] = p_{i,n}, i = 0..K
    std::vector<Projection> remainder;             // 1 − Σ_{i≤m} p_{i,n}, at n−1

    [[nodiscard]] std::size_t length() const { return blocks.size(); }
    /// (p_{0,n}, …, p_{K,n}); Σ = 1.
    [[nodiscard]] std::span<const Projection> complete(std::size_t n) const;
    /// (p_{0,n}, …, p_{m,n}).
    [[nodiscard]] std::span<const Projection> truncated(std::size_t n) const;
};

/// Family built from the Cuculescu sequences of positive x at λ = 2^k.
ScaleProjectionFamily scale_projections(const Martingale& x, unsigned m, double tol = 1e-9);

struct FamilyDefects {
    double disjointness = 0.0;  // max_n max_{i≠j} ‖p_{i,n} p_{j,n}‖
    double partition = 0.0;     // max_n ‖Σ_i p_{i,n} + rest_n − 1‖
};
FamilyDefects measure_family(const ScaleProjectionFamily& f);

/// Family index used for the k-th difference: k − 1, or 1 when k = 1.
inline std::size_t family_index(std::size_t k) { return k == 1 ? 1 : k - 1; }

struct YZSplit {
    DifferenceSequence dy;
    DifferenceSequence dz;
};

/// dy_k = T^{(P_{k−1})}(dx_k) over the complete family, dz_k = dx_k − dy_k.
YZSplit burkholder_yz(const Martingale& x, const ScaleProjectionFamily& f);

/// (Σ_k |T^{(P^{(m)}_{k−1})}(dx_k)|²)^{1/2}.
Matrix truncated_square_function(const DifferenceSequence& dx, const ScaleProjectionFamily& f);

struct TruncationReductionReport {
    double lambda = 0.0;  // 2^m
    double lhs = 0.0;     // λ τ(χ_(λ,∞)(S_C(y)))
    double rhs = 0.0;     // 2λ τ(χ_(λ/2,∞)(S_C^{(m)}(y))) + 4‖x‖_1
    double main_ratio = 0.0;  // lhs / ‖x‖_1
};
TruncationReductionReport truncation_reduction(const Martingale& x, const ScaleProjectionFamily& f,
                                               const YZSplit& split);

/// max_k ‖T^{(P^{(m)}_{k−1})}(dγ′_k + dυ′_k)‖_∞ for the burkholder variant at λ = 2^m.
double cancellation_residual(const FourPartDecomposition& burkholder, const ScaleProjectionFamily& f);

struct ColacunaryOptions {
    unsigned trials = 1024;
    unsigned descent_steps = 200;
    std::uint64_t seed = 0x5eed;
};

struct ColacunaryEstimate {
    double delta = 0.0;                 // min found of ‖Σ a_k d_k‖_1 over ‖a‖_2 = 1
    std::vector<double> witness;        // the minimizing coefficients
};

/// Heuristic upper bound for the best δ with δ‖a‖_2 ≤ ‖Σ a_k d_k‖_1, real a.
/// Throws on an empty sequence or a difference with negligible L1 norm.
ColacunaryEstimate colacunary_estimate(const DifferenceSequence& d, const RealVector& weights,
                                       const ColacunaryOptions& options = {});

} // namespace ncmart
