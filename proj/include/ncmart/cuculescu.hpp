#pragma once

#include "ncmart/martingale.hpp"
#include "ncmart/spectral.hpp"

#include <vector>

namespace ncmart {

/// Decreasing adapted projections q_0 = 1 ≥ q_1 ≥ … ≥ q_n at threshold λ.
struct CuculescuSequence {
    double lambda = 0.0;
    std::vector<Projection> q;  // q[0] .. q[n]

    [[nodiscard]] std::size_t length() const { return q.empty() ? 0 : q.size() - 1; }
    /// ⋀_k q_k, which for a finite decreasing sequence is q_n.
    [[nodiscard]] const Projection& terminal() const { return q.back(); }
};

/// q_k = q_{k−1} χ_[−λ,λ](q_{k−1} x_k q_{k−1}). Terms with Hermitian drift up to
/// tol·max(1, ‖x_k‖) are symmetrized; larger drift throws InvariantViolation.
CuculescuSequence cuculescu(const Martingale& x, double lambda, double tol = 1e-9);

struct CuculescuDefects {
    double decreasing = 0.0;   // max_k ‖q_{k−1} q_k − q_k‖
    double adaptedness = 0.0;  // max_k ‖E_k(q_k) − q_k‖
    double commutation = 0.0;  // max_k ‖[q_k, q_{k−1} x_k q_{k−1}]‖
    double compression = 0.0;  // max_k ‖q_k x_k q_k‖_∞ − λ
    double mass = 0.0;         // λ τ(1 − q) − ‖x‖_1
    double max_compression_norm = 0.0;
    double lambda_mass = 0.0;  // λ τ(1 − q)
};
CuculescuDefects measure_cuculescu(const Martingale& x, const CuculescuSequence& c);

/// Left-hand sides of the five estimates, raw (not divided by ‖x‖_1).
struct RandriEstimates {
    double x_norm1 = 0.0;
    double compressed_terms = 0.0;       // Σ ‖q_{k−1} x_k q_{k−1} − q_k x_k q_k‖_1, bound 1
    double compressed_previous = 0.0;    // Σ ‖q_{k−1} x_{k−1} q_{k−1} − q_k x_{k−1} q_k‖_1, bound 2
    double compressed_differences = 0.0; // Σ ‖q_{k−1} dx_k q_{k−1} − q_k dx_k q_k‖_1, bound 3
    double identity_residual = 0.0;      // ‖Σ q_{k−1} dx_k q_{k−1} − (q_n x_n q_n + Σ Δq_k x_k Δq_k)‖_∞
    double compressed_sum = 0.0;         // ‖Σ_k q_{k−1} dx_k q_{k−1}‖_1, bound 2
};
RandriEstimates randri_estimates(const Martingale& x, const CuculescuSequence& c);

} // namespace ncmart
