#pragma once

// Four-part decompositions of a martingale at a threshold λ and the derived
// three-part form.

#include "ncmart/cuculescu.hpp"

#include <optional>
#include <vector>

namespace ncmart {

enum class DecompositionVariant { Gundy, Burkholder };

const char* to_string(DecompositionVariant v);

/// One positive generator of the reduction x_fin = Σ_j c_j x_fin^{(j)}.
struct DecompositionPiece {
    Complex coefficient{1.0, 0.0};
    Matrix generator;
    CuculescuSequence q;                 // for the piece
    std::optional<Martingale> y;         // intermediate martingale (gundy variant)
    std::optional<CuculescuSequence> pi; // Cuculescu sequence of y (gundy variant)
};

struct DecompositionMeasurements {
    double x_norm1 = 0.0;
    double scale = 0.0;                 // max_k ‖dx_k‖_∞
    double reconstruction = 0.0;        // max_k ‖dx_k − Σ parts‖_∞
    double difference_residual = 0.0;   // worst ‖E_{k−1}(d_k)‖ and ‖E_k(d_k) − d_k‖ across parts
    double first_terms = 0.0;           // gundy variant: ‖α_1‖ + ‖β_1 − x_1‖ + ‖γ_1‖ + ‖υ_1‖
    double alpha_l1 = 0.0;
    double alpha_l2_squared = 0.0;
    double alpha_linf = 0.0;
    double beta_variation = 0.0;        // Σ_k ‖dβ_k‖_1
    double gamma_support_mass = 0.0;    // λ τ(⋁_k supp|dγ_k|)
    double upsilon_support_mass = 0.0;  // λ τ(⋁_k supp|dυ_k*|)
    double gamma_witness = 0.0;         // max_k ‖dγ_k r_k‖_∞
    double upsilon_witness = 0.0;       // max_k ‖r_k dυ_k‖_∞
    /// Positive path only (unset on the reduced path).
    std::optional<double> y_norm1;
    std::optional<double> y_increment_sup;  // max_k ‖dy_k‖_∞
};

struct FourPartDecomposition {
    DecompositionVariant variant;
    double lambda;
    bool reduced;  // built from Jordan pieces rather than directly
    Martingale x;
    Martingale alpha;
    Martingale beta;
    Martingale gamma;
    Martingale upsilon;
    std::vector<DecompositionPiece> pieces;
    /// r_k for k = 1..n at index k−1: π_{k−1} ∧ q_{k−1} (gundy) or q_{k−1} (burkholder),
    /// met across pieces on the reduced path.
    std::vector<Projection> witnesses;
    DecompositionMeasurements measured;
};

/// dy_k = q_k dx_k q_k − E_{k−1}(q_k dx_k q_k).
Martingale step1_intermediate(const Martingale& x, const CuculescuSequence& q);

/// True when x_fin (or x_n) is Hermitian with spectrum ≥ −tol·scale.
bool is_positive_martingale(const Martingale& x, double tol = 1e-9);

FourPartDecomposition gundy_decompose(const Martingale& x, double lambda, double tol = 1e-9);
FourPartDecomposition burkholder_decompose(const Martingale& x, double lambda, double tol = 1e-9);

/// Recomputes every measurement of a decomposition.
DecompositionMeasurements measure_decomposition(const FourPartDecomposition& d);

struct ThreePartDecomposition {
    double lambda;
    Martingale a;
    Martingale b;
    Martingale c;
    std::vector<Projection> witnesses;  // r_k at index k−1
    double x_norm1 = 0.0;
    double reconstruction = 0.0;
    double difference_residual = 0.0;
    double witness_residual = 0.0;      // max_k ‖r_k dc_k r_k‖_∞
    double support_mass = 0.0;          // λ τ(1 − ⋀_k r_k)
};

/// a = α, b = β, c = γ + υ of the gundy variant.
ThreePartDecomposition three_part(const Martingale& x, double lambda, double tol = 1e-9);

} // namespace ncmart
