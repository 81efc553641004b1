#pragma once

#include "ncmart/algebra.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ncmart {

/// d_1..d_n, stored 0-based: terms[k-1] = d_k.
struct DifferenceSequence {
    std::vector<Matrix> terms;

    [[nodiscard]] std::size_t size() const { return terms.size(); }
    /// 1-based access, d_k.
    [[nodiscard]] const Matrix& operator()(std::size_t k) const { return terms.at(k - 1); }
};

/// Adapted sequence x_1..x_n over a filtration. Indices are 1-based; x_0 = 0.
class Martingale {
public:
    /// x_k = E_k(x_fin). Throws if x_fin is not in the top level (to tol, relative).
    static Martingale from_final(FiltrationPtr filtration, const Matrix& x_fin, double tol = 1e-9);
    /// x_k = Σ_{j≤k} d_j. No validation; use measure_martingale.
    static Martingale from_differences(FiltrationPtr filtration, const DifferenceSequence& d);

    [[nodiscard]] const FiltrationPtr& filtration() const { return filtration_; }
    [[nodiscard]] const TracialAlgebra& algebra() const { return filtration_->algebra(); }
    [[nodiscard]] std::size_t length() const { return terms_.size(); }
    [[nodiscard]] Index dim() const { return filtration_->dim(); }

    /// x_k for 0 ≤ k ≤ n.
    [[nodiscard]] const Matrix& term(std::size_t k) const;
    [[nodiscard]] const Matrix& last() const { return terms_.back(); }
    /// dx_k = x_k − x_{k−1} for 1 ≤ k ≤ n.
    [[nodiscard]] Matrix difference(std::size_t k) const { return term(k) - term(k - 1); }
    [[nodiscard]] DifferenceSequence differences() const;
    [[nodiscard]] const std::optional<Matrix>& final_element() const { return final_; }

    /// ‖x‖_p = max_k ‖x_k‖_p.
    [[nodiscard]] double norm(double p) const;
    /// max_k ‖dx_k‖_∞, used as the absolute scale for residual checks.
    [[nodiscard]] double difference_scale() const;

    [[nodiscard]] Martingale adjoint() const;
    [[nodiscard]] Martingale scaled(Complex c) const;
    [[nodiscard]] Martingale operator+(const Martingale& other) const;

private:
    Martingale(FiltrationPtr f, std::vector<Matrix> terms, std::optional<Matrix> fin)
        : filtration_(std::move(f)), terms_(std::move(terms)), final_(std::move(fin)) {}

    FiltrationPtr filtration_;
    std::vector<Matrix> terms_;  // terms_[k-1] = x_k
    std::optional<Matrix> final_;
    Matrix zero_;
};

struct MartingaleDefects {
    double adaptedness = 0.0;          // max_k ‖E_k(x_k) − x_k‖_∞
    double martingale_property = 0.0;  // max_{m≤n} ‖E_m(x_n) − x_m‖_∞
    double difference_property = 0.0;  // max_{k≥2} ‖E_{k−1}(dx_k)‖_∞
    [[nodiscard]] double max() const;
};
MartingaleDefects measure_martingale(const Martingale& x);

/// ‖E_{k−1}(d_k)‖_∞ maximized over k ≥ 2 (d_1 is exempt because E_0 = E_1).
double difference_defect(const Filtration& f, const DifferenceSequence& d);

/// S_{C,n} = (Σ_{k≤n} |d_k|²)^{1/2}; n = 0 means the whole sequence.
Matrix square_function_column(const DifferenceSequence& d, std::size_t upto = 0);
/// S_{R,n} = (Σ_{k≤n} |d_k*|²)^{1/2}.
Matrix square_function_row(const DifferenceSequence& d, std::size_t upto = 0);

/// Splits a martingale with self-adjoint generator into two positive
/// martingales generated by the Jordan parts: x = w − z.
std::pair<Martingale, Martingale> krickeberg(const Martingale& x, double tol = 1e-9);

/// Raised when a transform sequence violates one of its hypotheses.
class TransformPredicateError : public InvariantViolation {
public:
    TransformPredicateError(std::size_t index, std::string clause, const std::string& what,
                            double defect)
        : InvariantViolation(what, defect), index_(index), clause_(std::move(clause)) {}
    [[nodiscard]] std::size_t index() const { return index_; }
    /// "i", "ii" or "iii".
    [[nodiscard]] const std::string& clause() const { return clause_; }

private:
    std::size_t index_;
    std::string clause_;
};

struct TransformResult {
    std::vector<Matrix> partial_sums;  // T_1..T_n
    Martingale martingale;             // the transformed martingale
};

/// T_n = Σ_{k≤n} ξ_{k−1} dx_k with ξ = (ξ_0, …, ξ_{n−1}). Requires ξ_0 = 1,
/// ‖ξ_k‖_∞ ≤ 1 + tol, and ξ_{k−1} ∈ M_{k−1} ∩ M_k'.
TransformResult martingale_transform(const Martingale& x, const std::vector<Matrix>& xi,
                                     double tol = 1e-9);

} // namespace ncmart
