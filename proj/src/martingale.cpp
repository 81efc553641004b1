#include "ncmart/martingale.hpp"

#include "ncmart/norms.hpp"
#include "ncmart/spectral.hpp"

#include <algorithm>
#include <string>

namespace ncmart {

Martingale Martingale::from_final(FiltrationPtr filtration, const Matrix& x_fin, double tol) {
    if (!filtration) throw Error("Martingale::from_final: null filtration");
    const Index n = filtration->dim();
    if (x_fin.rows() != n || x_fin.cols() != n) throw Error("Martingale::from_final: wrong shape");
    if (!x_fin.allFinite()) throw Error("Martingale::from_final: non-finite entries");
    const double scale = std::max(1.0, op_norm(x_fin));
    const Matrix gap = filtration->top().expectation(x_fin) - x_fin;
    const double defect = norm_within(gap, tol * scale) ? 0.0 : op_norm(gap);
    if (defect > tol * scale) {
        throw InvariantViolation("Martingale::from_final: generator is not in the top level", defect);
    }
    std::vector<Matrix> terms;
    for (std::size_t k = 1; k <= filtration->length(); ++k) {
        terms.push_back(filtration->expectation(k, x_fin));
    }
    Martingale m(std::move(filtration), std::move(terms), x_fin);
    m.zero_ = Matrix::Zero(n, n);
    return m;
}

Martingale Martingale::from_differences(FiltrationPtr filtration, const DifferenceSequence& d) {
    if (!filtration) throw Error("Martingale::from_differences: null filtration");
    if (d.size() != filtration->length()) {
        throw Error("Martingale::from_differences: sequence length " + std::to_string(d.size()) +
                    " does not match filtration length " + std::to_string(filtration->length()));
    }
    const Index n = filtration->dim();
    std::vector<Matrix> terms;
    Matrix acc = Matrix::Zero(n, n);
    for (const auto& dk : d.terms) {
        acc += dk;
        terms.push_back(acc);
    }
    Martingale m(std::move(filtration), std::move(terms), std::nullopt);
    m.zero_ = Matrix::Zero(n, n);
    return m;
}

const Matrix& Martingale::term(std::size_t k) const {
    if (k == 0) return zero_;
    return terms_.at(k - 1);
}

DifferenceSequence Martingale::differences() const {
    DifferenceSequence d;
    for (std::size_t k = 1; k <= length(); ++k) d.terms.push_back(difference(k));
    return d;
}

double Martingale::norm(double p) const {
    double best = 0.0;
    for (const auto& x : terms_) best = std::max(best, lp_norm(x, p, algebra().weights()));
    return best;
}

double Martingale::difference_scale() const {
    double best = 0.0;
    for (std::size_t k = 1; k <= length(); ++k) best = std::max(best, op_norm(difference(k)));
    return best;
}

Martingale Martingale::adjoint() const {
    std::vector<Matrix> terms;
    for (const auto& x : terms_) terms.push_back(x.adjoint());
    std::optional<Matrix> fin;
    if (final_) fin = final_->adjoint();
    Martingale m(filtration_, std::move(terms), std::move(fin));
    m.zero_ = zero_;
    return m;
}

Martingale Martingale::scaled(Complex c) const {
    std::vector<Matrix> terms;
    for (const auto& x : terms_) terms.push_back(c * x);
    std::optional<Matrix> fin;
    if (final_) fin = c * *final_;
    Martingale m(filtration_, std::move(terms), std::move(fin));
    m.zero_ = zero_;
    return m;
}

Martingale Martingale::operator+(const Martingale& other) const {
    if (filtration_ != other.filtration_ && filtration_->dim() != other.filtration_->dim()) {
        throw Error("Martingale::operator+: incompatible filtrations");
    }
    if (length() != other.length()) throw Error("Martingale::operator+: length mismatch");
    std::vector<Matrix> terms;
    for (std::size_t k = 0; k < terms_.size(); ++k) terms.push_back(terms_[k] + other.terms_[k]);
    std::optional<Matrix> fin;
    if (final_ && other.final_) fin = *final_ + *other.final_;
    Martingale m(filtration_, std::move(terms), std::move(fin));
    m.zero_ = zero_;
    return m;
}

double MartingaleDefects::max() const {
    return std::max({adaptedness, martingale_property, difference_property});
}

double difference_defect(const Filtration& f, const DifferenceSequence& d) {
    double worst = 0.0;
    for (std::size_t k = 2; k <= d.size(); ++k) {
        worst = std::max(worst, op_norm(f.expectation(k - 1, d(k))));
    }
    return worst;
}

MartingaleDefects measure_martingale(const Martingale& x) {
    MartingaleDefects d;
    const Filtration& f = *x.filtration();
    for (std::size_t k = 1; k <= x.length(); ++k) {
        d.adaptedness = std::max(d.adaptedness, op_norm(f.expectation(k, x.term(k)) - x.term(k)));
        for (std::size_t m = 1; m < k; ++m) {
            d.martingale_property =
                std::max(d.martingale_property, op_norm(f.expectation(m, x.term(k)) - x.term(m)));
        }
    }
    d.difference_property = difference_defect(f, x.differences());
    return d;
}

namespace {

Matrix square_function(const DifferenceSequence& d, std::size_t upto, bool column) {
    if (d.terms.empty()) throw Error("square_function: empty difference sequence");
    const std::size_t n = upto == 0 ? d.size() : std::min(upto, d.size());
    Matrix acc = Matrix::Zero(d.terms.front().rows(), d.terms.front().cols());
    for (std::size_t k = 1; k <= n; ++k) {
        acc += column ? Matrix(d(k).adjoint() * d(k)) : Matrix(d(k) * d(k).adjoint());
    }
    return psd_sqrt(acc);
}

} // namespace

Matrix square_function_column(const DifferenceSequence& d, std::size_t upto) {
    return square_function(d, upto, true);
}

Matrix square_function_row(const DifferenceSequence& d, std::size_t upto) {
    return square_function(d, upto, false);
}

std::pair<Martingale, Martingale> krickeberg(const Martingale& x, double tol) {
    const Matrix& fin = x.final_element() ? *x.final_element() : x.last();
    const double defect = hermitian_defect(fin);
    if (defect > tol * std::max(1.0, op_norm(fin))) {
        throw InvariantViolation("krickeberg: generator is not self-adjoint", defect);
    }
    const JordanParts parts = jordan_parts(fin);
    return {Martingale::from_final(x.filtration(), parts.plus, std::max(tol, 1e-9)),
            Martingale::from_final(x.filtration(), parts.minus, std::max(tol, 1e-9))};
}

TransformResult martingale_transform(const Martingale& x, const std::vector<Matrix>& xi,
                                     double tol) {
    const std::size_t n = x.length();
    const Filtration& f = *x.filtration();
    if (xi.size() != n) {
        throw Error("martingale_transform: expected " + std::to_string(n) +
                    " predictable multipliers, got " + std::to_string(xi.size()));
    }
    const Index dim = x.dim();
    for (std::size_t j = 0; j < n; ++j) {
        if (xi[j].rows() != dim || xi[j].cols() != dim) {
            throw Error("martingale_transform: xi_" + std::to_string(j) + " has wrong shape");
        }
    }
    const double unit_defect = op_norm(xi[0] - Matrix::Identity(dim, dim));
    if (unit_defect > tol) {
        throw TransformPredicateError(0, "i", "martingale_transform: xi_0 must be the identity (i)",
                                      unit_defect);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double nrm = op_norm(xi[j]);
        if (nrm > 1.0 + tol) {
            throw TransformPredicateError(j, "ii",
                                          "martingale_transform: xi_" + std::to_string(j) +
                                              " has operator norm above 1 (ii)",
                                          nrm - 1.0);
        }
    }
    for (std::size_t k = 1; k <= n; ++k) {
        const Matrix& m = xi[k - 1];
        const Matrix gap = f.expectation(k - 1, m) - m;
        const double in_prev = norm_within(gap, tol) ? 0.0 : op_norm(gap);
        if (in_prev > tol) {
            throw TransformPredicateError(k - 1, "iii",
                                          "martingale_transform: xi_" + std::to_string(k - 1) +
                                              " is not in level " + std::to_string(k - 1) + " (iii)",
                                          in_prev);
        }
        if (!commutant_contains(m, f.level(k), tol)) {
            throw TransformPredicateError(k - 1, "iii",
                                          "martingale_transform: xi_" + std::to_string(k - 1) +
                                              " does not commute with level " + std::to_string(k) +
                                              " (iii)",
                                          tol);
        }
    }
    DifferenceSequence d;
    std::vector<Matrix> sums;
    Matrix acc = Matrix::Zero(dim, dim);
    for (std::size_t k = 1; k <= n; ++k) {
        d.terms.push_back(xi[k - 1] * x.difference(k));
        acc += d.terms.back();
        sums.push_back(acc);
    }
    return {std::move(sums), Martingale::from_differences(x.filtration(), d)};
}

} // namespace ncmart
