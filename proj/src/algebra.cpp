#include "ncmart/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ncmart {

TracialAlgebra::TracialAlgebra(RealVector weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw Error("TracialAlgebra: dimension must be positive");
    if (weights_.size() > kMaxDim) {
        throw Error("TracialAlgebra: dimension " + std::to_string(weights_.size()) +
                    " exceeds cap " + std::to_string(kMaxDim));
    }
    if (!weights_.allFinite() || (weights_.array() <= 0.0).any()) {
        throw Error("TracialAlgebra: trace weights must be finite and strictly positive");
    }
}

TracialAlgebra TracialAlgebra::uniform(Index n, double weight) {
    if (n <= 0) throw Error("TracialAlgebra: dimension must be positive");
    return TracialAlgebra(RealVector::Constant(n, weight));
}

Complex TracialAlgebra::trace(const Matrix& x) const {
    return (x.diagonal().array() * weights_.array().cast<Complex>()).sum();
}

Complex TracialAlgebra::inner(const Matrix& a, const Matrix& b) const {
    // τ(b* a) = Σ_i w_i Σ_k conj(b_ki) a_ki
    Complex acc{0.0, 0.0};
    for (Index i = 0; i < a.cols(); ++i) acc += weights_(i) * b.col(i).dot(a.col(i));
    return acc;
}

double TracialAlgebra::norm2(const Matrix& x) const {
    double acc = 0.0;
    for (Index i = 0; i < x.cols(); ++i) acc += weights_(i) * x.col(i).squaredNorm();
    return std::sqrt(acc);
}

Partition canonical_partition(Partition p, Index n) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (auto& block : p) {
        if (block.empty()) throw Error("partition: empty block");
        std::sort(block.begin(), block.end());
        for (Index i : block) {
            if (i < 0 || i >= n) throw Error("partition: index " + std::to_string(i) + " out of range");
            if (seen[static_cast<std::size_t>(i)]++) {
                throw Error("partition: index " + std::to_string(i) + " appears twice");
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw Error("partition: blocks do not cover every index");
    }
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return p;
}

bool refines(const Partition& fine, const Partition& coarse) {
    Index n = 0;
    for (const auto& b : coarse) n += static_cast<Index>(b.size());
    std::vector<std::size_t> owner(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < coarse.size(); ++j) {
        for (Index i : coarse[j]) owner[static_cast<std::size_t>(i)] = j;
    }
    for (const auto& block : fine) {
        const std::size_t o = owner[static_cast<std::size_t>(block.front())];
        for (Index i : block) {
            if (owner[static_cast<std::size_t>(i)] != o) return false;
        }
    }
    return true;
}

namespace {

Matrix unit_matrix(Index n, Index i, Index j) {
    Matrix e = Matrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

} // namespace

Subalgebra Subalgebra::scalars(const TracialAlgebra& algebra) {
    return Subalgebra(algebra, Kind::Scalars);
}

Subalgebra Subalgebra::full(const TracialAlgebra& algebra) { return Subalgebra(algebra, Kind::Full); }

Subalgebra Subalgebra::tensor_left(const TracialAlgebra& algebra, Index left_dim) {
    if (left_dim <= 0 || algebra.dim() % left_dim != 0) {
        throw Error("tensor_left: left factor dimension must divide N");
    }
    Subalgebra s(algebra, Kind::TensorLeft);
    s.left_dim_ = left_dim;
    return s;
}

Subalgebra Subalgebra::commutative_blocks(const TracialAlgebra& algebra, Partition blocks) {
    Subalgebra s(algebra, Kind::CommutativeBlocks);
    s.blocks_ = canonical_partition(std::move(blocks), algebra.dim());
    return s;
}

Subalgebra Subalgebra::pinching_blocks(const TracialAlgebra& algebra, Partition blocks) {
    Subalgebra s(algebra, Kind::PinchingBlocks);
    s.blocks_ = canonical_partition(std::move(blocks), algebra.dim());
    return s;
}

Subalgebra Subalgebra::from_spanning_set(const TracialAlgebra& algebra,
                                         const std::vector<Matrix>& spanning, double tol) {
    const Index n = algebra.dim();
    Subalgebra s(algebra, Kind::Explicit);
    double scale = 0.0;
    for (const auto& m : spanning) {
        if (m.rows() != n || m.cols() != n) throw Error("from_spanning_set: element has wrong shape");
        if (!m.allFinite()) throw Error("from_spanning_set: element has non-finite entries");
        scale = std::max(scale, algebra.norm2(m));
    }
    // Modified Gram–Schmidt with one re-orthogonalization pass.
    for (const auto& m : spanning) {
        Matrix v = m;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : s.basis_) v -= algebra.inner(v, b) * b;
        }
        const double nv = algebra.norm2(v);
        if (nv > tol * std::max(scale, 1.0)) s.basis_.push_back(v / nv);
    }
    if (s.basis_.empty()) throw Error("from_spanning_set: spanning set is zero");
    const InvariantDefects d = s.measure_invariants();
    if (d.unit > tol) throw InvariantViolation("subalgebra does not contain the unit", d.unit);
    if (d.star_closure > tol) throw InvariantViolation("subalgebra is not *-closed", d.star_closure);
    if (d.multiplicative_closure > tol) {
        throw InvariantViolation("subalgebra is not multiplicatively closed", d.multiplicative_closure);
    }
    return s;
}

Index Subalgebra::dimension() const {
    switch (kind_) {
    case Kind::Explicit: return static_cast<Index>(basis_.size());
    case Kind::Scalars: return 1;
    case Kind::Full: return algebra_.dim() * algebra_.dim();
    case Kind::TensorLeft: return left_dim_ * left_dim_;
    case Kind::CommutativeBlocks: return static_cast<Index>(blocks_.size());
    case Kind::PinchingBlocks: {
        Index d = 0;
        for (const auto& b : blocks_) d += static_cast<Index>(b.size() * b.size());
        return d;
    }
    }
    return 0;
}

Matrix Subalgebra::expectation(const Matrix& x) const {
    const Index n = algebra_.dim();
    if (x.rows() != n || x.cols() != n) throw Error("expectation: element has wrong shape");
    const RealVector& w = algebra_.weights();
    switch (kind_) {
    case Kind::Explicit: return expectation_by_basis(x);
    case Kind::Scalars: return Matrix::Identity(n, n) * (algebra_.trace(x) / algebra_.total());
    case Kind::Full: return x;
    case Kind::TensorLeft: {
        // Index i = a * r + c with a the left factor, c the padding factor.
        const Index d = left_dim_;
        const Index r = n / d;
        Matrix out = Matrix::Zero(n, n);
        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                Complex acc{0.0, 0.0};
                double mass = 0.0;
                for (Index c = 0; c < r; ++c) {
                    acc += w(b * r + c) * x(a * r + c, b * r + c);
                    mass += w(b * r + c);
                }
                const Complex v = acc / mass;
                for (Index c = 0; c < r; ++c) out(a * r + c, b * r + c) = v;
            }
        }
        return out;
    }
    case Kind::CommutativeBlocks: {
        Matrix out = Matrix::Zero(n, n);
        for (const auto& block : blocks_) {
            Complex acc{0.0, 0.0};
            double mass = 0.0;
            for (Index i : block) {
                acc += w(i) * x(i, i);
                mass += w(i);
            }
            for (Index i : block) out(i, i) = acc / mass;
        }
        return out;
    }
    case Kind::PinchingBlocks: {
        Matrix out = Matrix::Zero(n, n);
        for (const auto& block : blocks_) {
            for (Index i : block) {
                for (Index j : block) out(i, j) = x(i, j);
            }
        }
        return out;
    }
    }
    return x;
}

Matrix Subalgebra::expectation_by_basis(const Matrix& x) const {
    const std::vector<Matrix> basis = orthonormal_basis();
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const auto& b : basis) out += algebra_.inner(x, b) * b;
    return out;
}

std::vector<Matrix> Subalgebra::orthonormal_basis() const {
    const Index n = algebra_.dim();
    const RealVector& w = algebra_.weights();
    std::vector<Matrix> out;
    switch (kind_) {
    case Kind::Explicit: return basis_;
    case Kind::Scalars:
        out.push_back(Matrix::Identity(n, n) / std::sqrt(algebra_.total()));
        break;
    case Kind::Full:
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) out.push_back(unit_matrix(n, i, j) / std::sqrt(w(j)));
        }
        break;
    case Kind::TensorLeft: {
        const Index d = left_dim_;
        const Index r = n / d;
        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                Matrix e = Matrix::Zero(n, n);
                double mass = 0.0;
                for (Index c = 0; c < r; ++c) {
                    e(a * r + c, b * r + c) = 1.0;
                    mass += w(b * r + c);
                }
                out.push_back(e / std::sqrt(mass));
            }
        }
        break;
    }
    case Kind::CommutativeBlocks:
        for (const auto& block : blocks_) {
            Matrix e = Matrix::Zero(n, n);
            double mass = 0.0;
            for (Index i : block) {
                e(i, i) = 1.0;
                mass += w(i);
            }
            out.push_back(e / std::sqrt(mass));
        }
        break;
    case Kind::PinchingBlocks:
        for (const auto& block : blocks_) {
            for (Index i : block) {
                for (Index j : block) out.push_back(unit_matrix(n, i, j) / std::sqrt(w(j)));
            }
        }
        break;
    }
    return out;
}

std::vector<Matrix> Subalgebra::generators() const {
    const Index n = algebra_.dim();
    std::vector<Matrix> out;
    auto block_units = [&](const std::vector<Index>& block) {
        const Index b0 = block.front();
        for (Index j : block) {
            out.push_back(unit_matrix(n, b0, j));
            if (j != b0) out.push_back(unit_matrix(n, j, b0));
        }
    };
    switch (kind_) {
    case Kind::Explicit:
        for (const auto& b : basis_) {
            out.push_back(b);
            out.push_back(b.adjoint());
        }
        break;
    case Kind::Scalars: out.push_back(Matrix::Identity(n, n)); break;
    case Kind::Full: {
        std::vector<Index> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), Index{0});
        block_units(all);
        break;
    }
    case Kind::TensorLeft: {
        const Index r = n / left_dim_;
        for (Index j = 0; j < left_dim_; ++j) {
            Matrix e = Matrix::Zero(n, n);
            Matrix et = Matrix::Zero(n, n);
            for (Index c = 0; c < r; ++c) {
                e(c, j * r + c) = 1.0;
                et(j * r + c, c) = 1.0;
            }
            out.push_back(e);
            if (j != 0) out.push_back(et);
        }
        break;
    }
    case Kind::CommutativeBlocks:
        for (const auto& block : blocks_) {
            Matrix e = Matrix::Zero(n, n);
            for (Index i : block) e(i, i) = 1.0;
            out.push_back(e);
        }
        break;
    case Kind::PinchingBlocks:
        for (const auto& block : blocks_) block_units(block);
        break;
    }
    return out;
}

bool Subalgebra::contains(const Matrix& x, double tol) const {
    return norm_within(expectation(x) - x, tol);
}

double Subalgebra::InvariantDefects::max() const {
    return std::max({orthonormality, unit, star_closure, multiplicative_closure});
}

Subalgebra::InvariantDefects Subalgebra::measure_invariants() const {
    InvariantDefects d;
    const std::vector<Matrix> basis = orthonormal_basis();
    const Index n = algebra_.dim();
    auto project = [&](const Matrix& x) {
        Matrix out = Matrix::Zero(n, n);
        for (const auto& b : basis) out += algebra_.inner(x, b) * b;
        return out;
    };
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const Complex g = algebra_.inner(basis[i], basis[j]);
            d.orthonormality = std::max(d.orthonormality, std::abs(g - Complex(i == j ? 1.0 : 0.0)));
        }
    }
    const Matrix one = Matrix::Identity(n, n);
    d.unit = op_norm(project(one) - one);
    for (const auto& b : basis) {
        const Matrix bs = b.adjoint();
        d.star_closure = std::max(d.star_closure, op_norm(project(bs) - bs));
    }
    for (const auto& a : basis) {
        for (const auto& b : basis) {
            const Matrix ab = a * b;
            d.multiplicative_closure = std::max(d.multiplicative_closure, op_norm(project(ab) - ab));
        }
    }
    return d;
}

bool commutant_contains(const Matrix& xi, const Subalgebra& s, double tol) {
    for (const auto& g : s.generators()) {
        if (!norm_within(xi * g - g * xi, tol)) return false;
    }
    return true;
}

Filtration::Filtration(TracialAlgebra algebra, std::vector<Subalgebra> levels, double tol)
    : algebra_(std::move(algebra)), levels_(std::move(levels)) {
    if (levels_.empty()) throw Error("Filtration: at least one level is required");
    for (const auto& level : levels_) {
        if (!(level.algebra() == algebra_)) {
            throw Error("Filtration: every level must live in the same tracial algebra");
        }
    }
    for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
        for (const auto& g : levels_[k].generators()) {
            const Matrix gap = levels_[k + 1].expectation(g) - g;
            if (norm_within(gap, tol)) continue;
            const double defect = op_norm(gap);
            if (defect > tol) {
                throw InvariantViolation("Filtration: level " + std::to_string(k + 1) +
                                             " is not contained in level " + std::to_string(k + 2),
                                         defect);
            }
        }
    }
    // τ restricted to the top level must be tracial: the weight matrix has to
    // commute with the top algebra.
    const auto w = algebra_.weights().asDiagonal();
    const double wmax = algebra_.weights().maxCoeff();
    for (const auto& g : levels_.back().generators()) {
        const Matrix gap = (w * g - g * w) / wmax;
        if (norm_within(gap, tol)) continue;
        const double defect = op_norm(gap);
        if (defect > tol) {
            throw InvariantViolation("Filtration: trace weights are not tracial on the top level",
                                     defect);
        }
    }
}

const Subalgebra& Filtration::level(std::size_t k) const {
    if (k > levels_.size()) {
        throw Error("Filtration: level " + std::to_string(k) + " out of range");
    }
    return levels_[k == 0 ? 0 : k - 1];
}

Filtration make_tensor_dyadic_filtration(unsigned levels, double weight) {
    if (levels < 1) throw Error("make_tensor_dyadic_filtration: need at least one level");
    if (levels > 30 || (Index{1} << levels) > kMaxDim) {
        throw Error("make_tensor_dyadic_filtration: 2^" + std::to_string(levels) +
                    " exceeds dimension cap " + std::to_string(kMaxDim));
    }
    const Index n = Index{1} << levels;
    TracialAlgebra algebra = TracialAlgebra::uniform(n, weight);
    std::vector<Subalgebra> chain;
    for (unsigned k = 1; k < levels; ++k) chain.push_back(Subalgebra::tensor_left(algebra, Index{1} << k));
    chain.push_back(Subalgebra::full(algebra));
    return Filtration(algebra, std::move(chain));
}

Filtration make_partition_filtration(const TracialAlgebra& algebra,
                                     const std::vector<Partition>& chain, PartitionMode mode) {
    if (chain.empty()) throw Error("make_partition_filtration: empty chain");
    std::vector<Partition> canon;
    for (const auto& p : chain) canon.push_back(canonical_partition(p, algebra.dim()));
    for (std::size_t k = 0; k + 1 < canon.size(); ++k) {
        const bool ok = mode == PartitionMode::Commutative ? refines(canon[k + 1], canon[k])
                                                           : refines(canon[k], canon[k + 1]);
        if (!ok) {
            throw Error(std::string("make_partition_filtration: partition ") + std::to_string(k + 2) +
                        (mode == PartitionMode::Commutative ? " does not refine " : " does not coarsen ") +
                        "partition " + std::to_string(k + 1));
        }
    }
    std::vector<Subalgebra> levels;
    for (auto& p : canon) {
        levels.push_back(mode == PartitionMode::Commutative
                             ? Subalgebra::commutative_blocks(algebra, std::move(p))
                             : Subalgebra::pinching_blocks(algebra, std::move(p)));
    }
    return Filtration(algebra, std::move(levels));
}

} // namespace ncmart
