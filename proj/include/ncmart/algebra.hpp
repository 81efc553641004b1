#pragma once

// Tracial matrix algebras, unital *-subalgebras with their trace-preserving
// conditional expectations, and filtration constructors.

#include "ncmart/types.hpp"

#include <memory>
#include <vector>

namespace ncmart {

/// M_N with the faithful weighted trace τ(x) = Σ_i w_i x_ii.
class TracialAlgebra {
public:
    explicit TracialAlgebra(RealVector weights);

    static TracialAlgebra uniform(Index n, double weight = 1.0);
    /// Uniform weights with τ(1) = 1.
    static TracialAlgebra normalized(Index n) { return uniform(n, 1.0 / static_cast<double>(n)); }

    [[nodiscard]] Index dim() const { return weights_.size(); }
    [[nodiscard]] const RealVector& weights() const { return weights_; }
    [[nodiscard]] double total() const { return weights_.sum(); }

    [[nodiscard]] Complex trace(const Matrix& x) const;
    /// ⟨a, b⟩ = τ(b* a).
    [[nodiscard]] Complex inner(const Matrix& a, const Matrix& b) const;
    /// ‖x‖_2 in the τ-inner product.
    [[nodiscard]] double norm2(const Matrix& x) const;

    friend bool operator==(const TracialAlgebra&, const TracialAlgebra&) = default;

private:
    RealVector weights_;
};

/// A set partition of {0, …, N−1}; blocks are sorted and listed by smallest element.
using Partition = std::vector<std::vector<Index>>;

/// Canonical form of a partition; throws if it does not partition {0..n-1}.
Partition canonical_partition(Partition p, Index n);
/// True iff every block of `fine` lies inside a block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

/// Unital *-subalgebra of a TracialAlgebra. The conditional expectation is the
/// τ-orthogonal projection onto the subalgebra. Structured kinds evaluate it in
/// closed form; every kind also exposes the generic orthonormal-basis route.
class Subalgebra {
public:
    enum class Kind { Explicit, Scalars, Full, TensorLeft, CommutativeBlocks, PinchingBlocks };

    /// Gram–Schmidt in the τ-inner product, then validation of the unit,
    /// *-closure and multiplicative closure. Throws InvariantViolation.
    static Subalgebra from_spanning_set(const TracialAlgebra& algebra,
                                        const std::vector<Matrix>& spanning, double tol = 1e-9);
    static Subalgebra scalars(const TracialAlgebra& algebra);
    static Subalgebra full(const TracialAlgebra& algebra);
    /// M_left ⊗ 1_{N/left}.
    static Subalgebra tensor_left(const TracialAlgebra& algebra, Index left_dim);
    /// Span of the block indicator projections.
    static Subalgebra commutative_blocks(const TracialAlgebra& algebra, Partition blocks);
    /// ⊕_B M_B, the block-diagonal matrices.
    static Subalgebra pinching_blocks(const TracialAlgebra& algebra, Partition blocks);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const TracialAlgebra& algebra() const { return algebra_; }
    [[nodiscard]] const Partition& blocks() const { return blocks_; }
    [[nodiscard]] Index left_dim() const { return left_dim_; }
    /// Complex dimension of the subalgebra.
    [[nodiscard]] Index dimension() const;

    /// E(x).
    [[nodiscard]] Matrix expectation(const Matrix& x) const;
    /// E(x) = Σ_b ⟨x, b⟩ b over the orthonormal basis.
    [[nodiscard]] Matrix expectation_by_basis(const Matrix& x) const;

    /// τ-orthonormal basis (materialized on demand for structured kinds).
    [[nodiscard]] std::vector<Matrix> orthonormal_basis() const;
    /// A set whose generated unital algebra is the subalgebra; closed under adjoints.
    [[nodiscard]] std::vector<Matrix> generators() const;

    /// ‖E(x) − x‖_∞ ≤ tol.
    [[nodiscard]] bool contains(const Matrix& x, double tol) const;

    struct InvariantDefects {
        double orthonormality = 0.0;
        double unit = 0.0;
        double star_closure = 0.0;
        double multiplicative_closure = 0.0;
        [[nodiscard]] double max() const;
    };
    /// Measures the invariants on the materialized basis (all pairs).
    [[nodiscard]] InvariantDefects measure_invariants() const;

private:
    Subalgebra(TracialAlgebra algebra, Kind kind) : algebra_(std::move(algebra)), kind_(kind) {}

    TracialAlgebra algebra_;
    Kind kind_;
    Partition blocks_;
    Index left_dim_ = 0;
    std::vector<Matrix> basis_;  // Explicit kind only
};

/// ‖ξ b − b ξ‖_∞ ≤ tol for every element b of a generating set of S.
bool commutant_contains(const Matrix& xi, const Subalgebra& s, double tol);

/// Increasing chain S_1 ⊆ … ⊆ S_n with the convention E_0 = E_1.
class Filtration {
public:
    /// Validates inclusions (on generators) and that τ is a trace on the top level.
    Filtration(TracialAlgebra algebra, std::vector<Subalgebra> levels, double tol = 1e-9);

    [[nodiscard]] const TracialAlgebra& algebra() const { return algebra_; }
    [[nodiscard]] std::size_t length() const { return levels_.size(); }
    [[nodiscard]] Index dim() const { return algebra_.dim(); }
    /// Level k for 0 ≤ k ≤ n; level 0 aliases level 1.
    [[nodiscard]] const Subalgebra& level(std::size_t k) const;
    [[nodiscard]] const Subalgebra& top() const { return levels_.back(); }
    /// E_k(x), 0 ≤ k ≤ n.
    [[nodiscard]] Matrix expectation(std::size_t k, const Matrix& x) const {
        return level(k).expectation(x);
    }

private:
    TracialAlgebra algebra_;
    std::vector<Subalgebra> levels_;
};

using FiltrationPtr = std::shared_ptr<const Filtration>;

/// Level n is M_{2^n} ⊗ 1_{2^{k−n}} inside M_{2^k}, n = 1..k.
/// `weight` is the trace weight of each diagonal entry (uniform trace).
Filtration make_tensor_dyadic_filtration(unsigned levels, double weight = 1.0);

enum class PartitionMode { Commutative, Pinching };

/// Commutative mode: block-indicator algebras, partitions must refine along the chain.
/// Pinching mode: block-diagonal algebras, partitions must coarsen along the chain.
Filtration make_partition_filtration(const TracialAlgebra& algebra,
                                     const std::vector<Partition>& chain, PartitionMode mode);

} // namespace ncmart
