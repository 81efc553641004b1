#include <doctest.h>

#include "fixtures.hpp"
#include "ncmart/applications.hpp"
#include "ncmart/norms.hpp"

#include <memory>

using namespace ncmart;
using namespace fixtures;

namespace {

FiltrationPtr dyadic(unsigned k) {
    return std::make_shared<const Filtration>(make_tensor_dyadic_filtration(k, 1.0 / std::ldexp(1.0, k)));
}

FiltrationPtr diagonal_chain() {
    const TracialAlgebra alg = TracialAlgebra::uniform(4, 0.25);
    return std::make_shared<const Filtration>(make_partition_filtration(
        alg, {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}}, PartitionMode::Commutative));
}

Martingale normalized_positive(std::mt19937_64& rng, const FiltrationPtr& f) {
    Matrix p = positive(rng, f->dim());
    p /= lp_norm(p, 1.0, f->algebra().weights());
    return Martingale::from_final(f, p);
}

std::vector<Projection> coordinate_family(Index n) {
    std::vector<Projection> out;
    for (Index i = 0; i < n; ++i) out.push_back(Projection(Matrix(Matrix::Identity(n, n).col(i))));
    return out;
}

bool is_diagonal(const Matrix& m) {
    Matrix off = m;
    off.diagonal().setZero();
    return spectral_norm(off) < 1e-12;
}

} // namespace

TEST_SUITE("applications") {

TEST_CASE("triangular truncation") {
    SUBCASE("coordinate projections in M_2") {
        const Matrix x = mat({{1.0, 2.0}, {3.0, 4.0}});
        const auto family = coordinate_family(2);
        CHECK(dist(triangular_truncation(x, family), mat({{1.0, 2.0}, {0.0, 4.0}})) == 0.0);
    }
    SUBCASE("the unit alone") {
        std::mt19937_64 rng(1);
        const Matrix x = gaussian(rng, 5);
        const std::vector<Projection> one{Projection::identity(5)};
        CHECK(dist(triangular_truncation(x, one), x) < 1e-14);
    }
    SUBCASE("non-orthogonal families are rejected") {
        const Matrix v = (Matrix(2, 1) << 1.0, 1.0).finished() / std::sqrt(2.0);
        const std::vector<Projection> family{Projection(Matrix(Matrix::Identity(2, 2).col(0))), Projection(v)};
        CHECK(orthogonality_defect(family) == doctest::Approx(std::sqrt(0.5)));
        CHECK_THROWS_AS(triangular_truncation(Matrix::Identity(2, 2), family), InvariantViolation);
    }
    SUBCASE("linear idempotent on random complete families") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix u = unitary(rng, 6);
            const std::vector<Projection> family{Projection(u.leftCols(2)), Projection(u.middleCols(2, 3)),
                                                 Projection(u.rightCols(1))};
            CHECK(orthogonality_defect(family) < 1e-12);
            const Matrix x = gaussian(rng, 6);
            const Matrix y = gaussian(rng, 6);
            const Matrix tx = triangular_truncation(x, family);
            CHECK(dist(triangular_truncation(tx, family), tx) < 1e-12 * spectral_norm(x));
            CHECK(dist(triangular_truncation(x + y, family), tx + triangular_truncation(y, family)) < 1e-12 * 10);
        }
    }
}

TEST_CASE("scale projections") {
    std::mt19937_64 rng(3);
    SUBCASE("small operator norm") {
        const FiltrationPtr f = dyadic(3);
        Matrix p = positive(rng, 8);
        p *= 0.9 / spectral_norm(p);
        const Martingale x = Martingale::from_final(f, p);
        const ScaleProjectionFamily fam = scale_projections(x, 2);
        CHECK(fam.top == 2);
        for (std::size_t n = 1; n <= fam.length(); ++n) {
            const auto complete = fam.complete(n);
            CHECK(complete.size() == 3);
            CHECK(complete[0].is_identity());
            for (std::size_t i = 1; i < complete.size(); ++i) CHECK(complete[i].is_zero());
            CHECK(fam.remainder[n - 1].is_zero());
        }
    }
    SUBCASE("diagonal martingale") {
        const Martingale x = Martingale::from_final(diagonal_chain(), diag({7.0, 0.25, 3.0, 1.5}));
        const ScaleProjectionFamily fam = scale_projections(x, 1);
        CHECK(fam.top == 3);
        for (std::size_t n = 1; n <= fam.length(); ++n) {
            for (const auto& p : fam.complete(n)) {
                CHECK(is_diagonal(p.matrix()));
                for (Index i = 0; i < 4; ++i) {
                    const double d = p.matrix()(i, i).real();
                    CHECK((std::abs(d) < 1e-12 || std::abs(d - 1.0) < 1e-12));
                }
            }
        }
        const FamilyDefects d = measure_family(fam);
        CHECK(d.disjointness < 1e-12);
        CHECK(d.partition < 1e-12);
    }
    SUBCASE("random positive instances") {
        for (int trial = 0; trial < 10; ++trial) {
            const Martingale x = normalized_positive(rng, dyadic(4));
            for (unsigned m : {0u, 1u, 3u}) {
                const ScaleProjectionFamily fam = scale_projections(x, m);
                CHECK(fam.top >= m);
                CHECK(fam.sequences.size() == fam.top + 1);
                const FamilyDefects d = measure_family(fam);
                CHECK(d.disjointness <= 1e-9);
                CHECK(d.partition <= 1e-9);
                CHECK(fam.sequences.back().terminal().is_identity());
            }
        }
    }
    SUBCASE("non-positive input is rejected") {
        const Martingale x = Martingale::from_final(dyadic(2), diag({1.0, -1.0, 0.5, 0.5}));
        CHECK_THROWS_AS(scale_projections(x, 1), Error);
    }
    CHECK(family_index(1) == 1);
    CHECK(family_index(2) == 1);
    CHECK(family_index(5) == 4);
}

TEST_CASE("y/z splitting") {
    std::mt19937_64 rng(4);
    SUBCASE("diagonal martingale has no lower part") {
        const Martingale x = Martingale::from_final(diagonal_chain(), diag({7.0, 0.25, 3.0, 1.5}));
        const ScaleProjectionFamily fam = scale_projections(x, 1);
        const YZSplit s = burkholder_yz(x, fam);
        for (std::size_t k = 1; k <= x.length(); ++k) {
            CHECK(spectral_norm(s.dz(k)) < 1e-12);
            CHECK(dist(s.dy(k), x.difference(k)) < 1e-12);
        }
    }
    SUBCASE("single step with small norm") {
        const TracialAlgebra alg = TracialAlgebra::uniform(3, 1.0 / 3.0);
        const FiltrationPtr f = std::make_shared<const Filtration>(Filtration(alg, {Subalgebra::full(alg)}));
        Matrix p = positive(rng, 3);
        p *= 0.8 / spectral_norm(p);
        const Martingale x = Martingale::from_final(f, p);
        const YZSplit s = burkholder_yz(x, scale_projections(x, 0));
        CHECK(dist(s.dy(1), x.difference(1)) < 1e-14);
        CHECK(spectral_norm(s.dz(1)) < 1e-14);
    }
    SUBCASE("random instances split into martingale differences") {
        const FiltrationPtr f = dyadic(4);
        for (int trial = 0; trial < 10; ++trial) {
            const Martingale x = normalized_positive(rng, f);
            const ScaleProjectionFamily fam = scale_projections(x, 2);
            const YZSplit s = burkholder_yz(x, fam);
            for (std::size_t k = 1; k <= x.length(); ++k) {
                CHECK(dist(s.dy(k) + s.dz(k), x.difference(k)) < 1e-12);
            }
            CHECK(difference_defect(*f, s.dy) <= 1e-9);
            CHECK(difference_defect(*f, s.dz) <= 1e-9);
        }
    }
}

TEST_CASE("truncated square function") {
    std::mt19937_64 rng(5);
    SUBCASE("total truncation equals the column square function") {
        const Martingale x = normalized_positive(rng, dyadic(3));
        const unsigned m = 12;
        const ScaleProjectionFamily fam = scale_projections(x, m);
        CHECK(fam.top == m);
        const YZSplit s = burkholder_yz(x, fam);
        CHECK(dist(truncated_square_function(x.differences(), fam), square_function_column(s.dy)) < 1e-12);
    }
    SUBCASE("one step") {
        const TracialAlgebra alg = TracialAlgebra::uniform(4, 0.25);
        const FiltrationPtr f = std::make_shared<const Filtration>(Filtration(alg, {Subalgebra::full(alg)}));
        const Martingale x = Martingale::from_final(f, Matrix(8.0 * positive(rng, 4)));
        const ScaleProjectionFamily fam = scale_projections(x, 1);
        const Matrix expected = ncmart::abs(triangular_truncation(x.difference(1), fam.truncated(1)));
        CHECK(dist(truncated_square_function(x.differences(), fam), expected) < 1e-12);
    }
    SUBCASE("reduction inequality and cancellation on normalized instances") {
        const FiltrationPtr f = dyadic(4);
        for (int trial = 0; trial < 8; ++trial) {
            const Martingale x = normalized_positive(rng, f);
            for (unsigned m : {0u, 1u, 2u, 4u}) {
                const ScaleProjectionFamily fam = scale_projections(x, m);
                const YZSplit s = burkholder_yz(x, fam);
                const TruncationReductionReport r = truncation_reduction(x, fam, s);
                CHECK(r.lambda == std::ldexp(1.0, static_cast<int>(m)));
                CHECK(r.lhs <= r.rhs + 1e-7);
                const FourPartDecomposition b = burkholder_decompose(x, r.lambda);
                CHECK(cancellation_residual(b, fam) <= 1e-9);
            }
        }
    }
}

TEST_CASE("co-lacunary estimator") {
    const RealVector quarter = RealVector::Constant(4, 0.25);
    SUBCASE("Rademacher pair") {
        const DifferenceSequence d{{diag({1.0, 1.0, -1.0, -1.0}), diag({1.0, -1.0, 1.0, -1.0})}};
        const ColacunaryEstimate e = colacunary_estimate(d, quarter);
        CHECK(std::abs(e.delta - std::sqrt(0.5)) <= 1e-3);
        REQUIRE(e.witness.size() == 2);
        CHECK(std::hypot(e.witness[0], e.witness[1]) == doctest::Approx(1.0));
    }
    SUBCASE("one difference") {
        std::mt19937_64 rng(6);
        const DifferenceSequence d{{gaussian(rng, 4)}};
        CHECK(colacunary_estimate(d, quarter).delta == lp_norm(d(1), 1.0, quarter));
    }
    SUBCASE("homogeneity") {
        std::mt19937_64 rng(7);
        const DifferenceSequence d{{gaussian(rng, 4), gaussian(rng, 4), gaussian(rng, 4)}};
        DifferenceSequence scaled = d;
        for (auto& t : scaled.terms) t *= Complex(0.0, -3.0);
        ColacunaryOptions opt;
        opt.trials = 64;
        opt.descent_steps = 40;
        const double base = colacunary_estimate(d, quarter, opt).delta;
        CHECK(colacunary_estimate(scaled, quarter, opt).delta == doctest::Approx(3.0 * base).epsilon(1e-9));
        CHECK(base <= lp_norm(d(1), 1.0, quarter) + 1e-12);
    }
    SUBCASE("degenerate input") {
        CHECK_THROWS_AS(colacunary_estimate(DifferenceSequence{}, quarter), Error);
        const DifferenceSequence z{{diag({1.0, 0.0, 0.0, 0.0}), Matrix::Zero(4, 4)}};
        CHECK_THROWS_AS(colacunary_estimate(z, quarter), Error);
    }
}

} // TEST_SUITE
