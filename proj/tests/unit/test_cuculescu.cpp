#include <doctest.h>

#include "fixtures.hpp"
#include "ncmart/cuculescu.hpp"
#include "ncmart/norms.hpp"

#include <Eigen/Eigenvalues>

#include <memory>

using namespace ncmart;
using namespace fixtures;

namespace {

/// Scalars ⊂ M_2 with the unweighted trace.
FiltrationPtr scalars_then_full() {
    const TracialAlgebra alg = TracialAlgebra::uniform(2);
    return std::make_shared<const Filtration>(
        Filtration(alg, {Subalgebra::scalars(alg), Subalgebra::full(alg)}));
}

FiltrationPtr dyadic(unsigned k) {
    return std::make_shared<const Filtration>(make_tensor_dyadic_filtration(k, 1.0 / std::ldexp(1.0, k)));
}

} // namespace

TEST_SUITE("cuculescu") {

TEST_CASE("hand example in M_2") {
    const Martingale x = Martingale::from_final(scalars_then_full(), diag({3.0, 0.0}));
    CHECK(dist(x.term(1), 1.5 * Matrix::Identity(2, 2)) < 1e-14);
    const CuculescuSequence c = cuculescu(x, 1.0);
    REQUIRE(c.length() == 2);
    CHECK(c.q[0].is_identity());
    CHECK(c.q[1].is_zero());
    CHECK(c.q[2].is_zero());
    CHECK(c.terminal().is_zero());

    const RandriEstimates r = randri_estimates(x, c);
    CHECK(r.x_norm1 == doctest::Approx(3.0));
    CHECK(r.compressed_terms == doctest::Approx(3.0));
    CHECK(r.compressed_previous == doctest::Approx(0.0));
    CHECK(r.compressed_differences == doctest::Approx(3.0));
    CHECK(r.identity_residual < 1e-14);
    CHECK(r.compressed_sum == doctest::Approx(3.0));

    const CuculescuDefects d = measure_cuculescu(x, c);
    CHECK(d.lambda_mass == doctest::Approx(2.0));
    CHECK(d.mass <= 0.0);
}

TEST_CASE("threshold above every term keeps all projections at the identity") {
    std::mt19937_64 rng(1);
    const Martingale x = Martingale::from_final(dyadic(3), hermitian(rng, 8));
    const double lambda = 1.01 * spectral_norm(x.last());
    const CuculescuSequence c = cuculescu(x, lambda);
    for (const auto& q : c.q) CHECK(q.is_identity());
    CHECK(measure_cuculescu(x, c).lambda_mass == 0.0);
    const RandriEstimates r = randri_estimates(x, c);
    CHECK(r.compressed_terms < 1e-13);
    CHECK(r.compressed_previous < 1e-13);
    CHECK(r.compressed_differences < 1e-13);
    CHECK(r.identity_residual < 1e-12);
    CHECK(r.compressed_sum == doctest::Approx(lp_norm(x.last(), 1.0, x.algebra().weights())));
}

TEST_CASE("a vanished projection stays zero") {
    std::mt19937_64 rng(2);
    const Martingale x = Martingale::from_final(dyadic(4), Matrix(positive(rng, 16) + 5.0 * Matrix::Identity(16, 16)));
    const CuculescuSequence c = cuculescu(x, 1.0);
    CHECK(c.q[1].is_zero());
    for (std::size_t k = 1; k <= c.length(); ++k) CHECK(c.q[k].is_zero());
}

TEST_CASE("sequence invariants and the five estimates on random input") {
    std::mt19937_64 rng(3);
    const FiltrationPtr f = dyadic(4);
    for (int trial = 0; trial < 30; ++trial) {
        Matrix h = hermitian(rng, 16);
        h /= lp_norm(h, 1.0, f->algebra().weights());
        const Martingale x = Martingale::from_final(f, h);
        const double lambda = 0.2 + 0.1 * trial;
        const CuculescuSequence c = cuculescu(x, lambda);
        const CuculescuDefects d = measure_cuculescu(x, c);
        CHECK(d.decreasing < 1e-9);
        CHECK(d.adaptedness < 1e-9);
        CHECK(d.commutation < 1e-9);
        CHECK(d.compression <= 1e-9);
        CHECK(d.mass <= 1e-9);
        for (std::size_t k = 1; k <= c.length(); ++k) {
            const Matrix& q = c.q[k].matrix();
            const Matrix comp = q * x.term(k) * q;
            CHECK(dist(q * comp * q, comp) < 1e-12);
            if (c.q[k].is_zero()) continue;
            const Matrix restricted = c.q[k].basis().adjoint() * x.term(k) * c.q[k].basis();
            Eigen::SelfAdjointEigenSolver<Matrix> es((restricted + restricted.adjoint()) / 2.0,
                                                     Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().maxCoeff() <= lambda + 1e-9);
            CHECK(es.eigenvalues().minCoeff() >= -lambda - 1e-9);
        }
        const RandriEstimates r = randri_estimates(x, c);
        CHECK(r.compressed_terms <= 1.0 * r.x_norm1 + 1e-9);
        CHECK(r.compressed_previous <= 2.0 * r.x_norm1 + 1e-9);
        CHECK(r.compressed_differences <= 3.0 * r.x_norm1 + 1e-9);
        CHECK(r.identity_residual <= 1e-9);
        CHECK(r.compressed_sum <= 2.0 * r.x_norm1 + 1e-9);
    }
}

TEST_CASE("invalid input") {
    std::mt19937_64 rng(4);
    const Martingale x = Martingale::from_final(dyadic(2), hermitian(rng, 4));
    CHECK_THROWS_AS(cuculescu(x, 0.0), Error);
    CHECK_THROWS_AS(cuculescu(x, -1.0), Error);
    CHECK_THROWS_AS(cuculescu(x, std::nan("")), Error);
    const Martingale g = Martingale::from_final(dyadic(2), gaussian(rng, 4));
    CHECK_THROWS_AS(cuculescu(g, 1.0), InvariantViolation);
    // Drift inside the tolerance is symmetrized.
    Matrix h = hermitian(rng, 4);
    h(0, 1) += 1e-12;
    CHECK_NOTHROW(cuculescu(Martingale::from_final(dyadic(2), h), 1.0));
}

} // TEST_SUITE
