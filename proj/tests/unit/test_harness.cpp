#include <doctest.h>

#include "fixtures.hpp"
#include "ncmart/harness.hpp"
#include "ncmart/norms.hpp"

#include <Eigen/Eigenvalues>

#include <cstring>
#include <limits>

using namespace ncmart;
using namespace fixtures;

namespace {

bool bit_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0;
}

InstanceSpec dyadic_spec(unsigned k, GeneratorKind g, std::uint64_t seed) {
    InstanceSpec s;
    s.dim = Index(1) << k;
    s.weights = RealVector::Constant(s.dim, 1.0 / static_cast<double>(s.dim));
    s.filtration.kind = FiltrationDescriptor::Kind::TensorDyadic;
    s.filtration.levels = k;
    s.generator.kind = g;
    s.seed = seed;
    return s;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("matrix serialization is exact") {
    std::mt19937_64 rng(1);
    Matrix m = gaussian(rng, 3, 5);
    m(0, 0) = Complex(std::numeric_limits<double>::denorm_min(), -0.1);
    m(1, 2) = Complex(1.0 / 3.0, std::nextafter(1.0, 2.0));
    CHECK(bit_equal(matrix_from_json(matrix_to_json(m)), m));
    // Through text as well.
    CHECK(bit_equal(matrix_from_json(nlohmann::json::parse(matrix_to_json(m).dump())), m));
}

TEST_CASE("instance round trip") {
    std::mt19937_64 rng(2);
    for (FiltrationFamily family : {FiltrationFamily::Dyadic, FiltrationFamily::Commutative,
                                    FiltrationFamily::Pinching}) {
        const InstanceSpec spec = random_spec(rng, family, 8, 3, GeneratorKind::General);
        const Instance a = generate_instance(spec);
        const Instance b = instance_from_json(nlohmann::json::parse(instance_to_json(a).dump()));
        CHECK(b.dim == a.dim);
        CHECK(b.descriptor.kind == a.descriptor.kind);
        CHECK(std::memcmp(a.weights.data(), b.weights.data(), sizeof(double) * 8) == 0);
        CHECK(bit_equal(a.final_element, b.final_element));
        CHECK(b.filtration->length() == a.filtration->length());
        CHECK(instance_to_json(b).dump() == instance_to_json(a).dump());
    }
}

TEST_CASE("instance generation") {
    SUBCASE("same seed, same matrices") {
        const InstanceSpec spec = dyadic_spec(3, GeneratorKind::General, 42);
        CHECK(bit_equal(generate_instance(spec).final_element, generate_instance(spec).final_element));
        const InstanceSpec other = dyadic_spec(3, GeneratorKind::General, 43);
        CHECK_FALSE(bit_equal(generate_instance(spec).final_element, generate_instance(other).final_element));
    }
    SUBCASE("positive generators") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Instance inst = generate_instance(dyadic_spec(3, GeneratorKind::Positive, seed));
            Eigen::SelfAdjointEigenSolver<Matrix> es(inst.final_element, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
            CHECK(lp_norm(inst.final_element, 1.0, inst.weights) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(measure_martingale(inst.martingale()).max() < 1e-9);
        }
    }
    SUBCASE("self-adjoint generators") {
        const Instance inst = generate_instance(dyadic_spec(2, GeneratorKind::SelfAdjoint, 5));
        CHECK(dist(inst.final_element, inst.final_element.adjoint()) == 0.0);
    }
    SUBCASE("dyadic k = 4") {
        const Instance inst = generate_instance(dyadic_spec(4, GeneratorKind::Positive, 7));
        CHECK(inst.filtration->length() == 4);
        CHECK(inst.filtration->dim() == 16);
        CHECK(inst.filtration->level(4).kind() == Subalgebra::Kind::Full);
    }
    SUBCASE("malformed descriptors") {
        InstanceSpec bad = dyadic_spec(3, GeneratorKind::Positive, 1);
        bad.dim = 6;
        bad.weights = RealVector::Constant(6, 1.0 / 6.0);
        CHECK_THROWS_AS(generate_instance(bad), Error);
        CHECK_THROWS_AS(generator_kind_from_string("unitary"), Error);
        nlohmann::json j = instance_to_json(generate_instance(dyadic_spec(2, GeneratorKind::Positive, 1)));
        j["filtration"]["kind"] = "spiral";
        CHECK_THROWS_AS(instance_from_json(j), Error);
    }
}

TEST_CASE("reports") {
    const CheckReport ok = make_report("c", "anchor", 1.0, 1.0, 0.0, {});
    CHECK(ok.pass);
    CHECK(make_report("c", "anchor", 1.0 + 1e-8, 1.0, 1e-7, {}).pass);
    CHECK_FALSE(make_report("c", "anchor", 1.0 + 1e-6, 1.0, 1e-7, {}).pass);
    CHECK_FALSE(make_report("c", "anchor", std::nan(""), 1.0, 1e-7, {}).pass);
    CHECK_FALSE(make_report("c", "anchor", kInfinity, kInfinity, 0.0, {}).pass);
    const nlohmann::json j = ok.to_json();
    CHECK(j.at("check") == "c");
    CHECK(j.at("pass") == true);
}

TEST_CASE("bound table") {
    CHECK(bounds::kIntermediateL1 == 9.0);
    CHECK(bounds::kAlphaL1 == 18.0);
    CHECK(bounds::kAlphaL2Squared == 72.0);
    CHECK(bounds::kAlphaLinf == 4.0);
    CHECK(bounds::kBetaVariation == 7.0);
    CHECK(bounds::kSupportMass == 10.0);
    CHECK(bounds::kBurkholderAlphaL2Squared == 24.0);
    CHECK(bounds::kQuasiTriangle == 2.0);
    CHECK(bounds::kCompressedDifferences == 3.0);
    CHECK(bounds::kCompressedTerms == 1.0);
    CHECK(bounds::kCompressedPrevious == 2.0);
    CHECK(bounds::kCompressedSum == 2.0);
}

TEST_CASE("campaigns") {
    SUBCASE("no trials") {
        CampaignConfig cfg;
        cfg.trials = 0;
        const CampaignResult r = run_campaign(cfg);
        CHECK(r.reports.empty());
        CHECK(r.all_pass());
        CHECK(r.report_lines().empty());
    }
    SUBCASE("determinism") {
        CampaignConfig cfg;
        cfg.suite = "cuculescu";
        cfg.trials = 10;
        cfg.dims = {8};
        cfg.seed = 17;
        const CampaignResult a = run_campaign(cfg);
        const CampaignResult b = run_campaign(cfg);
        CHECK_FALSE(a.reports.empty());
        CHECK(a.all_pass());
        CHECK(a.report_lines() == b.report_lines());
        CHECK(a.summary_json().dump() == b.summary_json().dump());
        cfg.seed = 18;
        CHECK(run_campaign(cfg).report_lines() != a.report_lines());
    }
    SUBCASE("every suite runs cleanly at small size") {
        for (const std::string& suite : suite_names()) {
            CampaignConfig cfg;
            cfg.suite = suite;
            cfg.trials = 3;
            cfg.dims = {8};
            const CampaignResult r = run_campaign(cfg);
            INFO(suite);
            CHECK(r.errors.empty());
            CHECK(r.all_pass());
        }
    }
    SUBCASE("unknown suite") {
        CampaignConfig cfg;
        cfg.suite = "nonsense";
        CHECK_THROWS_AS(run_campaign(cfg), Error);
    }
    CHECK(trial_seed(1, "gundy", 0) == trial_seed(1, "gundy", 0));
    CHECK(trial_seed(1, "gundy", 0) != trial_seed(1, "gundy", 1));
    CHECK(trial_seed(1, "gundy", 0) != trial_seed(1, "cuculescu", 0));
    CHECK(trial_seed(1, "gundy", 0) != trial_seed(2, "gundy", 0));
}

TEST_CASE("threshold selection") {
    std::mt19937_64 rng(3);
    const Instance inst = generate_instance(dyadic_spec(3, GeneratorKind::Positive, 11));
    const Martingale x = inst.martingale();
    const std::vector<double> l = trial_lambdas(rng, x);
    const double sup = lp_norm(x.last(), kInfinity, x.algebra().weights());
    REQUIRE(l.size() == 3);
    CHECK(l[0] >= 0.01 * sup);
    CHECK(l[0] <= 10.0 * sup);
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.term(1), Eigen::EigenvaluesOnly);
    CHECK(l[1] < es.eigenvalues().minCoeff());
    CHECK(l[2] == doctest::Approx(2.0 * sup));
}

} // TEST_SUITE
