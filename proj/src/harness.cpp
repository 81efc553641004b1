#include "ncmart/harness.hpp"

#include "ncmart/norms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace ncmart {

using nlohmann::json;

const char* to_string(FiltrationDescriptor::Kind k) {
    switch (k) {
    case FiltrationDescriptor::Kind::TensorDyadic: return "tensor_dyadic";
    case FiltrationDescriptor::Kind::PartitionChain: return "partition_chain";
    case FiltrationDescriptor::Kind::ExplicitBases: return "explicit_bases";
    }
    return "unknown";
}

const char* to_string(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::Positive: return "positive";
    case GeneratorKind::SelfAdjoint: return "self-adjoint";
    case GeneratorKind::General: return "general";
    }
    return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
    if (s == "positive") return GeneratorKind::Positive;
    if (s == "self-adjoint") return GeneratorKind::SelfAdjoint;
    if (s == "general") return GeneratorKind::General;
    throw Error("unknown generator kind '" + s + "'");
}

const char* to_string(FiltrationFamily f) {
    switch (f) {
    case FiltrationFamily::Dyadic: return "dyadic";
    case FiltrationFamily::Commutative: return "commutative";
    case FiltrationFamily::Pinching: return "pinching";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Instances

FiltrationPtr build_filtration(const TracialAlgebra& algebra, const FiltrationDescriptor& d) {
    switch (d.kind) {
    case FiltrationDescriptor::Kind::TensorDyadic: {
        if (d.levels < 1 || (Index{1} << d.levels) != algebra.dim()) {
            throw Error("build_filtration: tensor_dyadic with " + std::to_string(d.levels) +
                        " levels needs dimension 2^levels, got " + std::to_string(algebra.dim()));
        }
        std::vector<Subalgebra> chain;
        for (unsigned k = 1; k < d.levels; ++k) {
            chain.push_back(Subalgebra::tensor_left(algebra, Index{1} << k));
        }
        chain.push_back(Subalgebra::full(algebra));
        return std::make_shared<const Filtration>(algebra, std::move(chain));
    }
    case FiltrationDescriptor::Kind::PartitionChain:
        return std::make_shared<const Filtration>(
            make_partition_filtration(algebra, d.chain, d.mode));
    case FiltrationDescriptor::Kind::ExplicitBases: {
        if (d.spanning_sets.empty()) throw Error("build_filtration: explicit_bases without levels");
        std::vector<Subalgebra> chain;
        for (const auto& set : d.spanning_sets) {
            chain.push_back(Subalgebra::from_spanning_set(algebra, set));
        }
        return std::make_shared<const Filtration>(algebra, std::move(chain));
    }
    }
    throw Error("build_filtration: malformed descriptor");
}

namespace {

Matrix gaussian_matrix(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

Partition partition_from_cuts(const std::vector<Index>& order, const std::vector<Index>& cuts) {
    std::vector<Index> sorted = cuts;
    std::sort(sorted.begin(), sorted.end());
    Partition p;
    std::vector<Index> block;
    std::size_t c = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        block.push_back(order[pos]);
        const bool cut_here = c < sorted.size() && sorted[c] == static_cast<Index>(pos);
        if (cut_here || pos + 1 == order.size()) {
            p.push_back(block);
            block.clear();
            if (cut_here) ++c;
        }
    }
    return p;
}

} // namespace

InstanceSpec random_spec(std::mt19937_64& rng, FiltrationFamily family, Index dim, unsigned levels,
                         GeneratorKind generator) {
    if (dim < 1 || dim > kMaxDim) {
        throw Error("random_spec: dimension " + std::to_string(dim) + " outside [1, " +
                    std::to_string(kMaxDim) + "]");
    }
    if (levels < 1) throw Error("random_spec: need at least one level");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    InstanceSpec s;
    s.dim = dim;
    s.generator.kind = generator;
    s.generator.spread = 1.5 * unit(rng);
    switch (family) {
    case FiltrationFamily::Dyadic:
        if ((Index{1} << levels) != dim) throw Error("random_spec: dyadic needs dim = 2^levels");
        s.filtration.kind = FiltrationDescriptor::Kind::TensorDyadic;
        s.filtration.levels = levels;
        s.weights = RealVector::Constant(dim, 1.0 / static_cast<double>(dim));
        break;
    case FiltrationFamily::Commutative:
    case FiltrationFamily::Pinching: {
        if (static_cast<Index>(levels) > dim) {
            throw Error("random_spec: more levels than the dimension allows");
        }
        std::vector<Index> order(static_cast<std::size_t>(dim));
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<Index> positions(static_cast<std::size_t>(std::max<Index>(dim - 1, 0)));
        std::iota(positions.begin(), positions.end(), Index{0});
        std::shuffle(positions.begin(), positions.end(), rng);
        // Distinct cut counts in [0, dim−1], increasing along the chain.
        std::vector<Index> counts(static_cast<std::size_t>(dim));
        std::iota(counts.begin(), counts.end(), Index{0});
        std::shuffle(counts.begin(), counts.end(), rng);
        counts.resize(levels);
        std::sort(counts.begin(), counts.end());
        if (family == FiltrationFamily::Pinching) std::reverse(counts.begin(), counts.end());
        s.filtration.kind = FiltrationDescriptor::Kind::PartitionChain;
        s.filtration.mode = family == FiltrationFamily::Commutative ? PartitionMode::Commutative
                                                                     : PartitionMode::Pinching;
        for (Index c : counts) {
            std::vector<Index> cuts(positions.begin(), positions.begin() + c);
            s.filtration.chain.push_back(canonical_partition(partition_from_cuts(order, cuts), dim));
        }
        s.weights.resize(dim);
        if (family == FiltrationFamily::Commutative) {
            for (Index i = 0; i < dim; ++i) s.weights(i) = 0.5 + unit(rng);
        } else {
            for (const auto& block : s.filtration.chain.back()) {
                const double w = 0.5 + unit(rng);
                for (Index i : block) s.weights(i) = w;
            }
        }
        s.weights /= s.weights.sum();
        break;
    }
    }
    s.seed = rng();
    return s;
}

Instance generate_instance(const InstanceSpec& spec) {
    if (spec.dim < 1 || spec.dim > kMaxDim) {
        throw Error("generate_instance: dimension " + std::to_string(spec.dim) + " exceeds cap " +
                    std::to_string(kMaxDim));
    }
    if (spec.weights.size() != spec.dim) throw Error("generate_instance: weight vector length mismatch");
    Instance inst;
    inst.dim = spec.dim;
    inst.weights = spec.weights;
    inst.descriptor = spec.filtration;
    inst.filtration = build_filtration(TracialAlgebra(spec.weights), spec.filtration);
    inst.spec = spec;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix seed = gaussian_matrix(rng, spec.dim);
    for (Index i = 0; i < spec.dim; ++i) seed.row(i) *= std::exp(spec.generator.spread * g(rng));
    seed = inst.filtration->top().expectation(seed);
    Matrix x;
    switch (spec.generator.kind) {
    case GeneratorKind::Positive: x = seed.adjoint() * seed; break;
    case GeneratorKind::SelfAdjoint: x = (seed + seed.adjoint()) / 2.0; break;
    case GeneratorKind::General: x = seed; break;
    }
    if (spec.generator.kind != GeneratorKind::General) x = (x + x.adjoint()) / 2.0;
    const double nrm = op_norm(x);
    if (nrm > 0.0) x *= spec.generator.spectral_scale / nrm;
    if (spec.generator.normalize) {
        const double l1 = lp_norm(x, 1.0, spec.weights);
        if (l1 > 0.0) x /= l1;
    }
    inst.final_element = x;
    return inst;
}

// ---------------------------------------------------------------------------
// JSON

json matrix_to_json(const Matrix& m) {
    json re = json::array();
    json im = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ii = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ii.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const Index rows = static_cast<Index>(re.size());
    if (static_cast<Index>(im.size()) != rows) throw Error("matrix_from_json: re/im row mismatch");
    const Index cols = rows == 0 ? 0 : static_cast<Index>(re.at(0).size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(re.at(i).size()) != cols || static_cast<Index>(im.at(i).size()) != cols) {
            throw Error("matrix_from_json: ragged rows");
        }
        for (Index k = 0; k < cols; ++k) {
            m(i, k) = Complex(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
        }
    }
    return m;
}

namespace {

json descriptor_to_json(const FiltrationDescriptor& d) {
    json j;
    j["kind"] = to_string(d.kind);
    switch (d.kind) {
    case FiltrationDescriptor::Kind::TensorDyadic: j["levels"] = d.levels; break;
    case FiltrationDescriptor::Kind::PartitionChain:
        j["mode"] = d.mode == PartitionMode::Commutative ? "commutative" : "pinching";
        j["chain"] = d.chain;
        break;
    case FiltrationDescriptor::Kind::ExplicitBases: {
        json levels = json::array();
        for (const auto& set : d.spanning_sets) {
            json l = json::array();
            for (const auto& m : set) l.push_back(matrix_to_json(m));
            levels.push_back(std::move(l));
        }
        j["levels"] = std::move(levels);
        break;
    }
    }
    return j;
}

FiltrationDescriptor descriptor_from_json(const json& j) {
    FiltrationDescriptor d;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tensor_dyadic") {
        d.kind = FiltrationDescriptor::Kind::TensorDyadic;
        d.levels = j.at("levels").get<unsigned>();
    } else if (kind == "partition_chain") {
        d.kind = FiltrationDescriptor::Kind::PartitionChain;
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "commutative") {
            d.mode = PartitionMode::Commutative;
        } else if (mode == "pinching") {
            d.mode = PartitionMode::Pinching;
        } else {
            throw Error("filtration descriptor: unknown partition mode '" + mode + "'");
        }
        d.chain = j.at("chain").get<std::vector<Partition>>();
    } else if (kind == "explicit_bases") {
        d.kind = FiltrationDescriptor::Kind::ExplicitBases;
        for (const auto& level : j.at("levels")) {
            std::vector<Matrix> set;
            for (const auto& m : level) set.push_back(matrix_from_json(m));
            d.spanning_sets.push_back(std::move(set));
        }
    } else {
        throw Error("filtration descriptor: unknown kind '" + kind + "'");
    }
    return d;
}

} // namespace

json instance_to_json(const Instance& inst) {
    json j;
    j["dim"] = inst.dim;
    j["trace_weights"] = std::vector<double>(inst.weights.data(), inst.weights.data() + inst.weights.size());
    j["filtration"] = descriptor_to_json(inst.descriptor);
    j["final_element"] = matrix_to_json(inst.final_element);
    if (inst.spec) {
        j["generator"] = {{"kind", to_string(inst.spec->generator.kind)},
                          {"seed", inst.spec->seed},
                          {"spread", inst.spec->generator.spread},
                          {"spectral_scale", inst.spec->generator.spectral_scale},
                          {"normalize", inst.spec->generator.normalize}};
    }
    return j;
}

Instance instance_from_json(const json& j) {
    Instance inst;
    try {
        inst.dim = j.at("dim").get<Index>();
        if (inst.dim < 1 || inst.dim > kMaxDim) {
            throw Error("instance: dimension " + std::to_string(inst.dim) + " outside [1, " +
                        std::to_string(kMaxDim) + "]");
        }
        const auto w = j.at("trace_weights").get<std::vector<double>>();
        if (static_cast<Index>(w.size()) != inst.dim) throw Error("instance: trace_weights length mismatch");
        inst.weights = Eigen::Map<const RealVector>(w.data(), static_cast<Index>(w.size()));
        inst.descriptor = descriptor_from_json(j.at("filtration"));
        inst.final_element = matrix_from_json(j.at("final_element"));
        if (j.contains("generator")) {
            const json& g = j.at("generator");
            InstanceSpec spec;
            spec.dim = inst.dim;
            spec.weights = inst.weights;
            spec.filtration = inst.descriptor;
            spec.generator.kind = generator_kind_from_string(g.at("kind").get<std::string>());
            spec.generator.spread = g.at("spread").get<double>();
            spec.generator.spectral_scale = g.at("spectral_scale").get<double>();
            spec.generator.normalize = g.at("normalize").get<bool>();
            spec.seed = g.at("seed").get<std::uint64_t>();
            inst.spec = spec;
        }
    } catch (const json::exception& e) {
        throw Error(std::string("instance: malformed JSON: ") + e.what());
    }
    if (inst.final_element.rows() != inst.dim || inst.final_element.cols() != inst.dim) {
        throw Error("instance: final_element shape does not match dim");
    }
    inst.filtration = build_filtration(TracialAlgebra(inst.weights), inst.descriptor);
    return inst;
}

// ---------------------------------------------------------------------------
// Reports

json CheckReport::to_json() const {
    json j;
    j["check"] = check;
    j["anchor"] = anchor;
    j["measured"] = measured;
    j["allowed"] = allowed;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["fingerprint"] = fingerprint;
    return j;
}

CheckReport make_report(std::string check, std::string anchor, double measured, double allowed,
                        double tolerance, json fingerprint) {
    CheckReport r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.measured = measured;
    r.allowed = allowed;
    r.tolerance = tolerance;
    r.pass = std::isfinite(measured) && measured <= allowed + tolerance;
    r.fingerprint = std::move(fingerprint);
    return r;
}

namespace {

json with_lambda(const json& fp, double lambda) {
    json j = fp;
    j["lambda"] = lambda;
    return j;
}

double martingale_residual(const Filtration& f, const DifferenceSequence& d) {
    double worst = difference_defect(f, d);
    for (std::size_t k = 1; k <= d.size(); ++k) {
        worst = std::max(worst, op_norm(f.expectation(k, d(k)) - d(k)));
    }
    return worst;
}

} // namespace

std::vector<CheckReport> cuculescu_checks(const Martingale& x, const CuculescuSequence& c, double tol,
                                          double bound_tol, const json& fingerprint) {
    const json fp = with_lambda(fingerprint, c.lambda);
    const CuculescuDefects d = measure_cuculescu(x, c);
    const RandriEstimates r = randri_estimates(x, c);
    const double xn = r.x_norm1;
    std::vector<CheckReport> out;
    out.push_back(make_report("cuculescu.decreasing", "threshold projections decrease", d.decreasing,
                              0.0, tol, fp));
    out.push_back(make_report("cuculescu.adapted", "threshold projections are adapted",
                              d.adaptedness, 0.0, tol, fp));
    out.push_back(make_report("cuculescu.commutation",
                              "q_k commutes with the compression of x_k by q_{k-1}", d.commutation,
                              0.0, tol, fp));
    out.push_back(make_report("cuculescu.compression", "compressed terms bounded by lambda",
                              d.max_compression_norm, c.lambda, tol, fp));
    out.push_back(make_report("cuculescu.mass", "lambda tau(1-q) <= |x|_1", d.lambda_mass,
                              bounds::kCuculescuMass * xn, tol, fp));
    out.push_back(make_report("randri.compressed_terms", "sum of compressed term jumps <= 1|x|_1",
                              r.compressed_terms, bounds::kCompressedTerms * xn, bound_tol, fp));
    out.push_back(make_report("randri.compressed_previous",
                              "sum of compressed previous-term jumps <= 2|x|_1",
                              r.compressed_previous, bounds::kCompressedPrevious * xn, bound_tol, fp));
    out.push_back(make_report("randri.compressed_differences",
                              "sum of compressed difference jumps <= 3|x|_1",
                              r.compressed_differences, bounds::kCompressedDifferences * xn,
                              bound_tol, fp));
    out.push_back(make_report("randri.identity", "telescoping identity for compressed differences",
                              r.identity_residual, 0.0, tol, fp));
    out.push_back(make_report("randri.compressed_sum", "|sum of compressed differences|_1 <= 2|x|_1",
                              r.compressed_sum, bounds::kCompressedSum * xn, bound_tol, fp));
    return out;
}

std::vector<CheckReport> decomposition_checks(const FourPartDecomposition& d, double tol,
                                              double bound_tol, const json& fingerprint) {
    const DecompositionMeasurements& m = d.measured;
    const bool gundy = d.variant == DecompositionVariant::Gundy;
    const std::string prefix = std::string(to_string(d.variant)) + (d.reduced ? ".reduced." : ".");
    const double factor = d.reduced ? bounds::kReducedFactor : 1.0;
    const double xn = m.x_norm1;
    const double lam = d.lambda;
    const double rtol = tol * std::max(1.0, m.scale);
    const double btol = bound_tol * std::max(1.0, m.scale);
    json fp = with_lambda(fingerprint, lam);
    fp["variant"] = to_string(d.variant);
    fp["reduced"] = d.reduced;
    std::vector<CheckReport> out;
    auto add = [&](const std::string& name, const std::string& anchor, double measured,
                   double allowed, double t) {
        out.push_back(make_report(prefix + name, anchor, measured, allowed, t, fp));
    };
    add("reconstruction", "x = alpha + beta + gamma + upsilon", m.reconstruction, 0.0, rtol);
    add("martingale_residual", "every part is a martingale difference sequence",
        m.difference_residual, 0.0, rtol);
    add("gamma_witness", "right support of d gamma_k avoids the witness", m.gamma_witness, 0.0, rtol);
    add("upsilon_witness", "left support of d upsilon_k avoids the witness", m.upsilon_witness, 0.0,
        rtol);
    add("beta_variation", "sum |d beta_k|_1 <= 7|x|_1", m.beta_variation,
        factor * bounds::kBetaVariation * xn, btol);
    add("gamma_support_mass", "lambda tau(join supp|d gamma_k|) <= 10|x|_1", m.gamma_support_mass,
        factor * bounds::kSupportMass * xn, btol);
    add("upsilon_support_mass", "lambda tau(join supp|d upsilon_k^*|) <= 10|x|_1",
        m.upsilon_support_mass, factor * bounds::kSupportMass * xn, btol);
    if (gundy) {
        add("first_terms", "alpha_1 = 0, beta_1 = x_1, gamma_1 = upsilon_1 = 0", m.first_terms, 0.0,
            rtol);
        add("alpha_l1", "|alpha|_1 <= 18|x|_1", m.alpha_l1, factor * bounds::kAlphaL1 * xn, btol);
        add("alpha_l2_squared", "|alpha|_2^2 <= 72 lambda |x|_1", m.alpha_l2_squared,
            factor * bounds::kAlphaL2Squared * lam * xn, btol);
        add("alpha_linf", "|alpha|_inf <= 4 lambda", m.alpha_linf,
            factor * bounds::kAlphaLinf * lam, btol);
        if (m.y_norm1) {
            add("y_l1", "|y|_1 <= 9|x|_1", *m.y_norm1, bounds::kIntermediateL1 * xn, btol);
        }
        if (m.y_increment_sup) {
            add("y_increment", "sup_k |dy_k|_inf <= 2 lambda", *m.y_increment_sup,
                bounds::kIntermediateIncrement * lam, btol);
        }
    } else {
        add("alpha_l2_squared", "|alpha'_n|_2^2 <= 24 lambda |x|_1", m.alpha_l2_squared,
            factor * bounds::kBurkholderAlphaL2Squared * lam * xn, btol);
    }
    return out;
}

std::vector<CheckReport> three_part_checks(const ThreePartDecomposition& t, bool reduced, double tol,
                                           double bound_tol, const json& fingerprint) {
    const std::string prefix = reduced ? "threepart.reduced." : "threepart.";
    const double factor = reduced ? bounds::kReducedFactor : 1.0;
    double scale = 0.0;
    for (std::size_t k = 1; k <= t.a.length(); ++k) {
        scale = std::max(scale, op_norm(t.a.difference(k) + t.b.difference(k) + t.c.difference(k)));
    }
    const double rtol = tol * std::max(1.0, scale);
    json fp = with_lambda(fingerprint, t.lambda);
    fp["reduced"] = reduced;
    std::vector<CheckReport> out;
    out.push_back(make_report(prefix + "reconstruction", "x = a + b + c", t.reconstruction, 0.0,
                              rtol, fp));
    out.push_back(make_report(prefix + "martingale_residual",
                              "every part is a martingale difference sequence",
                              t.difference_residual, 0.0, rtol, fp));
    out.push_back(make_report(prefix + "witness", "r_k dc_k r_k = 0", t.witness_residual, 0.0,
                              rtol, fp));
    out.push_back(make_report(prefix + "support_mass", "lambda tau(1 - meet r_k) <= 20|x|_1",
                              t.support_mass,
                              factor * bounds::kThreePartSupportMass * t.x_norm1,
                              bound_tol * std::max(1.0, scale), fp));
    return out;
}

std::vector<CheckReport> burkholder_sq_checks(const Martingale& x, unsigned m, double tol,
                                              double bound_tol, const json& fingerprint) {
    const double lambda = std::ldexp(1.0, static_cast<int>(m));
    json fp = with_lambda(fingerprint, lambda);
    fp["m"] = m;
    const RealVector& w = x.algebra().weights();
    const Filtration& f = *x.filtration();
    const double xn = x.norm(1.0);
    const double rtol = tol * std::max(1.0, x.difference_scale());

    const ScaleProjectionFamily family = scale_projections(x, m, tol);
    const FamilyDefects fd = measure_family(family);
    const YZSplit split = burkholder_yz(x, family);
    double recon = 0.0;
    for (std::size_t k = 1; k <= x.length(); ++k) {
        recon = std::max(recon, op_norm(split.dy(k) + split.dz(k) - x.difference(k)));
    }
    const FourPartDecomposition b = burkholder_decompose(x, lambda, tol);
    const TruncationReductionReport red = truncation_reduction(x, family, split);
    const double weak = weak_l1(square_function_column(split.dy), w) +
                        weak_l1(square_function_row(split.dz), w);

    std::vector<CheckReport> out;
    out.push_back(make_report("burkholder_sq.disjointness", "scale projections are disjoint",
                              fd.disjointness, 0.0, tol, fp));
    out.push_back(make_report("burkholder_sq.partition", "scale projections sum to 1",
                              fd.partition, 0.0, tol, fp));
    out.push_back(make_report("burkholder_sq.reconstruction", "dy + dz = dx", recon, 0.0, rtol, fp));
    out.push_back(make_report("burkholder_sq.y_difference", "dy is a martingale difference",
                              martingale_residual(f, split.dy), 0.0, rtol, fp));
    out.push_back(make_report("burkholder_sq.z_difference", "dz is a martingale difference",
                              martingale_residual(f, split.dz), 0.0, rtol, fp));
    out.push_back(make_report("burkholder_sq.cancellation",
                              "truncation kills d gamma' + d upsilon' at lambda = 2^m",
                              cancellation_residual(b, family), 0.0, rtol, fp));
    out.push_back(make_report("burkholder_sq.reduction",
                              "truncated square function controls S_C(y) with additive 4",
                              red.lhs, red.rhs, bound_tol, fp));
    out.push_back(make_report("burkholder_sq.weak_type",
                              "measured: weak-L1 of S_C(y) plus S_R(z) over |x|_1",
                              xn > 0 ? weak / xn : 0.0, bounds::kMeasurementCap, 0.0, fp));
    out.push_back(make_report("burkholder_sq.main_ratio",
                              "measured: 2^m tau(S_C(y) > 2^m) over |x|_1", red.main_ratio,
                              bounds::kMeasurementCap, 0.0, fp));
    return out;
}

// ---------------------------------------------------------------------------
// Campaigns

bool CampaignResult::all_pass() const {
    if (!errors.empty()) return false;
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

std::string CampaignResult::report_lines() const {
    std::string out;
    for (const auto& r : reports) {
        out += r.to_json().dump();
        out += '\n';
    }
    return out;
}

json CampaignResult::summary_json() const {
    json j = json::object();
    for (const auto& [name, s] : summary) {
        j[name] = {{"count", s.count},
                   {"failures", s.failures},
                   {"worst_measured", s.worst_measured},
                   {"worst_ratio", s.worst_ratio}};
    }
    json out;
    out["checks"] = std::move(j);
    out["errors"] = errors;
    out["pass"] = all_pass();
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{
        "spectral",  "algebra",   "norms",      "martingale",    "cuculescu", "gundy",
        "burkholder", "threepart", "transform", "truncation",   "burkholder_sq", "colacunary"};
    return names;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(Index n) {
    unsigned k = 0;
    while ((Index{1} << k) < n) ++k;
    return k;
}

struct TrialContext {
    const CampaignConfig& config;
    std::string suite;
    std::uint64_t trial;
    std::uint64_t seed;
    std::mt19937_64 rng;
    Index dim;
    json fingerprint;

    TrialContext(const CampaignConfig& c, std::string s, std::uint64_t t)
        : config(c), suite(std::move(s)), trial(t), seed(trial_seed(c.seed, suite, t)), rng(seed),
          dim(c.dims.at(t % c.dims.size())) {
        fingerprint = {{"suite", suite}, {"trial", trial}, {"seed", seed}, {"dim", dim}};
    }

    FiltrationFamily family() const {
        const auto f = static_cast<FiltrationFamily>((trial / config.dims.size()) % 3);
        if (f == FiltrationFamily::Dyadic && !is_power_of_two(dim)) return FiltrationFamily::Commutative;
        if (f == FiltrationFamily::Dyadic && dim < 2) return FiltrationFamily::Commutative;
        return f;
    }

    Instance instance(GeneratorKind kind) {
        const FiltrationFamily fam = family();
        unsigned levels = 0;
        if (fam == FiltrationFamily::Dyadic) {
            levels = log2_exact(dim);
        } else if (config.levels > 0) {
            levels = std::min<unsigned>(config.levels, static_cast<unsigned>(dim));
        } else {
            levels = std::min<unsigned>(3 + static_cast<unsigned>(rng() % 3), static_cast<unsigned>(dim));
        }
        const InstanceSpec spec = random_spec(rng, fam, dim, levels, kind);
        fingerprint["family"] = to_string(fam);
        fingerprint["levels"] = levels;
        fingerprint["generator"] = to_string(kind);
        fingerprint["instance_seed"] = spec.seed;
        return generate_instance(spec);
    }

    GeneratorKind mostly_positive() {
        const auto r = rng() % 3;
        if (r == 0) return (rng() % 2) ? GeneratorKind::SelfAdjoint : GeneratorKind::General;
        return GeneratorKind::Positive;
    }

    CheckReport report(const std::string& check, const std::string& anchor, double measured,
                       double allowed, double tol) const {
        return make_report(check, anchor, measured, allowed, tol, fingerprint);
    }
};

using Reports = std::vector<CheckReport>;

void append(Reports& out, Reports more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

Matrix random_subspace_basis(std::mt19937_64& rng, Index n, Index r) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, n));
    return qr.householderQ() * Matrix::Identity(n, r);
}

RealVector random_weights(std::mt19937_64& rng, Index n) {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    RealVector w(n);
    for (Index i = 0; i < n; ++i) w(i) = u(rng);
    return w / w.sum();
}

Reports suite_spectral(TrialContext& c) {
    Reports out;
    const Index n = c.dim;
    const double tol = c.config.tol;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Matrix g = gaussian_matrix(c.rng, n);
    const Matrix a = (g + g.adjoint()) / 2.0;
    const double t = u(c.rng) * op_norm(a);
    const Projection p = spectral_projection(a, Interval::closed(-t, t));
    out.push_back(c.report("spectral.projection", "spectral projections are projections",
                           projection_defect(p.matrix()), 0.0, tol));
    out.push_back(c.report("spectral.commutes", "spectral projections commute with the operator",
                           op_norm(a * p.matrix() - p.matrix() * a), 0.0, tol * std::max(1.0, op_norm(a))));
    const Projection lo = spectral_projection(a, Interval::below(t));
    const Projection hi = spectral_projection(a, Interval::at_or_above(t));
    out.push_back(c.report("spectral.partition", "complementary intervals give complementary projections",
                           op_norm(lo.matrix() + hi.matrix() - Matrix::Identity(n, n)), 0.0, tol));

    const Index r = 1 + static_cast<Index>(c.rng() % static_cast<std::uint64_t>(n));
    const Matrix x = gaussian_matrix(c.rng, n).leftCols(r) * gaussian_matrix(c.rng, n).topRows(r);
    const Projection s = support(x);
    const Projection ls = left_support(x);
    out.push_back(c.report("spectral.support", "x supp|x| = x and supp|x*| x = x",
                           std::max(op_norm(x * s.matrix() - x), op_norm(ls.matrix() * x - x)), 0.0,
                           tol * std::max(1.0, op_norm(x))));
    out.push_back(c.report("spectral.support_rank", "support rank equals numerical rank",
                           std::abs(static_cast<double>(s.rank() - r)) +
                               std::abs(static_cast<double>(ls.rank() - r)),
                           0.0, 0.0));

    const Index shared = static_cast<Index>(c.rng() % static_cast<std::uint64_t>(n / 2 + 1));
    const Index extra = (n - shared) / 2 > 0 ? static_cast<Index>(c.rng() % static_cast<std::uint64_t>((n - shared) / 2 + 1)) : 0;
    const Matrix basis = random_subspace_basis(c.rng, n, shared + 2 * extra);
    const Projection common(basis.leftCols(shared));
    const Projection pp(basis.leftCols(shared + extra));
    Matrix qb(n, shared + extra);
    qb << basis.leftCols(shared), basis.rightCols(extra);
    const Projection qq(qb);
    const Projection meet = proj_meet(pp, qq);
    const Projection join = proj_join(pp, qq);
    const Projection all(basis);
    out.push_back(c.report("spectral.meet", "meet is the intersection of ranges",
                           op_norm(meet.matrix() - common.matrix()), 0.0, 1e-8));
    out.push_back(c.report("spectral.join", "join is the span of ranges",
                           op_norm(join.matrix() - all.matrix()), 0.0, 1e-8));
    out.push_back(c.report("spectral.de_morgan", "1 - (p meet q) = (1-p) join (1-q)",
                           op_norm(meet.complement().matrix() -
                                   proj_join(pp.complement(), qq.complement()).matrix()),
                           0.0, 1e-8));

    const Matrix psd = g.adjoint() * g;
    const Matrix root = psd_sqrt(psd);
    out.push_back(c.report("spectral.sqrt", "psd_sqrt(a)^2 = a", op_norm(root * root - psd), 0.0,
                           tol * std::max(1.0, op_norm(psd))));
    const Matrix ax = abs(g);
    out.push_back(c.report("spectral.abs", "|x|^2 = x* x", op_norm(ax * ax - g.adjoint() * g), 0.0,
                           tol * std::max(1.0, op_norm(g.adjoint() * g))));
    const JordanParts jp = jordan_parts(a);
    out.push_back(c.report("spectral.jordan", "a = a+ - a- with a+ a- = 0",
                           op_norm(jp.plus - jp.minus - a) + op_norm(jp.plus * jp.minus), 0.0,
                           tol * std::max(1.0, op_norm(a) * op_norm(a))));
    return out;
}

Reports suite_algebra(TrialContext& c) {
    Reports out;
    const Instance inst = c.instance(GeneratorKind::General);
    const Filtration& f = *inst.filtration;
    const TracialAlgebra& alg = f.algebra();
    const double tol = c.config.tol;
    const Index n = c.dim;
    const Matrix y = gaussian_matrix(c.rng, n);
    const double ys = op_norm(y);
    for (std::size_t k = 1; k <= f.length(); ++k) {
        const Subalgebra& s = f.level(k);
        const Matrix ey = s.expectation(y);
        const std::string lvl = std::to_string(k);
        out.push_back(c.report("algebra.idempotent", "E(E(y)) = E(y)",
                               op_norm(s.expectation(ey) - ey), 0.0, tol * ys));
        out.push_back(c.report("algebra.basis_route", "closed form agrees with orthonormal basis route",
                               op_norm(ey - s.expectation_by_basis(y)), 0.0, tol * ys));
        out.push_back(c.report("algebra.trace_preserving", "tau(E(y)) = tau(y)",
                               std::abs(alg.trace(ey) - alg.trace(y)), 0.0, tol * ys));
        const Matrix a = s.expectation(gaussian_matrix(c.rng, n));
        const Matrix b = s.expectation(gaussian_matrix(c.rng, n));
        out.push_back(c.report("algebra.bimodule", "E(a y b) = a E(y) b",
                               op_norm(s.expectation(a * y * b) - a * ey * b), 0.0,
                               tol * ys * op_norm(a) * op_norm(b)));
        const Matrix pos = s.expectation(y.adjoint() * y);
        Eigen::SelfAdjointEigenSolver<Matrix> es((pos + pos.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        out.push_back(c.report("algebra.positive", "E maps positives to positives",
                               std::max(0.0, -es.eigenvalues().minCoeff()), 0.0, tol * ys * ys));
        for (std::size_t j = 1; j < k; ++j) {
            out.push_back(c.report("algebra.tower", "E_j E_k = E_j for j < k",
                                   op_norm(f.expectation(j, ey) - f.expectation(j, y)), 0.0, tol * ys));
        }
        if (s.dimension() <= 16) {
            out.push_back(c.report("algebra.invariants", "basis is orthonormal, unital, *-closed and closed",
                                   s.measure_invariants().max(), 0.0, tol));
        }
    }
    return out;
}

Reports suite_norms(TrialContext& c) {
    Reports out;
    const Index n = c.dim;
    const RealVector w = random_weights(c.rng, n);
    const Matrix x1 = gaussian_matrix(c.rng, n);
    Matrix x2 = gaussian_matrix(c.rng, n);
    if (c.rng() % 2) x2 = -x1 + 0.1 * x2;  // near-cancelling pair
    const double scale = op_norm(x1 + x2) + op_norm(x1) + op_norm(x2);
    for (int g = 0; g < 10; ++g) {
        const double lambda = scale * std::pow(10.0, -2.0 + 2.3 * g / 9.0);
        const QuasiTriangleReport q = check_quasi_triangle(x1, x2, lambda, w);
        json fp = with_lambda(c.fingerprint, lambda);
        out.push_back(make_report("norms.quasi_triangle",
                                  "lambda tau(|x1+x2| > lambda) <= 2 lambda tau(|x1| > lambda/2) + 2 lambda tau(|x2| > lambda/2)",
                                  q.lhs, q.rhs, c.config.bound_tol, fp));
    }
    const SingularProfile prof = singular_profile(x1, w);
    const double weak = weak_l1(prof);
    out.push_back(c.report("norms.weak_distribution", "weak-L1 from mu equals sup of distribution",
                           std::abs(weak - DistributionFunction(prof).weak_l1_sup()), 0.0,
                           1e-12 * std::max(1.0, weak)));
    const double l1 = lp_norm(prof, 1.0);
    out.push_back(c.report("norms.weak_below_l1", "weak-L1 <= L1", weak, l1, 1e-12 * std::max(1.0, l1)));
    const double l2 = lp_norm(prof, 2.0);
    out.push_back(c.report("norms.holder", "|x|_1 <= |x|_2 tau(1)^(1/2)", l1, l2 * std::sqrt(w.sum()),
                           1e-12 * std::max(1.0, l1)));
    out.push_back(c.report("norms.l1_plus_m", "L1+M norm equals L1 norm when tau(1) = 1",
                           std::abs(sum_norm_l1_plus_m(x1, w) - l1), 0.0, 1e-10 * std::max(1.0, l1)));
    out.push_back(c.report("norms.profile_mass", "distribution mass equals trace of spectral projection",
                           std::abs(prof.mass_above(weak / std::max(l1, 1e-300)) -
                                    spectral_projection(abs(x1), Interval::above(weak / std::max(l1, 1e-300)))
                                        .trace(w)),
                           0.0, 1e-9));
    return out;
}

Reports suite_martingale(TrialContext& c) {
    Reports out;
    const GeneratorKind kind = static_cast<GeneratorKind>(c.rng() % 3);
    const Instance inst = c.instance(kind);
    const Martingale x = inst.martingale();
    const RealVector& w = x.algebra().weights();
    const double tol = c.config.tol;
    const double scale = std::max(1.0, op_norm(inst.final_element));
    out.push_back(c.report("martingale.invariants", "adapted, E_m(x_n) = x_m, E_{k-1}(dx_k) = 0",
                           measure_martingale(x).max(), 0.0, tol * scale));
    for (double p : {1.0, 2.0, kInfinity}) {
        double worst = 0.0;
        for (std::size_t m = 1; m < x.length(); ++m) {
            worst = std::max(worst, lp_norm(x.term(m), p, w) - lp_norm(x.last(), p, w));
        }
        out.push_back(c.report("martingale.contractive", "|x_m|_p <= |x_n|_p", worst, 0.0, tol * scale));
    }
    const DifferenceSequence d = x.differences();
    const Matrix sc = square_function_column(d);
    const Matrix sr = square_function_row(d);
    const double l2sq = std::pow(lp_norm(x.last(), 2.0, w), 2);
    out.push_back(c.report("martingale.pythagoras_column", "tau(S_C^2) = |x_n|_2^2",
                           std::abs(x.algebra().trace(sc * sc).real() - l2sq), 0.0, tol * scale * scale));
    out.push_back(c.report("martingale.pythagoras_row", "tau(S_R^2) = |x_n|_2^2",
                           std::abs(x.algebra().trace(sr * sr).real() - l2sq), 0.0, tol * scale * scale));
    double inc = 0.0;
    for (std::size_t k = 2; k <= d.size(); ++k) {
        const Matrix a = square_function_column(d, k);
        const Matrix b = square_function_column(d, k - 1);
        inc = std::max(inc, op_norm(a * a - b * b - d(k).adjoint() * d(k)));
    }
    out.push_back(c.report("martingale.square_increment", "S_{C,n}^2 - S_{C,n-1}^2 = |dx_n|^2", inc,
                           0.0, tol * scale * scale));
    if (kind != GeneratorKind::General) {
        const auto [wp, zm] = krickeberg(x, tol);
        out.push_back(c.report("martingale.krickeberg_trace", "tau(w_1 + z_1) = |x|_1",
                               std::abs(x.algebra().trace(wp.term(1) + zm.term(1)).real() - x.norm(1.0)),
                               0.0, tol * scale));
        out.push_back(c.report("martingale.krickeberg_split", "x_n = w_n - z_n",
                               op_norm(x.last() - (wp.last() - zm.last())), 0.0, tol * scale));
    }
    return out;
}

Reports suite_cuculescu(TrialContext& c) {
    Reports out;
    const GeneratorKind kind = (c.rng() % 2) ? GeneratorKind::Positive : GeneratorKind::SelfAdjoint;
    const Instance inst = c.instance(kind);
    const Martingale x = inst.martingale();
    for (double lambda : trial_lambdas(c.rng, x)) {
        append(out, cuculescu_checks(x, cuculescu(x, lambda, c.config.tol), c.config.tol,
                                     c.config.bound_tol, c.fingerprint));
    }
    return out;
}

Reports suite_decomposition(TrialContext& c, DecompositionVariant v) {
    Reports out;
    const Instance inst = c.instance(c.mostly_positive());
    const Martingale x = inst.martingale();
    for (double lambda : trial_lambdas(c.rng, x)) {
        const FourPartDecomposition d = v == DecompositionVariant::Gundy
                                            ? gundy_decompose(x, lambda, c.config.tol)
                                            : burkholder_decompose(x, lambda, c.config.tol);
        append(out, decomposition_checks(d, c.config.tol, c.config.bound_tol, c.fingerprint));
    }
    return out;
}

Reports suite_threepart(TrialContext& c) {
    Reports out;
    const Instance inst = c.instance(c.mostly_positive());
    const Martingale x = inst.martingale();
    const bool reduced = !is_positive_martingale(x, c.config.tol);
    for (double lambda : trial_lambdas(c.rng, x)) {
        append(out, three_part_checks(three_part(x, lambda, c.config.tol), reduced, c.config.tol,
                                      c.config.bound_tol, c.fingerprint));
    }
    return out;
}

/// Predictable multipliers valid for the filtration family of the instance.
std::vector<Matrix> random_predictable(std::mt19937_64& rng, const Instance& inst) {
    const Filtration& f = *inst.filtration;
    const Index n = inst.dim;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> mod(0.0, 1.0);
    auto unit_scalar = [&]() {
        if (rng() % 2) return Complex((rng() % 2) ? 1.0 : -1.0, 0.0);
        return mod(rng) * std::polar(1.0, phase(rng));
    };
    std::vector<Matrix> xi;
    xi.push_back(Matrix::Identity(n, n));
    for (std::size_t k = 2; k <= f.length(); ++k) {
        const Subalgebra& next = f.level(k);
        const Subalgebra& prev = f.level(k - 1);
        Matrix m = Matrix::Zero(n, n);
        if (inst.descriptor.kind == FiltrationDescriptor::Kind::PartitionChain &&
            inst.descriptor.mode == PartitionMode::Commutative) {
            for (const auto& block : prev.blocks()) {
                const Complex v = unit_scalar();
                for (Index i : block) m(i, i) = v;
            }
        } else if (inst.descriptor.kind == FiltrationDescriptor::Kind::PartitionChain) {
            for (const auto& block : next.blocks()) {
                const Complex v = unit_scalar();
                for (Index i : block) m(i, i) = v;
            }
        } else {
            m = Matrix::Identity(n, n) * unit_scalar();
        }
        xi.push_back(std::move(m));
    }
    return xi;
}

Reports suite_transform(TrialContext& c) {
    Reports out;
    const Instance inst = c.instance(static_cast<GeneratorKind>(c.rng() % 3));
    const Martingale x = inst.martingale();
    const std::vector<Matrix> xi = random_predictable(c.rng, inst);
    const TransformResult t = martingale_transform(x, xi, c.config.tol);
    const double scale = std::max(1.0, op_norm(inst.final_element));
    out.push_back(c.report("transform.martingale", "transform is a martingale",
                           measure_martingale(t.martingale).max(), 0.0, c.config.tol * scale));
    const double xn = x.norm(1.0);
    out.push_back(c.report("transform.weak_type", "measured: weak-L1 of the transform over |x|_1",
                           weak_l1(t.partial_sums.back(), x.algebra().weights()) / xn,
                           bounds::kMeasurementCap, 0.0));
    return out;
}

Reports suite_truncation(TrialContext& c) {
    Reports out;
    const Index n = c.dim;
    const RealVector w = RealVector::Constant(n, 1.0 / static_cast<double>(n));
    const std::size_t terms = 3 + c.rng() % 3;
    DifferenceSequence t;
    double total = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
        const Matrix u = random_subspace_basis(c.rng, n, n);
        const std::size_t groups = 1 + c.rng() % std::min<std::uint64_t>(4, static_cast<std::uint64_t>(n));
        std::vector<Index> cuts;
        for (std::size_t g = 1; g < groups; ++g) cuts.push_back(static_cast<Index>(c.rng() % static_cast<std::uint64_t>(n)));
        cuts.push_back(0);
        cuts.push_back(n);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<Projection> fam;
        for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
            fam.emplace_back(Matrix(u.middleCols(cuts[g], cuts[g + 1] - cuts[g])));
        }
        Matrix x = gaussian_matrix(c.rng, n);
        x /= lp_norm(x, 1.0, w);
        total += 1.0;
        const Matrix tx = triangular_truncation(x, fam);
        const double xs = op_norm(x);
        out.push_back(c.report("truncation.idempotent", "T(T(x)) = T(x) on a complete family",
                               op_norm(triangular_truncation(tx, fam) - tx), 0.0, 1e-12 * std::max(1.0, xs)));
        const Matrix y = gaussian_matrix(c.rng, n);
        out.push_back(c.report("truncation.linear", "T(x + y) = T(x) + T(y)",
                               op_norm(triangular_truncation(x + y, fam) - tx - triangular_truncation(y, fam)),
                               0.0, 1e-12 * std::max(1.0, xs + op_norm(y))));
        t.terms.push_back(tx);
    }
    out.push_back(c.report("truncation.weak_type",
                           "measured: weak-L1 of the truncated column square function over sum |x_k|_1",
                           weak_l1(square_function_column(t), w) / total, bounds::kMeasurementCap, 0.0));
    return out;
}

Reports suite_burkholder_sq(TrialContext& c) {
    const Instance inst = c.instance(GeneratorKind::Positive);
    const Martingale x = inst.martingale();
    const unsigned m = static_cast<unsigned>(c.rng() % 4);
    return burkholder_sq_checks(x, m, c.config.tol, c.config.bound_tol, c.fingerprint);
}

Reports suite_colacunary(TrialContext& c) {
    Reports out;
    const Instance inst = c.instance(static_cast<GeneratorKind>(c.rng() % 3));
    const Martingale x = inst.martingale();
    const RealVector& w = x.algebra().weights();
    const DifferenceSequence d = x.differences();
    ColacunaryOptions opt;
    opt.trials = 4;
    opt.descent_steps = 15;
    opt.seed = c.rng();
    const ColacunaryEstimate e = colacunary_estimate(d, w, opt);
    double smallest = kInfinity;
    for (const auto& dk : d.terms) smallest = std::min(smallest, lp_norm(dk, 1.0, w));
    out.push_back(c.report("colacunary.below_unit_vectors", "estimate <= min_k |d_k|_1", e.delta,
                           smallest, 1e-12 * std::max(1.0, smallest)));
    DifferenceSequence doubled;
    for (const auto& dk : d.terms) doubled.terms.push_back(2.0 * dk);
    const ColacunaryEstimate e2 = colacunary_estimate(doubled, w, opt);
    out.push_back(c.report("colacunary.homogeneous", "estimate scales with the sequence",
                           std::abs(e2.delta - 2.0 * e.delta), 0.0, 1e-9 * std::max(1.0, e.delta)));
    double wn = 0.0;
    for (double a : e.witness) wn += a * a;
    out.push_back(c.report("colacunary.witness_unit", "witness lies on the unit sphere",
                           std::abs(std::sqrt(wn) - 1.0), 0.0, 1e-12));
    return out;
}

Reports run_trial(TrialContext& c) {
    const std::string& s = c.suite;
    if (s == "spectral") return suite_spectral(c);
    if (s == "algebra") return suite_algebra(c);
    if (s == "norms") return suite_norms(c);
    if (s == "martingale") return suite_martingale(c);
    if (s == "cuculescu") return suite_cuculescu(c);
    if (s == "gundy") return suite_decomposition(c, DecompositionVariant::Gundy);
    if (s == "burkholder") return suite_decomposition(c, DecompositionVariant::Burkholder);
    if (s == "threepart") return suite_threepart(c);
    if (s == "transform") return suite_transform(c);
    if (s == "truncation") return suite_truncation(c);
    if (s == "burkholder_sq") return suite_burkholder_sq(c);
    if (s == "colacunary") return suite_colacunary(c);
    throw Error("unknown suite '" + s + "'");
}

unsigned thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NCMART_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

} // namespace

std::uint64_t trial_seed(std::uint64_t campaign_seed, const std::string& suite, std::uint64_t trial) {
    return splitmix64(splitmix64(campaign_seed ^ fnv1a(suite)) + trial);
}

std::vector<double> trial_lambdas(std::mt19937_64& rng, const Martingale& x) {
    const Matrix& fin = x.final_element() ? *x.final_element() : x.last();
    const double top = op_norm(fin);
    if (!(top > 0.0)) return {1.0};
    std::uniform_real_distribution<double> u(std::log(0.01), std::log(10.0));
    const double drawn = top * std::exp(u(rng));
    double tiny = 1e-3 * top;
    const Matrix h = (x.term(1) + x.term(1).adjoint()) / 2.0;
    if (hermitian_defect(x.term(1)) <= 1e-9 * std::max(1.0, top)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo > 0.0) tiny = std::min(tiny, 0.5 * lo);
    }
    return {drawn, tiny, 2.0 * top};
}

CampaignResult run_campaign(const CampaignConfig& config) {
    CampaignResult result;
    if (config.dims.empty()) throw Error("run_campaign: no dimensions given");
    std::vector<std::string> suites;
    if (config.suite == "all") {
        suites = suite_names();
    } else {
        if (std::find(suite_names().begin(), suite_names().end(), config.suite) == suite_names().end()) {
            throw Error("run_campaign: unknown suite '" + config.suite + "'");
        }
        suites = {config.suite};
    }
    struct Job {
        std::string suite;
        std::uint64_t trial;
    };
    std::vector<Job> jobs;
    for (const auto& s : suites) {
        for (std::uint64_t t = 0; t < config.trials; ++t) jobs.push_back({s, t});
    }
    std::vector<Reports> outputs(jobs.size());
    std::vector<std::string> failures(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            TrialContext ctx(config, jobs[i].suite, jobs[i].trial);
            try {
                outputs[i] = run_trial(ctx);
            } catch (const std::exception& e) {
                json fp = ctx.fingerprint;
                fp["error"] = e.what();
                failures[i] = fp.dump();
                outputs[i].push_back(make_report(jobs[i].suite + ".exception", "trial completed",
                                                 1.0, 0.0, 0.0, fp));
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(thread_count(config.threads), std::max<std::size_t>(1, jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!failures[i].empty()) result.errors.push_back(failures[i]);
        for (auto& r : outputs[i]) {
            CheckSummary& s = result.summary[r.check];
            ++s.count;
            if (!r.pass) ++s.failures;
            s.worst_measured = std::max(s.worst_measured, r.measured);
            if (r.allowed > 0.0) s.worst_ratio = std::max(s.worst_ratio, r.measured / r.allowed);
            result.reports.push_back(std::move(r));
        }
    }
    return result;
}

} // namespace ncmart
