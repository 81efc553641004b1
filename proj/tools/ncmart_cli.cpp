// Command-line front end: campaigns, single-instance decompositions and experiments.

#include "ncmart/harness.hpp"
#include "ncmart/norms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace ncmart;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

json martingale_json(const Martingale& m) {
    json terms = json::array();
    for (std::size_t k = 1; k <= m.length(); ++k) terms.push_back(matrix_to_json(m.term(k)));
    return terms;
}

json reports_json(const std::vector<CheckReport>& reports) {
    json out = json::array();
    for (const auto& r : reports) out.push_back(r.to_json());
    return out;
}

bool all_pass(const std::vector<CheckReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

json input_fingerprint(const std::string& path) { return json{{"input", path}}; }

int cmd_verify(const CampaignConfig& cfg, const std::string& out, const std::string& summary_out) {
    const CampaignResult r = run_campaign(cfg);
    write_text(out, r.report_lines());
    const std::string summary = r.summary_json().dump(2) + "\n";
    if (!summary_out.empty()) write_text(summary_out, summary);
    if (out != "-") std::cout << summary;
    return r.all_pass() ? 0 : 1;
}

int cmd_decompose(const std::string& input, double lambda, const std::string& variant,
                  const std::string& out, double tol) {
    const Instance inst = instance_from_json(read_json(input));
    const Martingale x = inst.martingale();
    const json fp = input_fingerprint(input);
    json doc;
    doc["lambda"] = lambda;
    doc["variant"] = variant;
    std::vector<CheckReport> checks;
    if (variant == "threepart") {
        const bool reduced = !is_positive_martingale(x, tol);
        const ThreePartDecomposition t = three_part(x, lambda, tol);
        doc["reduced"] = reduced;
        doc["a"] = martingale_json(t.a);
        doc["b"] = martingale_json(t.b);
        doc["c"] = martingale_json(t.c);
        json wit = json::array();
        for (const auto& p : t.witnesses) wit.push_back(matrix_to_json(p.matrix()));
        doc["witnesses"] = std::move(wit);
        doc["support_mass"] = t.support_mass;
        checks = three_part_checks(t, reduced, tol, 1e-7, fp);
    } else {
        if (variant != "gundy" && variant != "burkholder") {
            throw Error("unknown variant '" + variant + "' (expected gundy, burkholder or threepart)");
        }
        const FourPartDecomposition d = variant == "gundy" ? gundy_decompose(x, lambda, tol)
                                                           : burkholder_decompose(x, lambda, tol);
        doc["reduced"] = d.reduced;
        doc["alpha"] = martingale_json(d.alpha);
        doc["beta"] = martingale_json(d.beta);
        doc["gamma"] = martingale_json(d.gamma);
        doc["upsilon"] = martingale_json(d.upsilon);
        json wit = json::array();
        for (const auto& p : d.witnesses) wit.push_back(matrix_to_json(p.matrix()));
        doc["witnesses"] = std::move(wit);
        const DecompositionMeasurements& m = d.measured;
        doc["measured"] = {{"x_norm1", m.x_norm1},
                           {"alpha_l1", m.alpha_l1},
                           {"alpha_l2_squared", m.alpha_l2_squared},
                           {"alpha_linf", m.alpha_linf},
                           {"beta_variation", m.beta_variation},
                           {"gamma_support_mass", m.gamma_support_mass},
                           {"upsilon_support_mass", m.upsilon_support_mass}};
        checks = decomposition_checks(d, tol, 1e-7, fp);
    }
    doc["checks"] = reports_json(checks);
    doc["pass"] = all_pass(checks);
    write_text(out, doc.dump(2) + "\n");
    return all_pass(checks) ? 0 : 1;
}

int cmd_transform(const std::string& input, const std::string& signs, const std::string& out,
                  double tol) {
    const Instance inst = instance_from_json(read_json(input));
    const Martingale x = inst.martingale();
    std::vector<Matrix> xi;
    std::stringstream ss(signs);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "+" || tok == "+1" || tok == "1") {
            xi.push_back(Matrix::Identity(x.dim(), x.dim()));
        } else if (tok == "-" || tok == "-1") {
            xi.push_back(-Matrix::Identity(x.dim(), x.dim()));
        } else {
            throw Error("transform: sign token '" + tok + "' is not one of +, -, +1, -1");
        }
    }
    const TransformResult t = martingale_transform(x, xi, tol);
    const double scale = std::max(1.0, op_norm(inst.final_element));
    const json fp = input_fingerprint(input);
    std::vector<CheckReport> checks;
    checks.push_back(make_report("transform.martingale", "transform is a martingale",
                                 measure_martingale(t.martingale).max(), 0.0, tol * scale, fp));
    const double weak = weak_l1(t.partial_sums.back(), x.algebra().weights());
    checks.push_back(make_report("transform.weak_type", "measured: weak-L1 of the transform over |x|_1",
                                 weak / x.norm(1.0), bounds::kMeasurementCap, 0.0, fp));
    json doc;
    json sums = json::array();
    for (const auto& s : t.partial_sums) sums.push_back(matrix_to_json(s));
    doc["partial_sums"] = std::move(sums);
    doc["weak_l1"] = weak;
    doc["x_norm1"] = x.norm(1.0);
    doc["checks"] = reports_json(checks);
    doc["pass"] = all_pass(checks);
    write_text(out, doc.dump(2) + "\n");
    return all_pass(checks) ? 0 : 1;
}

int cmd_burkholder_sq(const std::string& input, unsigned m, const std::string& out, double tol) {
    const Instance inst = instance_from_json(read_json(input));
    const Martingale x = inst.martingale();
    const std::vector<CheckReport> checks = burkholder_sq_checks(x, m, tol, 1e-7, input_fingerprint(input));
    const ScaleProjectionFamily fam = scale_projections(x, m, tol);
    const YZSplit split = burkholder_yz(x, fam);
    json doc;
    doc["m"] = m;
    doc["top_scale"] = fam.top;
    json dy = json::array(), dz = json::array();
    for (const auto& d : split.dy.terms) dy.push_back(matrix_to_json(d));
    for (const auto& d : split.dz.terms) dz.push_back(matrix_to_json(d));
    doc["dy"] = std::move(dy);
    doc["dz"] = std::move(dz);
    json ranks = json::array();
    for (std::size_t n = 1; n <= fam.length(); ++n) {
        json r = json::array();
        for (const auto& p : fam.complete(n)) r.push_back(p.rank());
        ranks.push_back(std::move(r));
    }
    doc["block_ranks"] = std::move(ranks);
    doc["checks"] = reports_json(checks);
    doc["pass"] = all_pass(checks);
    write_text(out, doc.dump(2) + "\n");
    return all_pass(checks) ? 0 : 1;
}

int cmd_colacunary(const std::string& input, const ColacunaryOptions& opt, const std::string& out) {
    const Instance inst = instance_from_json(read_json(input));
    const Martingale x = inst.martingale();
    const ColacunaryEstimate e = colacunary_estimate(x.differences(), x.algebra().weights(), opt);
    json doc;
    doc["delta"] = e.delta;
    doc["witness"] = e.witness;
    doc["trials"] = opt.trials;
    doc["descent_steps"] = opt.descent_steps;
    doc["seed"] = opt.seed;
    doc["pass"] = std::isfinite(e.delta);
    write_text(out, doc.dump(2) + "\n");
    return std::isfinite(e.delta) ? 0 : 1;
}

int cmd_generate(Index dim, unsigned levels, const std::string& family, const std::string& generator,
                 std::uint64_t seed, const std::string& out) {
    FiltrationFamily fam;
    if (family == "dyadic") {
        fam = FiltrationFamily::Dyadic;
    } else if (family == "commutative") {
        fam = FiltrationFamily::Commutative;
    } else if (family == "pinching") {
        fam = FiltrationFamily::Pinching;
    } else {
        throw Error("unknown family '" + family + "' (expected dyadic, commutative or pinching)");
    }
    if (fam == FiltrationFamily::Dyadic && levels == 0) {
        while ((Index{1} << levels) < dim) ++levels;
    }
    if (levels == 0) levels = 3;
    std::mt19937_64 rng(seed);
    const InstanceSpec spec = random_spec(rng, fam, dim, levels, generator_kind_from_string(generator));
    write_text(out, instance_to_json(generate_instance(spec)).dump() + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-commutative martingale decompositions and verification campaigns"};
    app.require_subcommand(1);
    double tol = 1e-9;
    app.add_option("--tol", tol, "Residual tolerance")->capture_default_str();

    CampaignConfig cfg;
    std::string verify_out = "-";
    std::string summary_out;
    std::vector<Index> dims;
    auto* verify = app.add_subcommand("verify", "Run a randomized verification campaign");
    verify->add_option("--suite", cfg.suite, "Suite name or 'all'")->capture_default_str();
    verify->add_option("--dim", dims, "Matrix dimension(s); repeat or comma-separate")->delimiter(',');
    verify->add_option("--levels", cfg.levels, "Filtration length for partition chains (0: random 3-5)");
    verify->add_option("--trials", cfg.trials, "Trials per suite")->capture_default_str();
    verify->add_option("--seed", cfg.seed, "Campaign seed")->capture_default_str();
    verify->add_option("--tol", cfg.tol, "Residual tolerance")->capture_default_str();
    verify->add_option("--bound-tol", cfg.bound_tol, "Additive tolerance on inequalities")->capture_default_str();
    verify->add_option("--out", verify_out, "Report file (JSON lines); '-' for stdout")->capture_default_str();
    verify->add_option("--summary", summary_out, "Also write the summary JSON here");

    std::string input, out = "-", variant = "gundy", signs;
    double lambda = 1.0;
    auto* decompose = app.add_subcommand("decompose", "Decompose one instance at a threshold");
    decompose->add_option("--input", input, "Instance JSON")->required();
    decompose->add_option("--lambda", lambda, "Threshold > 0")->required();
    decompose->add_option("--variant", variant, "gundy | burkholder | threepart")->capture_default_str();
    decompose->add_option("--out", out, "Output JSON; '-' for stdout")->capture_default_str();

    auto* transform = app.add_subcommand("transform", "Apply a scalar sign transform");
    transform->add_option("--input", input, "Instance JSON")->required();
    transform->add_option("--signs", signs, "Comma-separated signs for xi_0..xi_{n-1}, e.g. +,-,+")->required();
    transform->add_option("--out", out, "Output JSON; '-' for stdout")->capture_default_str();

    unsigned m = 0;
    auto* bsq = app.add_subcommand("burkholder-sq", "Scale projections and the y/z splitting");
    bsq->add_option("--input", input, "Instance JSON (positive generator)")->required();
    bsq->add_option("--m", m, "Scale level, lambda = 2^m")->capture_default_str();
    bsq->add_option("--out", out, "Output JSON; '-' for stdout")->capture_default_str();

    ColacunaryOptions copt;
    auto* cola = app.add_subcommand("colacunary", "Estimate the co-lacunary constant of the differences");
    cola->add_option("--input", input, "Instance JSON")->required();
    cola->add_option("--trials", copt.trials, "Random starting points")->capture_default_str();
    cola->add_option("--steps", copt.descent_steps, "Descent steps per start")->capture_default_str();
    cola->add_option("--seed", copt.seed, "Sampling seed")->capture_default_str();
    cola->add_option("--out", out, "Output JSON; '-' for stdout")->capture_default_str();

    Index gdim = 8;
    unsigned glevels = 0;
    std::string family = "dyadic", generator = "positive";
    std::uint64_t gseed = 1;
    auto* gen = app.add_subcommand("generate", "Write a random instance as JSON");
    gen->add_option("--dim", gdim, "Matrix dimension")->capture_default_str();
    gen->add_option("--levels", glevels, "Filtration length (dyadic: log2 dim)");
    gen->add_option("--family", family, "dyadic | commutative | pinching")->capture_default_str();
    gen->add_option("--generator", generator, "positive | self-adjoint | general")->capture_default_str();
    gen->add_option("--seed", gseed, "Instance seed")->capture_default_str();
    gen->add_option("--out", out, "Output JSON; '-' for stdout")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*verify) {
            if (!dims.empty()) cfg.dims = dims;
            return cmd_verify(cfg, verify_out, summary_out);
        }
        if (*decompose) return cmd_decompose(input, lambda, variant, out, tol);
        if (*transform) return cmd_transform(input, signs, out, tol);
        if (*bsq) return cmd_burkholder_sq(input, m, out, tol);
        if (*cola) return cmd_colacunary(input, copt, out);
        if (*gen) return cmd_generate(gdim, glevels, family, generator, gseed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
