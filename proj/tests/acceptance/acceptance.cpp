// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "ncmart/harness.hpp"
#include "ncmart/norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace ncmart;

namespace {

constexpr unsigned kTrials = 1000;
constexpr std::uint64_t kSeed = 1;
constexpr double kResidualTol = 1e-9;
constexpr double kBoundTol = 1e-7;
constexpr double kExactTol = 1e-12;
constexpr double kStabilityFactor = 4.0;
constexpr double kRademacherDelta = 0.70710678118654752;
constexpr double kRademacherTol = 1e-3;
constexpr unsigned kQuasiPairs = 1000;
constexpr unsigned kDeterminismTrials = 25;

struct Tally {
    std::size_t count = 0;
    std::size_t failures = 0;
    double worst_ratio = 0.0;
    std::string worst_check;
};

class Criteria {
public:
    explicit Criteria(const CampaignResult& r) : result_(r) {}

    // Residual-style checks: measured ≤ tol.
    Tally residual(const std::vector<std::string>& names, double tol) const {
        return scan(names, [tol](const CheckReport& r) { return r.measured <= tol; });
    }

    // Bound-style checks: measured ≤ allowed + tol.
    Tally bounded(const std::vector<std::string>& names, double tol) const {
        return scan(names, [tol](const CheckReport& r) { return r.measured <= r.allowed + tol; });
    }

    // Per dimension maximum of a measured constant; -1 where a value is not finite.
    std::map<Index, double> max_by_dim(const std::string& name) const {
        std::map<Index, double> out;
        for (const CheckReport& r : result_.reports) {
            if (r.check != name) continue;
            const Index dim = r.fingerprint.at("dim").get<Index>();
            double& slot = out.try_emplace(dim, 0.0).first->second;
            if (!std::isfinite(r.measured)) slot = -1.0;
            else if (slot >= 0.0) slot = std::max(slot, r.measured);
        }
        return out;
    }

private:
    Tally scan(const std::vector<std::string>& names, const std::function<bool(const CheckReport&)>& ok) const {
        Tally t;
        for (const CheckReport& r : result_.reports) {
            if (std::find(names.begin(), names.end(), r.check) == names.end()) continue;
            ++t.count;
            if (!std::isfinite(r.measured) || !ok(r)) ++t.failures;
            if (r.allowed > 0.0 && r.measured / r.allowed > t.worst_ratio) {
                t.worst_ratio = r.measured / r.allowed;
                t.worst_check = r.check;
            }
        }
        return t;
    }

    const CampaignResult& result_;
};

int failures = 0;

void line(int id, bool pass, const std::string& what, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s %2d  %-44s %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string describe(const Tally& t) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu checks, %zu failures, worst ratio %.4f", t.count, t.failures, t.worst_ratio);
    return buf;
}

bool clean(const Tally& t) { return t.count > 0 && t.failures == 0; }

std::vector<std::string> prefixed(const std::string& suite, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const auto& n : names) {
        out.push_back(suite + "." + n);
        out.push_back(suite + ".reduced." + n);
    }
    return out;
}

Tally merge(Tally a, const Tally& b) {
    a.count += b.count;
    a.failures += b.failures;
    if (b.worst_ratio > a.worst_ratio) {
        a.worst_ratio = b.worst_ratio;
        a.worst_check = b.worst_check;
    }
    return a;
}

void quasi_triangle_grid() {
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> g;
    const Index n = 8;
    const RealVector w = RealVector::Constant(n, 1.0 / static_cast<double>(n));
    auto draw = [&](double scale) {
        Matrix m(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) m(i, j) = scale * Complex(g(rng), g(rng));
        return m;
    };
    std::size_t count = 0;
    std::size_t bad = 0;
    double worst = 0.0;
    for (unsigned pair = 0; pair < kQuasiPairs; ++pair) {
        const Matrix x1 = draw(std::exp(g(rng)));
        const Matrix x2 = draw(std::exp(g(rng)));
        for (int step = 0; step < 10; ++step) {
            const double lambda = std::pow(10.0, -1.5 + step / 3.0);
            const QuasiTriangleReport r = check_quasi_triangle(x1, x2, lambda, w);
            ++count;
            if (!(r.lhs <= r.rhs + kBoundTol)) ++bad;
            if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu pair-thresholds, %zu failures, worst ratio %.4f", count, bad, worst);
    line(8, bad == 0, "quasi-triangle on a 10-point threshold grid", buf);
}

void stability(const Criteria& c) {
    const std::vector<std::string> measured{"transform.weak_type", "truncation.weak_type",
                                            "burkholder_sq.weak_type", "burkholder_sq.main_ratio"};
    bool ok = true;
    std::string detail;
    for (const auto& name : measured) {
        const auto by_dim = c.max_by_dim(name);
        double overall = 0.0;
        bool finite = !by_dim.empty();
        for (const auto& [dim, v] : by_dim) {
            if (v < 0.0) finite = false;
            overall = std::max(overall, v);
        }
        const auto base = by_dim.find(8);
        const double ratio = (base != by_dim.end() && base->second > 0.0) ? overall / base->second
                                                                          : std::numeric_limits<double>::infinity();
        ok = ok && finite && ratio < kStabilityFactor;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%s max %.3f ratio %.3f", detail.empty() ? "" : "; ",
                      name.c_str(), overall, ratio);
        detail += buf;
    }
    line(10, ok, "unnamed constants finite and stable in N", detail);
}

void colacunary_oracles() {
    const RealVector quarter = RealVector::Constant(4, 0.25);
    Matrix r1 = Matrix::Zero(4, 4);
    Matrix r2 = Matrix::Zero(4, 4);
    const double s1[4] = {1, 1, -1, -1};
    const double s2[4] = {1, -1, 1, -1};
    for (int i = 0; i < 4; ++i) {
        r1(i, i) = s1[i];
        r2(i, i) = s2[i];
    }
    const double pair = colacunary_estimate(DifferenceSequence{{r1, r2}}, quarter).delta;

    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> g;
    Matrix d(4, 4);
    for (Index j = 0; j < 4; ++j)
        for (Index i = 0; i < 4; ++i) d(i, j) = Complex(g(rng), g(rng));
    const double single = colacunary_estimate(DifferenceSequence{{d}}, quarter).delta;
    const double exact = lp_norm(d, 1.0, quarter);

    const bool ok = std::abs(pair - kRademacherDelta) <= kRademacherTol && single == exact;
    char buf[160];
    std::snprintf(buf, sizeof buf, "Rademacher pair %.6f; single difference %.17g vs %.17g", pair, single, exact);
    line(11, ok, "co-lacunary oracle cases", buf);
}

void determinism() {
    CampaignConfig cfg;
    cfg.suite = "all";
    cfg.trials = kDeterminismTrials;
    cfg.seed = kSeed + 1;
    const std::string a = run_campaign(cfg).report_lines();
    const std::string b = run_campaign(cfg).report_lines();
    char buf[160];
    std::snprintf(buf, sizeof buf, "all suites, %u trials, %zu bytes per run", cfg.trials, a.size());
    line(12, !a.empty() && a == b, "byte-identical rerun", buf);
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();

    CampaignConfig cfg;
    cfg.suite = "all";
    cfg.trials = kTrials;
    cfg.dims = {8, 16, 32};
    cfg.seed = kSeed;
    cfg.tol = kResidualTol;
    cfg.bound_tol = kBoundTol;
    const CampaignResult result = run_campaign(cfg);
    const Criteria c(result);

    std::printf("campaign: %zu reports, %zu trial errors, all reports pass: %s\n", result.reports.size(),
                result.errors.size(), result.all_pass() ? "yes" : "no");
    for (const auto& e : result.errors) std::printf("  error: %s\n", e.c_str());

    {
        const Tally t = merge(c.bounded({"cuculescu.compression"}, kResidualTol),
                              c.bounded({"cuculescu.mass"}, kResidualTol));
        line(1, clean(t) && result.errors.empty(), "threshold projection bounds", describe(t));
    }
    {
        const Tally t = merge(c.bounded({"randri.compressed_terms", "randri.compressed_previous",
                                         "randri.compressed_differences", "randri.compressed_sum"},
                                        kBoundTol),
                              c.residual({"randri.identity"}, kResidualTol));
        line(2, clean(t), "compressed jump estimates and identity", describe(t));
    }
    {
        const Tally t = c.bounded({"gundy.y_l1", "gundy.y_increment"}, kBoundTol);
        line(3, clean(t), "intermediate martingale bounds", describe(t));
    }
    {
        const Tally t = c.bounded({"gundy.alpha_l1", "gundy.alpha_l2_squared", "gundy.alpha_linf",
                                   "gundy.beta_variation", "gundy.gamma_support_mass",
                                   "gundy.upsilon_support_mass"},
                                  kBoundTol);
        line(4, clean(t), "four-part bounds, positive inputs",
             describe(t) + (t.worst_check.empty() ? "" : " (" + t.worst_check + ")"));
    }
    {
        const std::vector<std::string> parts{"reconstruction", "martingale_residual"};
        std::vector<std::string> names = prefixed("gundy", parts);
        const auto more = prefixed("burkholder", parts);
        names.insert(names.end(), more.begin(), more.end());
        const Tally t = c.residual(names, kResidualTol);
        line(5, clean(t), "reconstruction and difference residuals", describe(t));
    }
    {
        const Tally t = merge(c.bounded({"burkholder.alpha_l2_squared"}, kBoundTol),
                              c.residual(prefixed("burkholder", {"gamma_witness", "upsilon_witness"}),
                                         kResidualTol));
        line(6, clean(t), "L2 bound and support witnesses, second variant", describe(t));
    }
    {
        const Tally t = c.residual(prefixed("threepart", {"witness"}), kResidualTol);
        line(7, clean(t), "three-part witness identity", describe(t));
    }
    quasi_triangle_grid();
    {
        Tally t = c.residual({"burkholder_sq.disjointness", "burkholder_sq.partition", "burkholder_sq.y_difference",
                              "burkholder_sq.z_difference", "burkholder_sq.cancellation"},
                             kResidualTol);
        t = merge(t, c.residual({"burkholder_sq.reconstruction"}, kExactTol));
        t = merge(t, c.bounded({"burkholder_sq.reduction"}, kBoundTol));
        line(9, clean(t), "scale projections, y/z split, reduction", describe(t));
    }
    stability(c);
    colacunary_oracles();
    determinism();

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("elapsed: %.1f s\n", seconds);
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
