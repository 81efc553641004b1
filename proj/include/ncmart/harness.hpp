#pragma once

// Random instances, JSON serialization and verification campaigns.

#include "ncmart/applications.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ncmart {

struct FiltrationDescriptor {
    enum class Kind { TensorDyadic, PartitionChain, ExplicitBases };
    Kind kind = Kind::TensorDyadic;
    unsigned levels = 0;                              // TensorDyadic
    PartitionMode mode = PartitionMode::Commutative;  // PartitionChain
    std::vector<Partition> chain;                     // PartitionChain
    std::vector<std::vector<Matrix>> spanning_sets;   // ExplicitBases, one per level
};

const char* to_string(FiltrationDescriptor::Kind k);

enum class GeneratorKind { Positive, SelfAdjoint, General };
const char* to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

struct GeneratorDescriptor {
    GeneratorKind kind = GeneratorKind::Positive;
    double spectral_scale = 1.0;  // operator norm before normalization
    double spread = 1.0;          // log-normal row scaling of the Gaussian seed matrix
    bool normalize = true;        // rescale to ‖x_fin‖_1 = 1
};

struct InstanceSpec {
    Index dim = 0;
    RealVector weights;
    FiltrationDescriptor filtration;
    GeneratorDescriptor generator;
    std::uint64_t seed = 0;
};

struct Instance {
    Index dim = 0;
    RealVector weights;
    FiltrationDescriptor descriptor;
    FiltrationPtr filtration;
    Matrix final_element;
    std::optional<InstanceSpec> spec;

    [[nodiscard]] Martingale martingale() const {
        return Martingale::from_final(filtration, final_element);
    }
};

FiltrationPtr build_filtration(const TracialAlgebra& algebra, const FiltrationDescriptor& d);

/// Deterministic in the spec (including its seed).
Instance generate_instance(const InstanceSpec& spec);

/// Filtration families drawn by the campaign.
enum class FiltrationFamily { Dyadic, Commutative, Pinching };
const char* to_string(FiltrationFamily f);

/// Random spec of the given family. Dyadic requires dim = 2^levels; partition
/// families use `levels` levels. Weights are normalized to τ(1) = 1 and chosen
/// so that τ is tracial on the top level.
InstanceSpec random_spec(std::mt19937_64& rng, FiltrationFamily family, Index dim, unsigned levels,
                         GeneratorKind generator);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

struct CheckReport {
    std::string check;
    std::string anchor;  // the statement the check exercises
    double measured = 0.0;
    double allowed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json fingerprint;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// pass ⇔ measured ≤ allowed + tolerance (and measured is finite).
CheckReport make_report(std::string check, std::string anchor, double measured, double allowed,
                        double tolerance, nlohmann::json fingerprint);

/// Reference constants used as allowed bounds (multiples of ‖x‖_1 or λ).
namespace bounds {
inline constexpr double kCuculescuMass = 1.0;
inline constexpr double kCompressedTerms = 1.0;
inline constexpr double kCompressedPrevious = 2.0;
inline constexpr double kCompressedDifferences = 3.0;
inline constexpr double kCompressedSum = 2.0;
inline constexpr double kIntermediateL1 = 9.0;
inline constexpr double kIntermediateIncrement = 2.0;  // × λ
inline constexpr double kAlphaL1 = 18.0;
inline constexpr double kAlphaL2Squared = 72.0;        // × λ‖x‖_1
inline constexpr double kAlphaLinf = 4.0;              // × λ
inline constexpr double kBetaVariation = 7.0;
inline constexpr double kSupportMass = 10.0;
inline constexpr double kBurkholderAlphaL2Squared = 24.0;  // × λ‖x‖_1
inline constexpr double kThreePartSupportMass = 20.0;
inline constexpr double kQuasiTriangle = 2.0;
inline constexpr double kReductionAdditive = 4.0;
/// Multiplier applied on the reduced (non-positive) path.
inline constexpr double kReducedFactor = 4.0;
/// Cap for measured constants that carry no explicit value.
inline constexpr double kMeasurementCap = 1e3;
} // namespace bounds

struct CampaignConfig {
    std::string suite = "all";
    unsigned trials = 100;
    std::vector<Index> dims{8, 16, 32};
    unsigned levels = 0;  // 0: dyadic uses log2(dim), partitions draw 3..5
    std::uint64_t seed = 1;
    double tol = 1e-9;        // residual tolerance
    double bound_tol = 1e-7;  // additive tolerance on inequalities
    unsigned threads = 0;     // 0: NCMART_THREADS or 1
};

struct CheckSummary {
    std::size_t count = 0;
    std::size_t failures = 0;
    double worst_measured = 0.0;
    double worst_ratio = 0.0;  // max measured / allowed over reports with allowed > 0
};

struct CampaignResult {
    std::vector<CheckReport> reports;
    std::map<std::string, CheckSummary> summary;
    std::vector<std::string> errors;  // trials that threw, with their fingerprint

    [[nodiscard]] bool all_pass() const;
    /// JSON lines, one report per line, in trial order.
    [[nodiscard]] std::string report_lines() const;
    [[nodiscard]] nlohmann::json summary_json() const;
};

const std::vector<std::string>& suite_names();

CampaignResult run_campaign(const CampaignConfig& config);

/// Per-trial seed derived from the campaign seed, suite and trial index.
std::uint64_t trial_seed(std::uint64_t campaign_seed, const std::string& suite, std::uint64_t trial);

/// Thresholds examined per trial: one log-uniform draw in [0.01, 10]·‖x‖_∞, a
/// tiny value below the spectrum of x_1 (when positive) and 2‖x‖_∞.
std::vector<double> trial_lambdas(std::mt19937_64& rng, const Martingale& x);

/// Checks of a single decomposition or experiment, shared by the CLI and campaigns.
std::vector<CheckReport> decomposition_checks(const FourPartDecomposition& d, double tol,
                                              double bound_tol, const nlohmann::json& fingerprint);
std::vector<CheckReport> three_part_checks(const ThreePartDecomposition& t, bool reduced,
                                           double tol, double bound_tol,
                                           const nlohmann::json& fingerprint);
std::vector<CheckReport> cuculescu_checks(const Martingale& x, const CuculescuSequence& c,
                                          double tol, double bound_tol,
                                          const nlohmann::json& fingerprint);
std::vector<CheckReport> burkholder_sq_checks(const Martingale& x, unsigned m, double tol,
                                              double bound_tol, const nlohmann::json& fingerprint);

} // namespace ncmart
