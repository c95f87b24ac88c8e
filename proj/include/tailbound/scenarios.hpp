// scenarios.hpp
//
// Named worked examples, the JSON scenario format, and the engine that runs
// every declared bound against a scenario and checks it against an oracle.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/model.hpp"
#include "tailbound/oracle.hpp"

namespace tailbound {

enum class ScenarioKind { moment, bounded_sum, martingale, bounded_difference };

std::string_view to_string(ScenarioKind k) noexcept;
ScenarioKind parse_scenario_kind(std::string_view s);

struct BinomialMgf {
    std::uint64_t n{0};
    double p{0.0};
    friend bool operator==(const BinomialMgf&, const BinomialMgf&) = default;
};
struct BernoulliEboundMgf {
    double np{0.0};
    friend bool operator==(const BernoulliEboundMgf&, const BernoulliEboundMgf&) = default;
};
struct ConstantMgf {
    double value{0.0};
    friend bool operator==(const ConstantMgf&, const ConstantMgf&) = default;
};
using MgfSpec = std::variant<BinomialMgf, BernoulliEboundMgf, ConstantMgf>;

MgfHandle make_mgf(const MgfSpec& spec);

struct ExactBinomialOracle {
    std::uint64_t n{0};
    double p{0.0};
    friend bool operator==(const ExactBinomialOracle&, const ExactBinomialOracle&) = default;
};
using OracleConfig = std::variant<ExactBinomialOracle, SamplerSpec>;

/// Regression target for one method. Tolerances are absolute unless
/// `relative` is set.
struct ExpectedValue {
    std::string method;
    double value{0.0};
    double tolerance{0.0};
    bool relative{false};
    std::string note;
    friend bool operator==(const ExpectedValue&, const ExpectedValue&) = default;
};

struct Scenario {
    std::string name;
    std::string description;
    ScenarioKind kind{ScenarioKind::moment};
    std::optional<MomentProfile> profile;
    std::optional<BoundedSumSpec> sum;
    std::optional<MartingaleDifferenceSpec> differences;
    std::optional<MgfSpec> mgf;
    TailQuery query;
    std::vector<std::string> applicable;
    std::optional<OracleConfig> oracle;
    std::vector<ExpectedValue> expected;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Every method identifier a scenario may declare.
const std::vector<std::string>& known_methods();

/// Empty when the scenario carries the data `method` needs, otherwise the reason it does not.
std::string missing_data(const Scenario& s, std::string_view method);

ViolationReport check(const Scenario& s, std::string_view prefix = "");

/// Runs one method against the scenario's data and query. Throws on a
/// failed precondition.
BoundResult evaluate_method(const Scenario& s, std::string_view method);

// ---------------------------------------------------------------------------
// Catalog and files
// ---------------------------------------------------------------------------

std::vector<Scenario> builtin_catalog();
/// Throws std::out_of_range for an unknown name.
Scenario builtin_scenario(std::string_view name);

class ScenarioError : public std::runtime_error {
public:
    enum class Kind { parse, schema, invariant };

    ScenarioError(Kind kind, std::string message, std::string field = {}, std::size_t line = 0,
                  std::size_t column = 0, ViolationReport report = {});

    Kind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const ViolationReport& report() const noexcept { return report_; }

private:
    Kind kind_;
    std::string field_;
    std::size_t line_;
    std::size_t column_;
    ViolationReport report_;
};

/// Parses and validates a scenario document. Unknown keys are rejected.
Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::string& path);
/// Pretty-printed JSON document that load_scenario reads back to an equal Scenario.
std::string dump_scenario(const Scenario& s);

// ---------------------------------------------------------------------------
// Comparison and soundness
// ---------------------------------------------------------------------------

struct Omission {
    std::string method;
    std::string reason;
    bool error{false};  // declared applicable but failed at runtime
};

struct RegressionCheck {
    std::string method;
    double expected{0.0};
    double actual{0.0};
    double tolerance{0.0};
    bool relative{false};
    bool pass{false};
    std::string note;
};

struct ComparisonTable {
    std::string scenario;
    std::vector<BoundResult> rows;          // ascending by value, ties by method name
    std::vector<Omission> omitted;
    std::optional<double> exact_oracle;     // present for exact-binomial oracles
    std::vector<RegressionCheck> regression;

    bool has_errors() const noexcept;
    bool regression_ok() const noexcept;
    const BoundResult* row(std::string_view method) const noexcept;
};

/// `tolerance_override`, when set, replaces every expected value's tolerance
/// (and makes it absolute).
ComparisonTable compare_bounds(const Scenario& s, std::optional<double> tolerance_override = std::nullopt);

struct SoundnessRow {
    std::string method;
    double bound{0.0};
    bool pass{false};
};

struct SoundnessReport {
    std::string scenario;
    bool exact{false};
    double oracle_point{0.0};
    double ci_lo{0.0};
    double ci_hi{0.0};
    std::uint64_t samples{0};
    std::uint64_t seed{0};
    std::vector<SoundnessRow> rows;
    std::vector<Omission> omitted;

    bool passed() const noexcept;
};

/// Pairs every bound row with the oracle; a row passes iff bound >= oracle
/// point minus the interval slack below it (the Wilson lower end for Monte
/// Carlo, zero for exact oracles). Throws std::invalid_argument when the
/// scenario has no oracle.
SoundnessReport soundness_check(const Scenario& s, std::uint64_t samples, std::uint64_t seed,
                                const McOptions& options = {});

/// Exact tail probability of the scenario's query under a binomial oracle.
double exact_oracle_value(const ExactBinomialOracle& oracle, const TailQuery& query);

}  // namespace tailbound
