// model.hpp
//
// Value types shared by the bound calculators, the oracles and the scenario
// catalog. Everything here is a plain immutable value once constructed.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tailbound {

/// Summary statistics of a single random variable.
struct MomentProfile {
    double mean{0.0};
    std::optional<double> variance;
    std::optional<double> support_lo;
    std::optional<double> support_hi;  // the "U" of the reverse Markov bound
    bool nonnegative{false};

    friend bool operator==(const MomentProfile&, const MomentProfile&) = default;
};

/// One summand of a sum of independent bounded variables.
struct BoundedVar {
    double lo{0.0};
    double hi{0.0};
    std::optional<double> mean;
    std::optional<double> variance;

    friend bool operator==(const BoundedVar&, const BoundedVar&) = default;
};

struct BoundedSumSpec {
    std::vector<BoundedVar> vars;

    std::size_t n() const noexcept { return vars.size(); }
    bool has_means() const noexcept;
    bool has_variances() const noexcept;
    double sum_of_means() const;            // requires has_means()
    double mean_variance() const;           // (1/n) sum Var[X_i], requires has_variances()
    double sum_squared_ranges() const noexcept;

    static BoundedSumSpec identical(std::size_t n, const BoundedVar& v);

    friend bool operator==(const BoundedSumSpec&, const BoundedSumSpec&) = default;
};

/// Per-step bounds c_i, used both for martingale differences and for the
/// bounded-difference condition on a function of independent inputs.
struct MartingaleDifferenceSpec {
    std::vector<double> c;

    std::size_t n() const noexcept { return c.size(); }
    double sum_squares() const noexcept;

    static MartingaleDifferenceSpec uniform(std::size_t n, double c);

    friend bool operator==(const MartingaleDifferenceSpec&, const MartingaleDifferenceSpec&) = default;
};

enum class Direction { upper, lower, two_sided };

enum class ThresholdKind {
    absolute_level,   // X >= a
    sum_deviation,    // S - E[S] >= t
    mean_deviation,   // (1/n) sum (X_i - E X_i) >= eps
};

struct TailQuery {
    Direction direction{Direction::upper};
    ThresholdKind threshold_kind{ThresholdKind::absolute_level};
    double threshold{0.0};

    friend bool operator==(const TailQuery&, const TailQuery&) = default;
};

/// Outcome of one bound evaluation.
///
/// `raw_log_value` is the natural log of the bound before clamping and may be
/// positive; `log_value` is min(raw, 0) and `value` = exp(log_value).
struct BoundResult {
    std::string method;
    double value{1.0};
    double log_value{0.0};
    double raw_log_value{0.0};
    bool clamped{false};
    std::optional<double> optimal_param;

    static BoundResult from_log(std::string method, double raw_log,
                                std::optional<double> optimal_param = std::nullopt);
};

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(ThresholdKind k) noexcept;
Direction parse_direction(std::string_view s);
ThresholdKind parse_threshold_kind(std::string_view s);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
    std::string field;  // dotted path, several fields joined by ", "
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

using ViolationReport = std::vector<Violation>;

class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(ViolationReport report);
    const ViolationReport& report() const noexcept { return report_; }

private:
    ViolationReport report_;
};

// check() returns every violated invariant (empty means valid). The prefix is
// prepended to field names so nested objects report full paths.
ViolationReport check(const MomentProfile& p, std::string_view prefix = "");
ViolationReport check(const BoundedSumSpec& s, std::string_view prefix = "");
ViolationReport check(const MartingaleDifferenceSpec& s, std::string_view prefix = "");
ViolationReport check(const TailQuery& q, std::string_view prefix = "");

// validate() returns its argument unchanged or throws ValidationError.
template <typename T>
const T& validate(const T& value) {
    if (auto report = check(value); !report.empty()) throw ValidationError(std::move(report));
    return value;
}

std::string format_report(const ViolationReport& report);

/// A computation produced a non-finite intermediate it cannot recover from.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tailbound
