#include "tailbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tailbound {

namespace {

// Neumaier summation; long runs of equal terms otherwise drift by ~n ulps.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

}  // namespace


bool BoundedSumSpec::has_means() const noexcept {
    return std::all_of(vars.begin(), vars.end(), [](const BoundedVar& v) { return v.mean.has_value(); });
}

bool BoundedSumSpec::has_variances() const noexcept {
    return std::all_of(vars.begin(), vars.end(),
                       [](const BoundedVar& v) { return v.variance.has_value(); });
}

double BoundedSumSpec::sum_of_means() const {
    if (!has_means()) throw std::invalid_argument("bounded sum: every variable needs a mean");
    double s = 0.0;
    for (const auto& v : vars) s += *v.mean;
    return s;
}

double BoundedSumSpec::mean_variance() const {
    if (!has_variances() || vars.empty())
        throw std::invalid_argument("bounded sum: every variable needs a variance");
    double s = 0.0;
    for (const auto& v : vars) s += *v.variance;
    return s / static_cast<double>(vars.size());
}

double BoundedSumSpec::sum_squared_ranges() const noexcept {
    CompensatedSum s;
    for (const auto& v : vars) s.add((v.hi - v.lo) * (v.hi - v.lo));
    return s.value();
}

BoundedSumSpec BoundedSumSpec::identical(std::size_t n, const BoundedVar& v) {
    return BoundedSumSpec{std::vector<BoundedVar>(n, v)};
}

double MartingaleDifferenceSpec::sum_squares() const noexcept {
    CompensatedSum s;
    for (double ci : c) s.add(ci * ci);
    return s.value();
}

MartingaleDifferenceSpec MartingaleDifferenceSpec::uniform(std::size_t n, double c) {
    return MartingaleDifferenceSpec{std::vector<double>(n, c)};
}

BoundResult BoundResult::from_log(std::string method, double raw_log, std::optional<double> optimal_param) {
    BoundResult r;
    r.method = std::move(method);
    r.raw_log_value = raw_log;
    r.clamped = raw_log > 0.0;
    r.log_value = r.clamped ? 0.0 : raw_log;
    r.value = r.clamped ? 1.0 : std::exp(raw_log);
    r.optimal_param = optimal_param;
    return r;
}

std::string_view to_string(Direction d) noexcept {
    switch (d) {
        case Direction::upper: return "upper";
        case Direction::lower: return "lower";
        case Direction::two_sided: return "two-sided";
    }
    return "?";
}

std::string_view to_string(ThresholdKind k) noexcept {
    switch (k) {
        case ThresholdKind::absolute_level: return "absolute-level";
        case ThresholdKind::sum_deviation: return "sum-deviation";
        case ThresholdKind::mean_deviation: return "mean-deviation";
    }
    return "?";
}

Direction parse_direction(std::string_view s) {
    if (s == "upper") return Direction::upper;
    if (s == "lower") return Direction::lower;
    if (s == "two-sided") return Direction::two_sided;
    throw std::invalid_argument("unknown direction '" + std::string(s) + "' (upper|lower|two-sided)");
}

ThresholdKind parse_threshold_kind(std::string_view s) {
    if (s == "absolute-level") return ThresholdKind::absolute_level;
    if (s == "sum-deviation") return ThresholdKind::sum_deviation;
    if (s == "mean-deviation") return ThresholdKind::mean_deviation;
    throw std::invalid_argument("unknown threshold kind '" + std::string(s) +
                                "' (absolute-level|sum-deviation|mean-deviation)");
}

namespace {

std::string join(std::string_view prefix, std::string_view field) {
    std::string out(prefix);
    out += field;
    return out;
}

std::string indexed(std::string_view prefix, std::string_view list, std::size_t i, std::string_view field) {
    std::ostringstream os;
    os << prefix << list << '[' << i << ']';
    if (!field.empty()) os << '.' << field;
    return os.str();
}

}  // namespace

ValidationError::ValidationError(ViolationReport report)
    : std::invalid_argument(format_report(report)), report_(std::move(report)) {}

std::string format_report(const ViolationReport& report) {
    std::ostringstream os;
    os << "invariant violation";
    if (report.size() != 1) os << 's';
    os << ':';
    for (const auto& v : report) os << "\n  " << v.field << ": " << v.rule;
    return os.str();
}

ViolationReport check(const MomentProfile& p, std::string_view prefix) {
    ViolationReport out;
    const auto f = [&](std::string_view name) { return join(prefix, name); };

    if (!std::isfinite(p.mean)) out.push_back({f("mean"), "must be finite"});
    if (p.variance && !(std::isfinite(*p.variance) && *p.variance >= 0.0))
        out.push_back({f("variance"), "must be finite and >= 0"});
    if (p.support_lo && std::isnan(*p.support_lo)) out.push_back({f("support_lo"), "must not be NaN"});
    if (p.support_hi && std::isnan(*p.support_hi)) out.push_back({f("support_hi"), "must not be NaN"});

    if (p.support_lo && p.support_hi && *p.support_lo > *p.support_hi)
        out.push_back({f("support_lo") + ", " + f("support_hi"), "support_lo <= support_hi"});
    if (p.support_lo && p.mean < *p.support_lo)
        out.push_back({f("mean") + ", " + f("support_lo"), "support_lo <= mean"});
    if (p.support_hi && p.mean > *p.support_hi)
        out.push_back({f("mean") + ", " + f("support_hi"), "mean <= support_hi"});
    if (p.variance && p.support_lo && p.support_hi) {
        const double w = *p.support_hi - *p.support_lo;
        if (*p.variance > w * w / 4.0)
            out.push_back({f("variance") + ", " + f("support_lo") + ", " + f("support_hi"),
                           "variance <= (support_hi - support_lo)^2 / 4"});
    }
    if (p.nonnegative && p.support_lo && *p.support_lo < 0.0)
        out.push_back({f("nonnegative") + ", " + f("support_lo"), "nonnegative requires support_lo >= 0"});
    if (p.nonnegative && p.mean < 0.0)
        out.push_back({f("nonnegative") + ", " + f("mean"), "nonnegative requires mean >= 0"});
    return out;
}

ViolationReport check(const BoundedSumSpec& s, std::string_view prefix) {
    ViolationReport out;
    if (s.vars.empty()) out.push_back({join(prefix, "vars"), "n >= 1"});
    for (std::size_t i = 0; i < s.vars.size(); ++i) {
        const auto& v = s.vars[i];
        if (!std::isfinite(v.lo) || !std::isfinite(v.hi)) {
            out.push_back({indexed(prefix, "vars", i, "lo") + ", " + indexed(prefix, "vars", i, "hi"),
                           "range must be finite"});
            continue;
        }
        if (v.lo > v.hi)
            out.push_back({indexed(prefix, "vars", i, "lo") + ", " + indexed(prefix, "vars", i, "hi"),
                           "lo <= hi"});
        if (v.mean && !(v.lo <= *v.mean && *v.mean <= v.hi))
            out.push_back({indexed(prefix, "vars", i, "mean"), "lo <= mean <= hi"});
        if (v.variance && !(std::isfinite(*v.variance) && *v.variance >= 0.0))
            out.push_back({indexed(prefix, "vars", i, "variance"), "must be finite and >= 0"});
    }
    return out;
}

ViolationReport check(const MartingaleDifferenceSpec& s, std::string_view prefix) {
    ViolationReport out;
    if (s.c.empty()) out.push_back({join(prefix, "c"), "n >= 1"});
    for (std::size_t i = 0; i < s.c.size(); ++i)
        if (!(std::isfinite(s.c[i]) && s.c[i] > 0.0)) out.push_back({indexed(prefix, "c", i, ""), "c_i > 0"});
    return out;
}

ViolationReport check(const TailQuery& q, std::string_view prefix) {
    ViolationReport out;
    if (!std::isfinite(q.threshold)) out.push_back({join(prefix, "threshold"), "must be finite"});
    return out;
}

}  // namespace tailbound
