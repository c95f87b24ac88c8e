#include "tailbound/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailbound {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

std::optional<double> center_of(const Scenario& s) {
    if (s.profile) return s.profile->mean;
    if (s.sum && s.sum->has_means()) return s.sum->sum_of_means();
    return std::nullopt;
}

std::size_t count_of(const Scenario& s) {
    if (s.sum) return s.sum->n();
    if (s.differences) return s.differences->n();
    return 1;
}

// Level a for an upper/lower query, measured on the scale of the aggregate.
double level_of(const Scenario& s, Direction expected, const char* method) {
    require(s.query.direction == expected, std::string(method) + ": needs a " + std::string(to_string(expected)) +
                                               " query, scenario asks " +
                                               std::string(to_string(s.query.direction)));
    if (s.query.threshold_kind == ThresholdKind::absolute_level) return s.query.threshold;
    const auto c = center_of(s);
    require(c.has_value(), std::string(method) + ": deviation query needs the scenario mean");
    double t = s.query.threshold;
    if (s.query.threshold_kind == ThresholdKind::mean_deviation) t *= static_cast<double>(count_of(s));
    return expected == Direction::upper ? *c + t : *c - t;
}

// Non-negative deviation on the aggregate scale.
double deviation_of(const Scenario& s, const char* method) {
    double t = s.query.threshold;
    switch (s.query.threshold_kind) {
        case ThresholdKind::sum_deviation: break;
        case ThresholdKind::mean_deviation: t *= static_cast<double>(count_of(s)); break;
        case ThresholdKind::absolute_level: {
            const auto c = center_of(s);
            require(c.has_value(), std::string(method) + ": absolute-level query needs the scenario mean");
            switch (s.query.direction) {
                case Direction::upper: t = s.query.threshold - *c; break;
                case Direction::lower: t = *c - s.query.threshold; break;
                case Direction::two_sided: t = std::abs(s.query.threshold - *c); break;
            }
            break;
        }
    }
    require(t >= 0.0, std::string(method) + ": threshold lies on the wrong side of the mean");
    return t;
}

TailQuery sum_query(const Scenario& s, const char* method) {
    return TailQuery{s.query.direction, ThresholdKind::sum_deviation, deviation_of(s, method)};
}

BoundResult rename(BoundResult r, std::string_view method) {
    r.method = std::string(method);
    return r;
}

}  // namespace

std::string_view to_string(ScenarioKind k) noexcept {
    switch (k) {
        case ScenarioKind::moment: return "moment";
        case ScenarioKind::bounded_sum: return "bounded-sum";
        case ScenarioKind::martingale: return "martingale";
        case ScenarioKind::bounded_difference: return "bounded-difference";
    }
    return "?";
}

ScenarioKind parse_scenario_kind(std::string_view s) {
    if (s == "moment") return ScenarioKind::moment;
    if (s == "bounded-sum") return ScenarioKind::bounded_sum;
    if (s == "martingale") return ScenarioKind::martingale;
    if (s == "bounded-difference") return ScenarioKind::bounded_difference;
    throw std::invalid_argument("unknown scenario kind '" + std::string(s) +
                                "' (moment|bounded-sum|martingale|bounded-difference)");
}

MgfHandle make_mgf(const MgfSpec& spec) {
    return std::visit(overloaded{
                          [](const BinomialMgf& b) { return binomial_mgf(b.n, b.p); },
                          [](const BernoulliEboundMgf& e) { return bernoulli_sum_ebound_mgf(e.np); },
                          [](const ConstantMgf& c) { return constant_mgf(c.value); },
                      },
                      spec);
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> methods{
        "markov",    "reverse_markov", "chebyshev", "chebyshev_symmetric", "chernoff",  "chernoff_bernoulli",
        "chernoff_binomial_two_sided", "hoeffding", "bennett", "bernstein", "azuma", "mcdiarmid",
    };
    return methods;
}

std::string missing_data(const Scenario& s, std::string_view method) {
    if (method == "markov") {
        if (!s.profile) return "requires a moment profile";
        if (!s.profile->nonnegative) return "requires a nonnegative variable";
        return {};
    }
    if (method == "reverse_markov") {
        if (!s.profile) return "requires a moment profile";
        if (!s.profile->support_hi) return "requires support_hi (maximum value)";
        return {};
    }
    if (method == "chebyshev" || method == "chebyshev_symmetric") {
        if (!s.profile) return "requires a moment profile";
        if (!s.profile->variance) return "requires a variance";
        return {};
    }
    if (method == "chernoff") return s.mgf ? std::string{} : "requires an mgf";
    if (method == "chernoff_bernoulli" || method == "chernoff_binomial_two_sided")
        return s.profile ? std::string{} : "requires a moment profile (mean of the Bernoulli sum)";
    if (method == "hoeffding") return s.sum ? std::string{} : "requires per-variable ranges";
    if (method == "bennett" || method == "bernstein") {
        if (!s.sum) return "requires per-variable ranges";
        if (!s.sum->has_variances()) return "requires per-variable variances";
        if (method == "bennett" && !s.sum->has_means()) return "requires per-variable means";
        return {};
    }
    if (method == "azuma" || method == "mcdiarmid")
        return s.differences ? std::string{} : "requires difference bounds c_i";
    return "unknown method";
}

ViolationReport check(const Scenario& s, std::string_view prefix) {
    ViolationReport out;
    const std::string pre(prefix);
    auto append = [&](ViolationReport r) { out.insert(out.end(), r.begin(), r.end()); };

    if (s.name.empty()) out.push_back({pre + "name", "must be non-empty"});
    switch (s.kind) {
        case ScenarioKind::moment:
            if (!s.profile) out.push_back({pre + "profile", "kind moment requires a profile"});
            break;
        case ScenarioKind::bounded_sum:
            if (!s.sum) out.push_back({pre + "vars", "kind bounded-sum requires vars"});
            break;
        case ScenarioKind::martingale:
        case ScenarioKind::bounded_difference:
            if (!s.differences)
                out.push_back({pre + "differences", "kind " + std::string(to_string(s.kind)) + " requires differences"});
            break;
    }
    if (s.profile) append(check(*s.profile, pre + "profile."));
    if (s.sum) append(check(*s.sum, pre));
    if (s.differences) append(check(*s.differences, pre + "differences."));
    append(check(s.query, pre + "query."));

    if (s.mgf) {
        if (const auto* b = std::get_if<BinomialMgf>(&*s.mgf); b && !(b->p >= 0.0 && b->p <= 1.0))
            out.push_back({pre + "mgf.p", "0 <= p <= 1"});
        if (const auto* e = std::get_if<BernoulliEboundMgf>(&*s.mgf); e && !(e->np > 0.0))
            out.push_back({pre + "mgf.np", "np > 0"});
    }
    if (s.oracle) {
        std::visit(overloaded{
                       [&](const ExactBinomialOracle& e) {
                           if (!(e.p >= 0.0 && e.p <= 1.0)) out.push_back({pre + "oracle.exact_binomial.p", "0 <= p <= 1"});
                       },
                       [&](const SamplerSpec& sp) { append(check(sp, pre + "oracle.sampler.")); },
                   },
                   *s.oracle);
    }

    if (s.applicable.empty()) out.push_back({pre + "applicable", "must list at least one method"});
    for (std::size_t i = 0; i < s.applicable.size(); ++i) {
        const auto& m = s.applicable[i];
        const auto field = pre + "applicable[" + std::to_string(i) + "]";
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
            out.push_back({field, "unknown method '" + m + "'"});
            continue;
        }
        if (std::count(s.applicable.begin(), s.applicable.end(), m) > 1)
            out.push_back({field, "method '" + m + "' listed twice"});
        if (auto why = missing_data(s, m); !why.empty()) out.push_back({field, m + " " + why});
    }
    for (std::size_t i = 0; i < s.expected.size(); ++i) {
        const auto& e = s.expected[i];
        const auto field = pre + "expected[" + std::to_string(i) + "]";
        if (std::find(s.applicable.begin(), s.applicable.end(), e.method) == s.applicable.end())
            out.push_back({field + ".method", "'" + e.method + "' is not in applicable"});
        if (!(e.value >= 0.0 && e.value <= 1.0)) out.push_back({field + ".value", "0 <= value <= 1"});
        if (!(e.tolerance >= 0.0)) out.push_back({field + ".tolerance", "tolerance >= 0"});
    }
    return out;
}

BoundResult evaluate_method(const Scenario& s, std::string_view method) {
    if (auto why = missing_data(s, method); !why.empty()) throw std::invalid_argument(std::string(method) + ": " + why);

    if (method == "markov") return markov(*s.profile, level_of(s, Direction::upper, "markov"));
    if (method == "reverse_markov") return reverse_markov(*s.profile, level_of(s, Direction::lower, "reverse_markov"));
    if (method == "chebyshev") return chebyshev(*s.profile, deviation_of(s, "chebyshev"), false);
    if (method == "chebyshev_symmetric") {
        require(s.query.direction != Direction::two_sided,
                "chebyshev_symmetric: one-sided query required (use chebyshev for two-sided)");
        return chebyshev(*s.profile, deviation_of(s, "chebyshev_symmetric"), true);
    }
    if (method == "chernoff") return chernoff_optimize(make_mgf(*s.mgf), level_of(s, Direction::upper, "chernoff"));
    if (method == "chernoff_bernoulli") {
        const double a = level_of(s, Direction::upper, "chernoff_bernoulli");
        const double np = s.profile->mean;
        require(np > 0.0, "chernoff_bernoulli: mean must be > 0");
        return chernoff_bernoulli(np, a / np - 1.0);
    }
    if (method == "chernoff_binomial_two_sided") {
        const double mu = s.profile->mean;
        require(mu > 0.0, "chernoff_binomial_two_sided: mean must be > 0");
        return chernoff_binomial_two_sided(mu, deviation_of(s, "chernoff_binomial_two_sided") / mu);
    }
    if (method == "hoeffding") return hoeffding_tail(*s.sum, s.query);
    if (method == "bennett") {
        const auto& vars = s.sum->vars;
        double s_up = 0.0;
        double s_down = 0.0;
        for (const auto& v : vars) {
            s_up = std::max(s_up, v.hi - *v.mean);
            s_down = std::max(s_down, *v.mean - v.lo);
        }
        double scale = s_up;
        if (s.query.direction == Direction::lower) scale = s_down;
        if (s.query.direction == Direction::two_sided) scale = std::max(s_up, s_down);
        return bennett(s.sum->n(), s.sum->mean_variance(), scale, sum_query(s, "bennett"));
    }
    if (method == "bernstein") return bernstein(s.sum->n(), s.sum->mean_variance(), sum_query(s, "bernstein"));
    if (method == "azuma") return azuma(*s.differences, deviation_of(s, "azuma"), s.query.direction);
    if (method == "mcdiarmid") return mcdiarmid(*s.differences, deviation_of(s, "mcdiarmid"), s.query.direction);
    throw std::invalid_argument("unknown method '" + std::string(method) + "'");
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

bool ComparisonTable::has_errors() const noexcept {
    return std::any_of(omitted.begin(), omitted.end(), [](const Omission& o) { return o.error; });
}

bool ComparisonTable::regression_ok() const noexcept {
    return std::all_of(regression.begin(), regression.end(), [](const RegressionCheck& r) { return r.pass; });
}

const BoundResult* ComparisonTable::row(std::string_view method) const noexcept {
    for (const auto& r : rows)
        if (r.method == method) return &r;
    return nullptr;
}

ComparisonTable compare_bounds(const Scenario& s, std::optional<double> tolerance_override) {
    ComparisonTable table;
    table.scenario = s.name;
    for (const auto& method : known_methods()) {
        const bool declared = std::find(s.applicable.begin(), s.applicable.end(), method) != s.applicable.end();
        if (!declared) {
            auto why = missing_data(s, method);
            table.omitted.push_back({method, why.empty() ? "not declared applicable" : why, false});
            continue;
        }
        try {
            table.rows.push_back(rename(evaluate_method(s, method), method));
        } catch (const std::exception& e) {
            table.omitted.push_back({method, e.what(), true});
        }
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const BoundResult& a, const BoundResult& b) {
        if (a.log_value != b.log_value) return a.log_value < b.log_value;
        return a.method < b.method;
    });

    if (s.oracle)
        if (const auto* exact = std::get_if<ExactBinomialOracle>(&*s.oracle))
            table.exact_oracle = exact_oracle_value(*exact, s.query);

    for (const auto& e : s.expected) {
        RegressionCheck rc;
        rc.method = e.method;
        rc.expected = e.value;
        rc.tolerance = tolerance_override.value_or(e.tolerance);
        rc.relative = tolerance_override ? false : e.relative;
        rc.note = e.note;
        if (const auto* r = table.row(e.method)) {
            rc.actual = r->value;
            const double err = std::abs(r->value - e.value);
            rc.pass = rc.relative ? err <= rc.tolerance * std::abs(e.value) : err <= rc.tolerance;
        } else {
            rc.actual = std::numeric_limits<double>::quiet_NaN();
            rc.pass = false;
        }
        table.regression.push_back(rc);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Soundness
// ---------------------------------------------------------------------------

double exact_oracle_value(const ExactBinomialOracle& oracle, const TailQuery& query) {
    const double nn = static_cast<double>(oracle.n);
    const double mu = nn * oracle.p;
    double t = query.threshold;
    if (query.threshold_kind == ThresholdKind::mean_deviation) t *= nn;

    auto upper_from = [&](double a) {
        const double k = std::ceil(a - 1e-12 * std::max(1.0, std::abs(a)));
        if (k <= 0.0) return 1.0;
        if (k > nn) return 0.0;
        return exact_binomial_tail(oracle.n, oracle.p, static_cast<std::uint64_t>(k), Direction::upper);
    };
    auto lower_from = [&](double a) {
        const double k = std::floor(a + 1e-12 * std::max(1.0, std::abs(a)));
        if (k < 0.0) return 0.0;
        if (k >= nn) return 1.0;
        return exact_binomial_tail(oracle.n, oracle.p, static_cast<std::uint64_t>(k), Direction::lower);
    };

    if (query.threshold_kind == ThresholdKind::absolute_level) {
        switch (query.direction) {
            case Direction::upper: return upper_from(query.threshold);
            case Direction::lower: return lower_from(query.threshold);
            case Direction::two_sided: return exact_binomial_deviation(oracle.n, oracle.p, std::abs(query.threshold - mu));
        }
    }
    switch (query.direction) {
        case Direction::upper: return upper_from(mu + t);
        case Direction::lower: return lower_from(mu - t);
        case Direction::two_sided: return exact_binomial_deviation(oracle.n, oracle.p, std::max(t, 0.0));
    }
    return 1.0;
}

bool SoundnessReport::passed() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const SoundnessRow& r) { return r.pass; }) &&
           std::none_of(omitted.begin(), omitted.end(), [](const Omission& o) { return o.error; });
}

SoundnessReport soundness_check(const Scenario& s, std::uint64_t samples, std::uint64_t seed,
                                const McOptions& options) {
    if (!s.oracle) throw std::invalid_argument("soundness_check: scenario '" + s.name + "' has no oracle");
    const auto table = compare_bounds(s);

    SoundnessReport report;
    report.scenario = s.name;
    for (const auto& o : table.omitted)
        if (o.error) report.omitted.push_back(o);

    double floor_value = 0.0;
    if (const auto* exact = std::get_if<ExactBinomialOracle>(&*s.oracle)) {
        report.exact = true;
        report.oracle_point = exact_oracle_value(*exact, s.query);
        report.ci_lo = report.ci_hi = report.oracle_point;
        floor_value = report.oracle_point;
    } else {
        const auto est = mc_tail_estimate(std::get<SamplerSpec>(*s.oracle), s.query, samples, seed, options);
        report.oracle_point = est.point;
        report.ci_lo = est.ci_lo;
        report.ci_hi = est.ci_hi;
        report.samples = est.samples;
        report.seed = est.seed;
        floor_value = est.ci_lo;  // point - (point - ci_lo)
    }
    for (const auto& r : table.rows) report.rows.push_back({r.method, r.value, r.value >= floor_value});
    return report;
}

}  // namespace tailbound
