// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/cli.hpp"
#include "tailbound/oracle.hpp"
#include "tailbound/scenarios.hpp"

using namespace tailbound;

namespace {

// Values below were computed independently with mpmath at 50 digits.
constexpr double kLotteryChernoff = 1.672819404220223620507978e-17;  // exp(100 (1 - 2 ln 2))
constexpr double kCoinTwoSided = 0.031007707198018638;                // 2 exp(-100/24)
constexpr double kTwoExpMinusTwo = 0.2706705664732254;                // 2 exp(-2)

struct Outcome {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double row_value(const ComparisonTable& t, const char* method) {
    const auto* r = t.row(method);
    return r ? r->value : std::nan("");
}

Outcome worked_examples() {
    Outcome o;
    auto check = [&](const char* scenario, const char* method, double want) {
        const double got = row_value(compare_bounds(builtin_scenario(scenario)), method);
        o.require(close(got, want, 1e-9), std::string(scenario) + "/" + method + " = " + num(got) + ", want " + num(want));
    };
    check("weight", "markov", 0.5);
    check("marks", "reverse_markov", 0.5);
    check("iq", "markov", 0.4);
    check("iq", "chebyshev", 0.01);
    check("coin", "markov", 2.0 / 3.0);
    check("coin", "chebyshev", 0.04);
    check("coin", "chebyshev_symmetric", 0.02);
    check("coin", "chernoff_binomial_two_sided", kCoinTwoSided);
    check("empirical-process", "mcdiarmid", kTwoExpMinusTwo);
    return o;
}

Outcome portfolio_trio() {
    Outcome o;
    // (L, M, mu, sigma) per investment; target total payoff 130.
    const BoundedSumSpec spec{{BoundedVar{25.0, 65.0, 50.0, 25.0 * 25.0}, BoundedVar{60.0, 80.0, 70.0, 20.0 * 20.0}}};
    Scenario s = builtin_scenario("portfolio");
    s.sum = spec;
    s.query = {Direction::upper, ThresholdKind::absolute_level, 130.0};
    const auto t = compare_bounds(s);
    const double bennett = row_value(t, "bennett");
    const double bernstein = row_value(t, "bernstein");
    const double hoeffding = row_value(t, "hoeffding");
    o.require(close(bennett, 0.9545, 5e-4), "bennett = " + num(bennett));
    o.require(close(bernstein, 0.9525, 5e-4), "bernstein = " + num(bernstein));
    o.require(close(hoeffding, 0.9048, 5e-4), "hoeffding = " + num(hoeffding));
    return o;
}

Outcome lottery() {
    Outcome o;
    const auto r = chernoff_bernoulli(100.0, 1.0);
    const double rel = std::abs(r.value - kLotteryChernoff) / kLotteryChernoff;
    o.require(rel < 1e-12, "relative error " + num(rel));
    const double exact = exact_binomial_tail(1'000'000, 1e-4, 200, Direction::upper);
    o.require(exact <= r.value, "exact tail " + num(exact) + " exceeds bound " + num(r.value));
    return o;
}

Scenario binomial_scenario(std::uint64_t n, double p, double level) {
    const double nn = static_cast<double>(n);
    const double mu = nn * p;
    Scenario s;
    s.name = "binomial";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{mu, mu * (1.0 - p), 0.0, nn, true};
    s.sum = BoundedSumSpec::identical(n, BoundedVar{0.0, 1.0, p, p * (1.0 - p)});
    s.mgf = BinomialMgf{n, p};
    s.query = {Direction::upper, ThresholdKind::absolute_level, level};
    s.oracle = ExactBinomialOracle{n, p};
    s.applicable = {"markov", "chebyshev", "chernoff", "chernoff_bernoulli", "hoeffding", "bennett", "bernstein"};
    if (p == 0.5) s.applicable.push_back("chebyshev_symmetric");
    if ((level - mu) / mu <= 1.0) s.applicable.push_back("chernoff_binomial_two_sided");
    return s;
}

Outcome soundness_grid() {
    Outcome o;
    int pairs = 0;
    for (std::uint64_t n : {10, 20, 50, 100}) {
        for (double p : {0.1, 0.5}) {
            for (double frac : {0.6, 0.75, 0.9}) {
                const Scenario s = binomial_scenario(n, p, frac * static_cast<double>(n));
                const auto report = soundness_check(s, 1, 0);
                o.require(report.omitted.empty(), "method failed for n=" + std::to_string(n));
                o.require(report.rows.size() == s.applicable.size(), "missing rows for n=" + std::to_string(n));
                for (const auto& row : report.rows) {
                    ++pairs;
                    o.require(row.bound > report.oracle_point,
                              row.method + " at n=" + std::to_string(n) + " p=" + num(p) + " a=" + num(frac * n) +
                                  ": bound " + num(row.bound) + " <= exact " + num(report.oracle_point));
                }
            }
        }
    }
    if (o.pass) o.detail = std::to_string(pairs) + " (scenario, bound) pairs";
    return o;
}

Outcome dominance() {
    Outcome o;
    int grid = 0;
    const std::vector<std::uint64_t> ns{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    const std::vector<double> vars{0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.4, 0.6, 1.0};
    const std::vector<double> fracs{0.001, 0.01, 0.03, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
    for (auto n : ns)
        for (double v : vars)
            for (double f : fracs) {
                ++grid;
                const TailQuery q{Direction::upper, ThresholdKind::sum_deviation, f * static_cast<double>(n)};
                const double ben = bennett(n, v, 1.0, q).log_value;
                const double ber = bernstein(n, v, q).log_value;
                o.require(ben <= ber, "bennett > bernstein at n=" + std::to_string(n) + " v=" + num(v) + " f=" + num(f));
            }
    int points = 0;
    for (int i = 0; i <= 100000; ++i) {
        const double u = 100.0 * i / 100000.0;
        ++points;
        o.require(h_crescent(u) >= g_lower(u), "h < G at u=" + num(u));
    }
    if (o.pass) o.detail = std::to_string(grid) + " grid points, " + std::to_string(points) + " u values";
    return o;
}

Outcome chernoff_optimizer() {
    Outcome o;
    for (double np : {1.0, 10.0, 100.0}) {
        for (double delta : {0.1, 0.5, 1.0, 2.0}) {
            const double a = np * (1.0 + delta);
            const auto ebound = chernoff_optimize(bernoulli_sum_ebound_mgf(np), a);
            const double err = std::abs(*ebound.optimal_param - std::log1p(delta));
            o.require(err <= 1e-8, "t* off by " + num(err) + " at np=" + num(np) + " delta=" + num(delta));

            const auto n = static_cast<std::uint64_t>(np * 10.0);
            const auto exact = chernoff_optimize(binomial_mgf(n, 0.1), a);
            const auto closed = chernoff_bernoulli(np, delta);
            o.require(exact.log_value <= closed.log_value,
                      "exact-mgf bound above closed form at np=" + num(np) + " delta=" + num(delta));
        }
    }
    return o;
}

Outcome hoeffding_lemma() {
    Outcome o;
    Xoshiro256 rng(20240601);
    int checks = 0;
    for (int d = 0; d < 200; ++d) {
        const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
        const double lo = -5.0 + 10.0 * rng.uniform();
        const double width = 0.1 + 4.9 * rng.uniform();
        std::vector<double> xs(k);
        std::vector<double> ws(k);
        double wsum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            xs[i] = lo + width * rng.uniform();
            ws[i] = 0.05 + rng.uniform();
            wsum += ws[i];
        }
        xs[0] = lo;
        xs[1] = lo + width;
        double mean = 0.0;
        for (std::size_t i = 0; i < k; ++i) mean += ws[i] * xs[i];
        mean /= wsum;
        mean = std::clamp(mean, lo, lo + width);

        for (int j = -100; j <= 100; ++j) {
            const double lambda = j / 10.0;
            double mgf = 0.0;
            for (std::size_t i = 0; i < k; ++i) mgf += ws[i] * std::exp(lambda * xs[i]);
            mgf /= wsum;
            const double bound = hoeffding_lemma_bound(lambda, mean, lo, lo + width);
            ++checks;
            if (j == 0) {
                o.require(mgf == 1.0 && bound == 1.0, "no equality at lambda = 0 for distribution " + std::to_string(d));
            } else {
                o.require(mgf <= bound, "distribution " + std::to_string(d) + " lambda " + num(lambda) + ": " +
                                            num(mgf) + " > " + num(bound));
            }
        }
    }
    if (o.pass) o.detail = std::to_string(checks) + " (distribution, lambda) checks";
    return o;
}

Outcome sample_size() {
    Outcome o;
    struct Case {
        double alpha, t;
        std::uint64_t want;
    };
    for (const auto& c : {Case{0.05, 0.1, 185}, Case{0.01, 0.05, 1060}}) {
        const auto n = hoeffding_sample_size(c.alpha, c.t);
        o.require(n == c.want, "n = " + std::to_string(n) + ", want " + std::to_string(c.want));
        const auto spec = BoundedSumSpec::identical(n, BoundedVar{0.0, 1.0, std::nullopt, std::nullopt});
        const auto r = hoeffding_tail(spec, TailQuery{Direction::two_sided, ThresholdKind::mean_deviation, c.t});
        o.require(r.value <= c.alpha, "alpha' = " + num(r.value) + " exceeds " + num(c.alpha));
    }
    return o;
}

Outcome efron_stein() {
    Outcome o;
    McOptions opts;
    const Distribution u01 = Uniform{0.0, 1.0};

    const SamplerSpec sum10{u01, 10, AggregateKind::sum, std::nullopt};
    const auto es = efron_stein_estimate(sum10, 100'000, 10, 11, EfronSteinMode::conditional, opts);
    const double truth = 10.0 / 12.0;
    const double combined = std::sqrt(es.var_se * es.var_se + es.es_se * es.es_se);
    o.require(std::abs(es.var_est - truth) <= 3.0 * combined, "sum var_est " + num(es.var_est));
    o.require(std::abs(es.es_bound_est - truth) <= 3.0 * combined, "sum es_bound_est " + num(es.es_bound_est));

    auto ordered = [&](const std::string& label, const EfronSteinEstimate& e) {
        o.require(e.var_est <= e.es_bound_est + e.var_half_width + e.es_half_width,
                  label + ": var " + num(e.var_est) + " > es " + num(e.es_bound_est));
    };
    ordered("sum", es);

    const SamplerSpec max10{u01, 10, AggregateKind::max, std::nullopt};
    ordered("max", efron_stein_estimate(max10, 100'000, 10, 12, EfronSteinMode::conditional, opts));

    const SamplerSpec kde{u01, 100, AggregateKind::custom, make_custom_aggregate("kde_l1", {}, u01, 100)};
    const auto ek = efron_stein_estimate(kde, 2'000, 2, 13, EfronSteinMode::conditional, opts);
    ordered("kde", ek);
    o.require(ek.var_est <= 2.0 / 100.0 + ek.var_half_width, "kde var_est " + num(ek.var_est) + " > 2/n");
    return o;
}

Outcome determinism() {
    Outcome o;
    auto verify = [](const std::string& scenario, const std::string& format, const std::string& workers) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run({"verify", "--builtin", scenario, "--samples", "200000", "--seed", "99", "--workers", workers,
                              "--format", format},
                             out, err);
        return std::to_string(code) + "\n" + out.str();
    };
    for (const std::string scenario : {"empirical-process", "dna-small", "weight"}) {
        for (const std::string format : {"json", "csv"}) {
            const auto a = verify(scenario, format, "1");
            const auto b = verify(scenario, format, "1");
            const auto c = verify(scenario, format, "4");
            o.require(a == b, scenario + " " + format + ": repeated runs differ");
            o.require(a == c, scenario + " " + format + ": workers 1 and 4 differ");
            o.require(a.rfind("0\n", 0) == 0, scenario + " " + format + ": non-zero exit");
        }
    }
    return o;
}

Outcome reductions() {
    Outcome o;
    const std::vector<std::pair<double, double>> ranges{{0.0, 1.0}, {-2.0, 3.0}, {5.0, 5.5}, {-1.0, 1.0}, {10.0, 14.0}};
    BoundedSumSpec sum;
    MartingaleDifferenceSpec diffs;
    for (const auto& [a, b] : ranges) {
        sum.vars.push_back(BoundedVar{a, b, std::nullopt, std::nullopt});
        diffs.c.push_back(b - a);
    }
    for (double t : {0.5, 1.0, 2.0, 4.0, 7.5}) {
        for (Direction d : {Direction::upper, Direction::lower, Direction::two_sided}) {
            const double m = mcdiarmid(diffs, t, d).raw_log_value;
            const double h = hoeffding_tail(sum, TailQuery{d, ThresholdKind::sum_deviation, t}).raw_log_value;
            o.require(std::abs(std::exp(m) - std::exp(h)) <= 1e-12 * std::exp(h), "mcdiarmid != hoeffding at t=" + num(t));
        }
    }
    for (std::size_t n : {1, 10, 100, 1000})
        for (double c : {0.1, 1.0, 5.0})
            for (double t : {0.5, 3.0, 40.0}) {
                const double got = azuma(MartingaleDifferenceSpec::uniform(n, c), t, Direction::upper).raw_log_value;
                const double nd = static_cast<double>(n);
                const double want = -t * t / (2.0 * nd * c * c);
                o.require(std::abs(std::exp(got) - std::exp(want)) <= 1e-12 * std::exp(want), "azuma mismatch n=" + std::to_string(n) + " c=" + num(c) + " t=" + num(t) + " " + num(got) + " vs " + num(want));
            }
    for (std::uint64_t n : {1, 7, 100, 5000})
        for (double v : {0.01, 0.25, 2.0})
            for (double eps : {0.01, 0.1, 0.7}) {
                const double nd = static_cast<double>(n);
                const double mean_form = bernstein(n, v, {Direction::upper, ThresholdKind::mean_deviation, eps}).raw_log_value;
                const double sum_form = bernstein(n, v, {Direction::upper, ThresholdKind::sum_deviation, nd * eps}).raw_log_value;
                o.require(std::abs(mean_form - sum_form) <= 1e-12 * std::abs(sum_form), "bernstein forms differ");
            }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* label;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria{
        {"worked-example regression", worked_examples},
        {"portfolio bennett/bernstein/hoeffding", portfolio_trio},
        {"lottery chernoff vs exact tail", lottery},
        {"binomial soundness grid (strict)", soundness_grid},
        {"bennett <= bernstein, h >= G", dominance},
        {"chernoff optimizer t* and exact-mgf bound", chernoff_optimizer},
        {"hoeffding lemma on random distributions", hoeffding_lemma},
        {"hoeffding sample size", sample_size},
        {"efron-stein estimates", efron_stein},
        {"monte carlo determinism across runs and workers", determinism},
        {"reduction identities", reductions},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (!out.pass) ++failures;
        std::printf("%s %2zu %s%s%s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].label,
                    out.detail.empty() ? "" : "  -- ", out.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
