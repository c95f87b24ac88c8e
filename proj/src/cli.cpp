#include "tailbound/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "tailbound/report.hpp"
#include "tailbound/scenarios.hpp"

namespace tailbound {

namespace {

enum Exit { kOk = 0, kCompute = 1, kUsage = 2, kUnsound = 3 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BoundArgs {
    std::string method;
    std::optional<double> mean, variance, lo, hi, p, np, value, c, at, t, eps, delta;
    std::optional<std::uint64_t> n;
    std::string mgf;
    std::string direction;
};

template <typename T>
const T& need(const std::optional<T>& v, const char* flag, const std::string& method) {
    if (!v) throw UsageError("bound " + method + ": " + flag + " is required");
    return *v;
}

bool is_one_of(const std::string& m, std::initializer_list<const char*> names) {
    for (const char* n : names)
        if (m == n) return true;
    return false;
}

// Translates the flat flag set of `bound <method>` into a one-method scenario.
Scenario bound_scenario(const BoundArgs& a) {
    const auto& m = a.method;
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
        std::string list;
        for (const auto& k : known_methods()) list += (list.empty() ? "" : "|") + k;
        throw UsageError("unknown method '" + m + "' (" + list + ")");
    }

    Scenario s;
    s.name = "bound";
    s.applicable = {m};
    s.query.direction = m == "reverse_markov" ? Direction::lower : Direction::upper;
    if (!a.direction.empty()) {
        try {
            s.query.direction = parse_direction(a.direction);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    const int thresholds = int(a.at.has_value()) + int(a.t.has_value()) + int(a.eps.has_value()) + int(a.delta.has_value());
    if (thresholds != 1) throw UsageError("bound " + m + ": give exactly one of --at, --t, --eps, --delta");

    std::optional<double> center;
    if (is_one_of(m, {"markov", "reverse_markov", "chebyshev", "chebyshev_symmetric", "chernoff_bernoulli",
                      "chernoff_binomial_two_sided"})) {
        s.kind = ScenarioKind::moment;
        const double mean = need(a.mean, "--mean", m);
        const bool nonneg = a.lo ? *a.lo >= 0.0 : mean >= 0.0;
        s.profile = MomentProfile{mean, a.variance, a.lo, a.hi, nonneg};
        center = mean;
    } else if (m == "chernoff") {
        s.kind = ScenarioKind::moment;
        if (a.mgf == "binomial") {
            const auto n = need(a.n, "--n", m);
            const double p = need(a.p, "--p", m);
            s.mgf = BinomialMgf{n, p};
            center = static_cast<double>(n) * p;
        } else if (a.mgf == "bernoulli-ebound") {
            s.mgf = BernoulliEboundMgf{need(a.np, "--np", m)};
            center = *a.np;
        } else if (a.mgf == "constant") {
            s.mgf = ConstantMgf{need(a.value, "--value", m)};
            center = *a.value;
        } else {
            throw UsageError("bound chernoff: --mgf binomial|bernoulli-ebound|constant is required");
        }
        // Every mgf family here has a known mean, which lets deviations convert to a level.
        s.profile = MomentProfile{*center, std::nullopt, std::nullopt, std::nullopt, false};
    } else if (is_one_of(m, {"hoeffding", "bennett", "bernstein"})) {
        s.kind = ScenarioKind::bounded_sum;
        const auto n = need(a.n, "--n", m);
        s.sum = BoundedSumSpec::identical(n, BoundedVar{need(a.lo, "--lo", m), need(a.hi, "--hi", m), a.mean, a.variance});
        if (a.mean) center = static_cast<double>(n) * *a.mean;
    } else {
        s.kind = m == "azuma" ? ScenarioKind::martingale : ScenarioKind::bounded_difference;
        s.differences = MartingaleDifferenceSpec::uniform(need(a.n, "--n", m), need(a.c, "--c", m));
        if (a.eps) throw UsageError("bound " + m + ": use --t for the deviation of the function value");
    }

    if (a.at) {
        s.query.threshold_kind = ThresholdKind::absolute_level;
        s.query.threshold = *a.at;
    } else if (a.t) {
        s.query.threshold_kind = ThresholdKind::sum_deviation;
        s.query.threshold = *a.t;
    } else if (a.eps) {
        s.query.threshold_kind = ThresholdKind::mean_deviation;
        s.query.threshold = *a.eps;
    } else {
        if (!center) throw UsageError("bound " + m + ": --delta needs a known mean");
        s.query.threshold_kind = ThresholdKind::absolute_level;
        s.query.threshold = *center * (1.0 + *a.delta);
    }
    return s;
}

Scenario pick_scenario(const std::string& builtin, const std::string& file) {
    if (builtin.empty() == file.empty()) throw UsageError("give exactly one of --builtin or --file");
    if (!builtin.empty()) {
        try {
            return builtin_scenario(builtin);
        } catch (const std::out_of_range& e) {
            throw UsageError(e.what());
        }
    }
    return load_scenario_file(file);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tail-probability bounds: compute, compare against exact and simulated oracles."};
    app.name("tailbound");
    app.require_subcommand(1);

    std::string format_text = "human";
    std::optional<double> tolerance;
    app.add_option("--format", format_text, "Output format: human, csv or json")
        ->check(CLI::IsMember({"human", "csv", "json"}));
    app.add_option("--tolerance", tolerance, "Absolute tolerance overriding each expected value's own");

    BoundArgs ba;
    auto* bound = app.add_subcommand("bound", "Evaluate one bound from flags");
    bound->add_option("method", ba.method, "Method identifier")->required();
    bound->add_option("--mean", ba.mean, "Mean (per variable for hoeffding/bennett/bernstein)");
    bound->add_option("--variance", ba.variance, "Variance (per variable for sum methods)");
    bound->add_option("--lo", ba.lo, "Lower end of the support");
    bound->add_option("--hi,--max", ba.hi, "Upper end of the support");
    bound->add_option("--n", ba.n, "Number of variables or steps");
    bound->add_option("--p", ba.p, "Success probability for --mgf binomial");
    bound->add_option("--np", ba.np, "Mean for --mgf bernoulli-ebound");
    bound->add_option("--value", ba.value, "Constant for --mgf constant");
    bound->add_option("--c", ba.c, "Per-step difference bound for azuma/mcdiarmid");
    bound->add_option("--mgf", ba.mgf, "binomial | bernoulli-ebound | constant");
    bound->add_option("--direction", ba.direction, "upper | lower | two-sided");
    bound->add_option("--at", ba.at, "Absolute level a");
    bound->add_option("--t", ba.t, "Deviation of the sum (or function value) from its mean");
    bound->add_option("--eps", ba.eps, "Deviation of the sample mean from its mean");
    bound->add_option("--delta", ba.delta, "Relative deviation: level = mean * (1 + delta)");

    std::string builtin;
    std::string file;
    auto* compare = app.add_subcommand("compare", "Run every applicable bound on a scenario");
    compare->add_option("--builtin", builtin, "Builtin scenario name");
    compare->add_option("--file", file, "Scenario JSON file");

    double alpha = 0.0;
    double half_width = 0.0;
    auto* samplesize = app.add_subcommand("samplesize", "Two-sided Hoeffding sample size for a [0,1] mean");
    samplesize->add_option("--alpha", alpha, "Allowed failure probability")->required();
    samplesize->add_option("--half-width", half_width, "Half-width of the interval")->required();

    std::uint64_t samples = 100'000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    auto* verify = app.add_subcommand("verify", "Check every bound of a scenario against its oracle");
    verify->add_option("--builtin", builtin, "Builtin scenario name");
    verify->add_option("--file", file, "Scenario JSON file");
    verify->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();
    verify->add_option("--seed", seed, "Master seed")->capture_default_str();
    verify->add_option("--workers", workers, "Worker threads (0 = all cores); does not affect results");

    std::string export_dir;
    auto* catalog = app.add_subcommand("catalog", "List builtin scenarios");
    catalog->add_option("--export", export_dir, "Also write each builtin as <dir>/<name>.json");

    for (auto* sub : {bound, compare, samplesize, verify, catalog}) sub->fallthrough();

    std::vector<std::string> argv_store{"tailbound"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const Format format = parse_format(format_text);

        if (bound->parsed()) {
            const Scenario s = bound_scenario(ba);
            validate(s);
            out << render_bound(evaluate_method(s, ba.method), format);
            return kOk;
        }
        if (compare->parsed()) {
            const auto table = compare_bounds(pick_scenario(builtin, file), tolerance);
            out << render_comparison(table, format);
            return table.has_errors() || !table.regression_ok() ? kCompute : kOk;
        }
        if (samplesize->parsed()) {
            SampleSizeResult r{alpha, half_width, hoeffding_sample_size(alpha, half_width), 0.0};
            r.achieved_alpha = 2.0 * std::exp(-2.0 * static_cast<double>(r.n) * half_width * half_width);
            out << render_sample_size(r, format);
            return kOk;
        }
        if (verify->parsed()) {
            McOptions opts;
            opts.workers = workers;
            const auto report = soundness_check(pick_scenario(builtin, file), samples, seed, opts);
            out << render_soundness(report, format);
            return report.passed() ? kOk : kUnsound;
        }
        if (catalog->parsed()) {
            const auto all = builtin_catalog();
            if (!export_dir.empty()) {
                std::filesystem::create_directories(export_dir);
                for (const auto& s : all) {
                    std::ofstream f(std::filesystem::path(export_dir) / (s.name + ".json"), std::ios::binary);
                    f << dump_scenario(s);
                    if (!f) throw std::runtime_error("cannot write scenario file for '" + s.name + "'");
                }
            }
            out << render_catalog(all, format);
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ScenarioError::Kind::invariant ? kCompute : kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kCompute;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kCompute;
    }
    return kUsage;
}

}  // namespace tailbound
