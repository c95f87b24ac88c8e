// oracle.hpp
//
// Ground truth for the bounds: exact binomial tails and seeded Monte Carlo
// estimates of tail probabilities and of the two sides of the Efron-Stein
// inequality.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailbound/model.hpp"
#include "tailbound/rng.hpp"

namespace tailbound {

// ---------------------------------------------------------------------------
// Exact binomial tails
// ---------------------------------------------------------------------------

/// Pr[X >= k] (upper), Pr[X <= k] (lower) or Pr[|X - np| >= |k - np|]
/// (two-sided) for X ~ Binomial(n, p).
///
/// Mass terms come from one lgamma evaluation followed by the ratio
/// recurrence pmf(j+1)/pmf(j) = (n-j)/(j+1) * p/(1-p), summed from the tail
/// end toward the mode in the log domain. The larger tail is obtained as the
/// complement of the smaller one.
double exact_binomial_tail(std::uint64_t n, double p, std::uint64_t k, Direction direction);

/// Pr[|X - np| >= d] for real d >= 0.
double exact_binomial_deviation(std::uint64_t n, double p, double d);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

struct Bernoulli {
    double p{0.5};
    friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

struct Uniform {
    double lo{0.0};
    double hi{1.0};
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// x1 with probability p, x2 otherwise.
struct TwoPoint {
    double x1{0.0};
    double p{0.5};
    double x2{1.0};
    friend bool operator==(const TwoPoint&, const TwoPoint&) = default;
};

struct Categorical {
    std::vector<double> values;
    std::vector<double> weights;
    friend bool operator==(const Categorical&, const Categorical&) = default;
};

using Distribution = std::variant<Bernoulli, Uniform, TwoPoint, Categorical>;

double distribution_mean(const Distribution& d);
double draw(const Distribution& d, Xoshiro256& rng);

enum class AggregateKind { sum, mean, max, custom };

/// A function of the n draws with the bounded-difference property.
struct CustomAggregate {
    std::string name;
    std::map<std::string, std::vector<double>> params;
    std::function<double(std::span<const double>)> fn;
    std::vector<double> c;            // declared bounded-difference constants
    std::optional<double> mean;       // analytic E[Z] when known

    friend bool operator==(const CustomAggregate& a, const CustomAggregate& b) {
        return a.name == b.name && a.params == b.params;
    }
};

/// Builds a registered custom aggregate for n draws from `dist`.
///
///   pattern_count  occurrences of params["pattern"] in the draw sequence
///                  (categorical codes); c_i = pattern length.
///   kde_l1         L1 distance between the Uniform(lo, hi) density and a
///                  box-kernel density estimate, bandwidth params["bandwidth"]
///                  or n^(-1/5) scaled by (hi - lo); c_i = 2/n.
///   ks_uniform     sup_x |F_n(x) - F(x)| over half-lines for Uniform(lo, hi)
///                  draws; c_i = 1/n.
CustomAggregate make_custom_aggregate(const std::string& name,
                                      const std::map<std::string, std::vector<double>>& params,
                                      const Distribution& dist, std::size_t n);

/// Independent copies of one distribution reduced by an aggregate.
struct SamplerSpec {
    Distribution dist;
    std::size_t n{1};
    AggregateKind aggregate{AggregateKind::sum};
    std::optional<CustomAggregate> custom;

    double reduce(std::span<const double> draws) const;
    /// Analytic mean of the aggregate, when one is available.
    std::optional<double> center() const;

    friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

ViolationReport check(const SamplerSpec& s, std::string_view prefix = "");

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct McOptions {
    unsigned workers{0};                      // 0 = hardware concurrency
    std::uint64_t max_samples{10'000'000};
    double z{kZ99};
};

struct TailEstimate {
    double point{0.0};
    double ci_lo{0.0};
    double ci_hi{1.0};
    std::uint64_t hits{0};
    std::uint64_t samples{0};
    std::uint64_t seed{0};
    double center{0.0};  // mean of the aggregate used for deviation events

    friend bool operator==(const TailEstimate&, const TailEstimate&) = default;
};

struct WilsonInterval {
    double lo;
    double hi;
};

/// Wilson score interval for `hits` successes out of `n` trials.
WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ99);

/// Empirical frequency of `query` on the aggregate. Deviation events are
/// measured from the sampler's analytic center when it has one, otherwise
/// from the sample mean of the same draws (a first pass over the same
/// chunks). Mean-deviation thresholds are scaled by n for sum aggregates
/// and used as-is for every other aggregate.
TailEstimate mc_tail_estimate(const SamplerSpec& sampler, const TailQuery& query, std::uint64_t samples,
                              std::uint64_t seed, const McOptions& options = {});

enum class EfronSteinMode {
    conditional,  // E_i Z from `inner` re-draws of coordinate i
    paired,       // (1/2)(Z - Z'_i)^2 averaged over `inner` re-draws
};

struct EfronSteinEstimate {
    double var_est{0.0};
    double var_se{0.0};
    double var_half_width{0.0};
    double es_bound_est{0.0};
    double es_se{0.0};
    double es_half_width{0.0};
    std::uint64_t outer{0};
    std::uint64_t inner{0};
    EfronSteinMode mode{EfronSteinMode::conditional};

    friend bool operator==(const EfronSteinEstimate&, const EfronSteinEstimate&) = default;
};

/// Estimates Var(Z) and sum_i E[(Z - E_i Z)^2] for Z = sampler aggregate.
///
/// In conditional mode each E_i Z is the mean of `inner` fresh values of Z
/// with coordinate i re-drawn and the others held fixed. That plug-in is
/// biased upward by the factor (1 + 1/inner); the estimator multiplies by
/// inner/(inner + 1) to remove it. Paired mode is unbiased as is.
/// Intervals are normal approximations at options.z.
EfronSteinEstimate efron_stein_estimate(const SamplerSpec& sampler, std::uint64_t outer, std::uint64_t inner,
                                        std::uint64_t seed, EfronSteinMode mode = EfronSteinMode::conditional,
                                        const McOptions& options = {});

}  // namespace tailbound
