#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tailbound/oracle.hpp"

namespace tailbound {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double pattern_probability(const Distribution& dist, const std::vector<double>& pattern) {
    const auto* cat = std::get_if<Categorical>(&dist);
    if (cat == nullptr) return std::numeric_limits<double>::quiet_NaN();
    double prob = 1.0;
    for (double symbol : pattern) {
        double w = 0.0;
        for (std::size_t i = 0; i < cat->values.size(); ++i)
            if (cat->values[i] == symbol) w += cat->weights[i];
        prob *= w;
    }
    return prob;
}

std::size_t count_occurrences(std::span<const double> xs, const std::vector<double>& pattern) {
    const std::size_t k = pattern.size();
    if (k == 0 || xs.size() < k) return 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + k <= xs.size(); ++i)
        if (std::equal(pattern.begin(), pattern.end(), xs.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
    return count;
}

// L1 distance between the Uniform(lo, hi) density and the box-kernel estimate
// (1/(2nh)) #{i : |x - X_i| <= h}. Both are piecewise constant, so a sweep
// over the sorted breakpoints integrates exactly.
double kde_box_l1(std::span<const double> xs, double lo, double hi, double h) {
    const double n = static_cast<double>(xs.size());
    const double density = 1.0 / (hi - lo);
    const double bump = 1.0 / (2.0 * n * h);

    std::vector<std::pair<double, int>> events;
    events.reserve(2 * xs.size());
    for (double x : xs) {
        events.emplace_back(x - h, +1);
        events.emplace_back(x + h, -1);
    }
    std::sort(events.begin(), events.end());

    std::vector<double> cuts;
    cuts.reserve(events.size() + 2);
    for (const auto& e : events) cuts.push_back(e.first);
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    std::size_t next_event = 0;
    int active = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        while (next_event < events.size() && events[next_event].first <= a) active += events[next_event++].second;
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        const double truth = (mid >= lo && mid <= hi) ? density : 0.0;
        total += std::abs(truth - bump * active) * (b - a);
    }
    // Mass of the uniform density outside the breakpoint range is covered by
    // the lo/hi cuts, and the estimate vanishes there.
    return total;
}

double ks_uniform(std::span<const double> xs, double lo, double hi) {
    std::vector<double> u(xs.begin(), xs.end());
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double f = std::clamp((u[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

const std::vector<double>& param(const std::map<std::string, std::vector<double>>& params, const std::string& key,
                                 const std::string& who) {
    auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument(who + ": missing parameter '" + key + "'");
    return it->second;
}

}  // namespace

double distribution_mean(const Distribution& d) {
    return std::visit(overloaded{
                          [](const Bernoulli& b) { return b.p; },
                          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                          [](const TwoPoint& t) { return t.p * t.x1 + (1.0 - t.p) * t.x2; },
                          [](const Categorical& c) {
                              return std::inner_product(c.values.begin(), c.values.end(), c.weights.begin(), 0.0);
                          },
                      },
                      d);
}

double draw(const Distribution& d, Xoshiro256& rng) {
    const double u = rng.uniform();
    return std::visit(overloaded{
                          [u](const Bernoulli& b) { return u < b.p ? 1.0 : 0.0; },
                          [u](const Uniform& un) { return un.lo + (un.hi - un.lo) * u; },
                          [u](const TwoPoint& t) { return u < t.p ? t.x1 : t.x2; },
                          [u](const Categorical& c) {
                              double acc = 0.0;
                              for (std::size_t i = 0; i + 1 < c.values.size(); ++i) {
                                  acc += c.weights[i];
                                  if (u < acc) return c.values[i];
                              }
                              return c.values.back();
                          },
                      },
                      d);
}

CustomAggregate make_custom_aggregate(const std::string& name,
                                      const std::map<std::string, std::vector<double>>& params,
                                      const Distribution& dist, std::size_t n) {
    if (n == 0) throw std::invalid_argument("custom aggregate: n must be >= 1");
    const double nn = static_cast<double>(n);
    CustomAggregate agg;
    agg.name = name;
    agg.params = params;

    if (name == "pattern_count") {
        const auto& pattern = param(params, "pattern", name);
        if (pattern.empty() || pattern.size() > n)
            throw std::invalid_argument("pattern_count: pattern length must lie in [1, n]");
        if (!std::holds_alternative<Categorical>(dist))
            throw std::invalid_argument("pattern_count: needs a categorical distribution");
        agg.fn = [pattern](std::span<const double> xs) { return static_cast<double>(count_occurrences(xs, pattern)); };
        agg.c.assign(n, static_cast<double>(pattern.size()));
        agg.mean = static_cast<double>(n - pattern.size() + 1) * pattern_probability(dist, pattern);
        return agg;
    }
    if (name == "kde_l1" || name == "ks_uniform") {
        const auto* uni = std::get_if<Uniform>(&dist);
        if (uni == nullptr) throw std::invalid_argument(name + ": needs a uniform distribution");
        const double lo = uni->lo;
        const double hi = uni->hi;
        if (!(hi > lo)) throw std::invalid_argument(name + ": uniform range must be non-degenerate");
        if (name == "kde_l1") {
            double h = std::pow(nn, -0.2) * (hi - lo);
            if (auto it = params.find("bandwidth"); it != params.end()) {
                if (it->second.size() != 1 || !(it->second[0] > 0.0))
                    throw std::invalid_argument("kde_l1: bandwidth must be a single positive number");
                h = it->second[0];
            }
            agg.fn = [lo, hi, h](std::span<const double> xs) { return kde_box_l1(xs, lo, hi, h); };
            agg.c.assign(n, 2.0 / nn);
        } else {
            agg.fn = [lo, hi](std::span<const double> xs) { return ks_uniform(xs, lo, hi); };
            agg.c.assign(n, 1.0 / nn);
        }
        for (const auto& [key, _] : params)
            if (key != "bandwidth" || name != "kde_l1")
                throw std::invalid_argument(name + ": unknown parameter '" + key + "'");
        return agg;
    }
    throw std::invalid_argument("unknown custom aggregate '" + name + "' (pattern_count|kde_l1|ks_uniform)");
}

double SamplerSpec::reduce(std::span<const double> draws) const {
    switch (aggregate) {
        case AggregateKind::sum: return std::accumulate(draws.begin(), draws.end(), 0.0);
        case AggregateKind::mean:
            return std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
        case AggregateKind::max: return *std::max_element(draws.begin(), draws.end());
        case AggregateKind::custom:
            if (!custom || !custom->fn) throw std::logic_error("sampler: custom aggregate has no function");
            return custom->fn(draws);
    }
    return 0.0;
}

std::optional<double> SamplerSpec::center() const {
    switch (aggregate) {
        case AggregateKind::sum: return static_cast<double>(n) * distribution_mean(dist);
        case AggregateKind::mean: return distribution_mean(dist);
        case AggregateKind::max: return std::nullopt;
        case AggregateKind::custom: return custom ? custom->mean : std::nullopt;
    }
    return std::nullopt;
}

ViolationReport check(const SamplerSpec& s, std::string_view prefix) {
    ViolationReport out;
    const std::string pre(prefix);
    if (s.n < 1) out.push_back({pre + "n", "n >= 1"});
    std::visit(overloaded{
                   [&](const Bernoulli& b) {
                       if (!(b.p >= 0.0 && b.p <= 1.0)) out.push_back({pre + "distribution.p", "0 <= p <= 1"});
                   },
                   [&](const Uniform& u) {
                       if (!(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo <= u.hi))
                           out.push_back({pre + "distribution.lo, " + pre + "distribution.hi", "finite and lo <= hi"});
                   },
                   [&](const TwoPoint& t) {
                       if (!(t.p >= 0.0 && t.p <= 1.0)) out.push_back({pre + "distribution.p", "0 <= p <= 1"});
                       if (!(std::isfinite(t.x1) && std::isfinite(t.x2)))
                           out.push_back({pre + "distribution.x1, " + pre + "distribution.x2", "must be finite"});
                   },
                   [&](const Categorical& c) {
                       if (c.values.empty() || c.values.size() != c.weights.size())
                           out.push_back({pre + "distribution.values, " + pre + "distribution.weights",
                                          "non-empty and of equal length"});
                       double total = 0.0;
                       for (double w : c.weights) {
                           if (!(w >= 0.0)) out.push_back({pre + "distribution.weights", "weights >= 0"});
                           total += w;
                       }
                       if (std::abs(total - 1.0) > 1e-9)
                           out.push_back({pre + "distribution.weights", "weights sum to 1"});
                   },
               },
               s.dist);
    if (s.aggregate == AggregateKind::custom) {
        if (!s.custom) {
            out.push_back({pre + "aggregate", "custom aggregate missing"});
        } else {
            if (s.custom->c.size() != s.n)
                out.push_back({pre + "aggregate.c", "custom aggregate must declare one c_i per variable"});
            for (double ci : s.custom->c)
                if (!(ci > 0.0)) out.push_back({pre + "aggregate.c", "c_i > 0"});
        }
    }
    return out;
}

}  // namespace tailbound
