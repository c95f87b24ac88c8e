#include "tailbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tailbound {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

double two_sided_offset(Direction d) { return d == Direction::two_sided ? kLn2 : 0.0; }

std::optional<double> positive_or_none(double x) {
    if (x > 0.0 && std::isfinite(x)) return x;
    return std::nullopt;
}

// Sum-scale deviation carried by a query. Absolute levels are measured from
// `center`, which the caller supplies when it knows the mean of the sum.
double sum_deviation(const TailQuery& q, std::size_t n, std::optional<double> center, const char* who) {
    require(std::isfinite(q.threshold), std::string(who) + ": threshold must be finite");
    double t = 0.0;
    switch (q.threshold_kind) {
        case ThresholdKind::sum_deviation: t = q.threshold; break;
        case ThresholdKind::mean_deviation: t = static_cast<double>(n) * q.threshold; break;
        case ThresholdKind::absolute_level:
            require(center.has_value(), std::string(who) + ": absolute-level threshold needs the mean of the sum");
            switch (q.direction) {
                case Direction::upper: t = q.threshold - *center; break;
                case Direction::lower: t = *center - q.threshold; break;
                case Direction::two_sided: t = std::abs(q.threshold - *center); break;
            }
            break;
    }
    require(t >= 0.0, std::string(who) + ": deviation threshold must be >= 0 (got " + std::to_string(t) + ")");
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// MGF families
// ---------------------------------------------------------------------------

MgfHandle binomial_mgf(std::uint64_t n, double p) {
    require(p >= 0.0 && p <= 1.0, "binomial_mgf: p must lie in [0, 1]");
    const double nn = static_cast<double>(n);
    return MgfHandle{[nn, p](double t) {
                         if (t < 1.0) return nn * std::log1p(p * std::expm1(t));
                         // log(1 - p + p e^t) = t + log(p + (1-p) e^{-t})
                         return nn * (t + std::log1p((1.0 - p) * std::expm1(-t)));
                     },
                     std::numeric_limits<double>::infinity()};
}

MgfHandle bernoulli_sum_ebound_mgf(double np) {
    require(np > 0.0 && std::isfinite(np), "bernoulli_sum_ebound_mgf: np must be > 0");
    return MgfHandle{[np](double t) { return np * std::expm1(t); }, std::numeric_limits<double>::infinity()};
}

MgfHandle constant_mgf(double value) {
    return MgfHandle{[value](double t) { return value * t; }, std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------------------
// First and second moment bounds
// ---------------------------------------------------------------------------

BoundResult markov(const MomentProfile& profile, double a) {
    require(profile.nonnegative, "markov: the variable must be declared nonnegative");
    require(a > 0.0 && std::isfinite(a), "markov: level a must be > 0");
    require(profile.mean >= 0.0, "markov: mean must be >= 0");
    return BoundResult::from_log("markov", std::log(profile.mean) - std::log(a));
}

BoundResult reverse_markov(const MomentProfile& profile, double a) {
    require(profile.support_hi.has_value() && std::isfinite(*profile.support_hi),
            "reverse_markov: needs a finite support_hi (maximum value U)");
    const double u = *profile.support_hi;
    require(a < u, "reverse_markov: level a must be < support_hi");
    require(profile.mean <= u, "reverse_markov: mean exceeds support_hi");
    return BoundResult::from_log("reverse_markov", std::log(u - profile.mean) - std::log(u - a));
}

BoundResult chebyshev(const MomentProfile& profile, double a, bool symmetric) {
    require(profile.variance.has_value(), "chebyshev: needs a variance");
    require(a > 0.0 && std::isfinite(a), "chebyshev: deviation a must be > 0");
    const double two_sided = std::log(*profile.variance) - 2.0 * std::log(a);
    if (!symmetric) return BoundResult::from_log("chebyshev", two_sided);
    // Half of the clamped two-sided value; a symmetric law puts at most half
    // of Pr[|X - EX| >= a] on each side.
    return BoundResult::from_log("chebyshev_symmetric", std::min(two_sided, 0.0) - kLn2);
}

// ---------------------------------------------------------------------------
// Chernoff
// ---------------------------------------------------------------------------

namespace {

struct Exponent {
    const MgfHandle& mgf;
    double a;

    double operator()(double t) const {
        const double k = mgf.log_mgf(t);
        if (!std::isfinite(k))
            throw NumericError("chernoff_optimize: log-MGF is not finite at t = " + std::to_string(t));
        return k - t * a;
    }
};

// Five-point central difference; h is kept inside (0, cap).
double exponent_slope(const Exponent& g, double t, double cap) {
    double h = std::min(0.1 * t, 1e-3 * std::max(1.0, t));
    if (std::isfinite(cap)) h = std::min(h, 0.2 * (cap - t));
    return (-g(t + 2 * h) + 8 * g(t + h) - 8 * g(t - h) + g(t - 2 * h)) / (12 * h);
}

}  // namespace

BoundResult chernoff_optimize(const MgfHandle& mgf, double a) {
    require(static_cast<bool>(mgf.log_mgf), "chernoff_optimize: empty MGF handle");
    require(std::isfinite(a), "chernoff_optimize: threshold must be finite");
    require(mgf.t_domain_hi > 0.0, "chernoff_optimize: t_domain_hi must be > 0");

    const Exponent g{mgf, a};
    const double cap = std::isfinite(mgf.t_domain_hi) ? mgf.t_domain_hi * (1.0 - 1e-12)
                                                      : std::numeric_limits<double>::infinity();
    constexpr double kStart = 1e-6;
    constexpr double kFarT = 1e12;  // beyond this the exponent is past any representable bound

    // Bracket [lo, hi] around the minimizer; g(0) = 0 for every log-MGF.
    double lo = 0.0;
    double mid = std::min(kStart, 0.5 * cap);
    double g_mid = g(mid);
    double hi = mid;
    bool boundary_hi = false;
    if (g_mid >= 0.0) {
        hi = mid;
        mid = 0.5 * hi;
    } else {
        for (;;) {
            const double next = std::min(2.0 * mid, cap);
            if (next <= mid || next > kFarT) {
                hi = mid;
                boundary_hi = true;
                break;
            }
            const double g_next = g(next);
            if (g_next >= g_mid) {
                hi = next;
                break;
            }
            lo = mid;
            mid = next;
            g_mid = g_next;
        }
    }

    double t_best = hi;
    double g_best = 0.0;
    if (boundary_hi) {
        t_best = hi;
        g_best = g(hi);
    } else {
        // Golden-section on [lo, hi].
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = g(x1);
        double f2 = g(x2);
        for (int iter = 0; iter < 400; ++iter) {
            const double scale = std::max({std::abs(f1), std::abs(f2), 1e-300});
            if (std::abs(f1 - f2) <= 1e-10 * scale && (hi - lo) <= 1e-10 * std::max(hi, 1e-300)) break;
            if ((hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = g(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = g(x2);
            }
        }
        if (f1 <= f2) {
            t_best = x1;
            g_best = f1;
        } else {
            t_best = x2;
            g_best = f2;
        }

        // Polish: bisection on the slope, inside a window that straddles a sign change.
        double w = std::max(hi - lo, 1e-7 * t_best);
        double left = t_best - w;
        double right = t_best + w;
        bool straddles = false;
        for (int k = 0; k < 40; ++k) {
            left = std::max(left, 0.5 * t_best);
            right = std::min(right, t_best + 0.5 * (cap - t_best));
            if (left > 0.0 && exponent_slope(g, left, cap) < 0.0 && exponent_slope(g, right, cap) > 0.0) {
                straddles = true;
                break;
            }
            w *= 4.0;
            left = t_best - w;
            right = t_best + w;
        }
        if (straddles) {
            for (int k = 0; k < 200 && right - left > 2.0 * std::numeric_limits<double>::epsilon() * right; ++k) {
                const double m = 0.5 * (left + right);
                if (exponent_slope(g, m, cap) < 0.0) left = m;
                else right = m;
            }
            const double t_polished = 0.5 * (left + right);
            const double g_polished = g(t_polished);
            t_best = t_polished;
            g_best = std::min(g_best, g_polished);
        }
    }
    return BoundResult::from_log("chernoff", g_best, positive_or_none(t_best));
}

BoundResult chernoff_bernoulli(double np, double delta) {
    require(np > 0.0 && std::isfinite(np), "chernoff_bernoulli: np must be > 0");
    require(delta > 0.0 && std::isfinite(delta), "chernoff_bernoulli: delta must be > 0");
    return BoundResult::from_log("chernoff_bernoulli", np * (delta - (1.0 + delta) * std::log1p(delta)),
                                 std::log1p(delta));
}

BoundResult chernoff_binomial_two_sided(double mu, double delta) {
    require(mu > 0.0 && std::isfinite(mu), "chernoff_binomial_two_sided: mu must be > 0");
    require(delta > 0.0 && delta <= 1.0, "chernoff_binomial_two_sided: delta must lie in (0, 1]");
    return BoundResult::from_log("chernoff_binomial_two_sided", kLn2 - mu * delta * delta / 3.0);
}

// ---------------------------------------------------------------------------
// Hoeffding family
// ---------------------------------------------------------------------------

double hoeffding_lemma_log_bound(double lambda, double mean, double lo, double hi) {
    require(lo <= mean && mean <= hi, "hoeffding_lemma_bound: mean must lie in [lo, hi]");
    const double w = hi - lo;
    return lambda * mean + lambda * lambda * w * w / 8.0;
}

double hoeffding_lemma_bound(double lambda, double mean, double lo, double hi) {
    return std::exp(hoeffding_lemma_log_bound(lambda, mean, lo, hi));
}

BoundResult hoeffding_tail(const BoundedSumSpec& spec, const TailQuery& query) {
    validate(spec);
    const double denom = spec.sum_squared_ranges();
    require(denom > 0.0, "hoeffding_tail: every variable is constant, sum of squared ranges is zero");
    std::optional<double> center;
    if (spec.has_means()) center = spec.sum_of_means();
    const double t = sum_deviation(query, spec.n(), center, "hoeffding_tail");
    return BoundResult::from_log("hoeffding", -2.0 * t * t / denom + two_sided_offset(query.direction),
                                 positive_or_none(4.0 * t / denom));
}

std::uint64_t hoeffding_sample_size(double alpha, double half_width) {
    require(alpha > 0.0 && alpha < 1.0, "hoeffding_sample_size: alpha must lie in (0, 1)");
    require(half_width > 0.0 && std::isfinite(half_width), "hoeffding_sample_size: half_width must be > 0");
    const double exact = std::log(2.0 / alpha) / (2.0 * half_width * half_width);
    require(exact < 1e18, "hoeffding_sample_size: required n is out of range");
    auto n = static_cast<std::uint64_t>(std::ceil(exact));
    if (n == 0) n = 1;
    // ceil() of a rounded quotient can land one short of the defining inequality.
    while (2.0 * std::exp(-2.0 * static_cast<double>(n) * half_width * half_width) > alpha) ++n;
    return n;
}

BoundResult azuma(const MartingaleDifferenceSpec& spec, double t, Direction direction) {
    validate(spec);
    require(t >= 0.0 && std::isfinite(t), "azuma: t must be >= 0");
    const double s2 = spec.sum_squares();
    return BoundResult::from_log("azuma", -t * t / (2.0 * s2) + two_sided_offset(direction),
                                 positive_or_none(t / s2));
}

BoundResult mcdiarmid(const MartingaleDifferenceSpec& spec, double epsilon, Direction direction) {
    validate(spec);
    require(epsilon >= 0.0 && std::isfinite(epsilon), "mcdiarmid: epsilon must be >= 0");
    const double s2 = spec.sum_squares();
    require(s2 > 0.0, "mcdiarmid: sum of c_i^2 must be > 0");
    return BoundResult::from_log("mcdiarmid", -2.0 * epsilon * epsilon / s2 + two_sided_offset(direction),
                                 positive_or_none(4.0 * epsilon / s2));
}

// ---------------------------------------------------------------------------
// Bennett / Bernstein
// ---------------------------------------------------------------------------

double h_crescent(double u) {
    require(u >= 0.0 && !std::isnan(u), "h_crescent: u must be >= 0");
    if (u < 0.05) {
        // sum_{k>=2} (-1)^k u^k / (k (k-1)); avoids the cancellation in (1+u)ln(1+u) - u.
        double term = u * u;
        double sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double add = term / (static_cast<double>(k) * (k - 1));
            sum += (k % 2 == 0) ? add : -add;
            term *= u;
            if (add < 1e-20 * sum) break;
        }
        return sum;
    }
    return (1.0 + u) * std::log1p(u) - u;
}

double g_lower(double u) {
    require(u >= 0.0 && !std::isnan(u), "g_lower: u must be >= 0");
    return 1.5 * u * u / (u + 3.0);
}

BoundResult bennett(std::uint64_t n, double v, double s, const TailQuery& query) {
    require(n >= 1, "bennett: n must be >= 1");
    require(v > 0.0 && std::isfinite(v), "bennett: v must be > 0");
    require(s > 0.0 && std::isfinite(s), "bennett: s must be > 0");
    require(query.threshold_kind != ThresholdKind::absolute_level,
            "bennett: needs a sum- or mean-deviation threshold");
    const double nn = static_cast<double>(n);
    const double t_mean = sum_deviation(query, n, std::nullopt, "bennett") / nn;
    const double u = t_mean * s / v;
    const double raw = -(nn * v / (s * s)) * h_crescent(u) + two_sided_offset(query.direction);
    return BoundResult::from_log("bennett", raw, positive_or_none(std::log1p(u) / s));
}

BoundResult bernstein(std::uint64_t n, double sigma2, const TailQuery& query) {
    require(n >= 1, "bernstein: n must be >= 1");
    require(sigma2 > 0.0 && std::isfinite(sigma2), "bernstein: sigma2 must be > 0");
    require(query.threshold_kind != ThresholdKind::absolute_level,
            "bernstein: needs a sum- or mean-deviation threshold");
    require(query.threshold >= 0.0 && std::isfinite(query.threshold), "bernstein: threshold must be >= 0");
    const double nn = static_cast<double>(n);
    double raw = 0.0;
    if (query.threshold_kind == ThresholdKind::mean_deviation) {
        const double eps = query.threshold;
        raw = -nn * eps * eps / (2.0 * sigma2 + 2.0 * eps / 3.0);
    } else {
        const double t = query.threshold;
        raw = -t * t / (2.0 * (nn * sigma2 + t / 3.0));
    }
    return BoundResult::from_log("bernstein", raw + two_sided_offset(query.direction));
}

}  // namespace tailbound
