#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailbound/oracle.hpp"

namespace tailbound {

namespace {

double log_pmf(double n, double p, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
           (n - k) * std::log1p(-p);
}

// Sum of pmf(j) for j = start, start+step, ... within [0, n], where the terms
// are non-increasing in that direction. Log-concavity of the binomial pmf
// makes the successive ratio non-increasing too, so once term * r / (1 - r)
// is negligible the rest of the tail is as well.
double monotone_tail(std::uint64_t n, double p, std::uint64_t start, int step) {
    const double nn = static_cast<double>(n);
    const double log_odds = std::log(p) - std::log1p(-p);
    const double log_first = log_pmf(nn, p, static_cast<double>(start));
    double log_term = 0.0;  // relative to log_first
    double sum = 1.0;
    double j = static_cast<double>(start);
    for (;;) {
        double log_ratio = 0.0;
        if (step > 0) {
            if (j >= nn) break;
            log_ratio = std::log((nn - j) / (j + 1.0)) + log_odds;
            j += 1.0;
        } else {
            if (j <= 0.0) break;
            log_ratio = std::log(j / (nn - j + 1.0)) - log_odds;
            j -= 1.0;
        }
        log_term += log_ratio;
        const double term = std::exp(log_term);
        sum += term;
        const double r = std::exp(log_ratio);
        if (r < 1.0 && term * r / (1.0 - r) < 1e-18 * sum) break;
        if (term == 0.0) break;
    }
    return std::exp(log_first + std::log(sum));
}

double upper_tail(std::uint64_t n, double p, std::uint64_t k);

double lower_tail(std::uint64_t n, double p, std::uint64_t k) {
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const auto mode = static_cast<std::uint64_t>(std::floor((static_cast<double>(n) + 1.0) * p));
    if (k < mode) return monotone_tail(n, p, k, -1);
    return std::clamp(1.0 - upper_tail(n, p, k + 1), 0.0, 1.0);
}

double upper_tail(std::uint64_t n, double p, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const auto mode = static_cast<std::uint64_t>(std::floor((static_cast<double>(n) + 1.0) * p));
    if (k > mode) return monotone_tail(n, p, k, +1);
    return std::clamp(1.0 - lower_tail(n, p, k - 1), 0.0, 1.0);
}

// Rounds x to the nearest integer when it is within rounding noise of it, so
// that e.g. np + d = 75 is treated as exactly 75.
double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

double exact_binomial_tail(std::uint64_t n, double p, std::uint64_t k, Direction direction) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("exact_binomial_tail: p must lie in [0, 1]");
    if (k > n) throw std::invalid_argument("exact_binomial_tail: k must lie in [0, n]");
    switch (direction) {
        case Direction::upper: return upper_tail(n, p, k);
        case Direction::lower: return lower_tail(n, p, k);
        case Direction::two_sided:
            return exact_binomial_deviation(n, p, std::abs(static_cast<double>(k) - static_cast<double>(n) * p));
    }
    return 1.0;
}

double exact_binomial_deviation(std::uint64_t n, double p, double d) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("exact_binomial_deviation: p must lie in [0, 1]");
    if (std::isnan(d)) throw std::invalid_argument("exact_binomial_deviation: d is NaN");
    if (d <= 0.0) return 1.0;
    const double nn = static_cast<double>(n);
    const double mu = nn * p;
    const double k_hi = std::ceil(snap(mu + d));
    const double k_lo = std::floor(snap(mu - d));
    double total = 0.0;
    if (k_hi <= nn) total += upper_tail(n, p, static_cast<std::uint64_t>(k_hi));
    if (k_lo >= 0.0) total += lower_tail(n, p, static_cast<std::uint64_t>(k_lo));
    return std::min(total, 1.0);
}

}  // namespace tailbound
