// bounds.hpp
//
// Closed-form tail bounds and the generic Chernoff optimizer. Every bound is
// assembled in the log domain and converted once, at the end, through
// BoundResult::from_log, so results near e^-40 and below never underflow an
// intermediate product.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "tailbound/model.hpp"

namespace tailbound {

/// Cumulant generating function t -> log E[e^{tX}] on (0, t_domain_hi).
/// The evaluator must be pure and convex in t.
struct MgfHandle {
    std::function<double(double)> log_mgf;
    double t_domain_hi{std::numeric_limits<double>::infinity()};
};

/// Exact log-MGF of Binomial(n, p).
MgfHandle binomial_mgf(std::uint64_t n, double p);
/// The upper bound np(e^t - 1) on the log-MGF of a sum of Bernoulli variables.
MgfHandle bernoulli_sum_ebound_mgf(double np);
/// Point mass at `value`.
MgfHandle constant_mgf(double value);

// Markov: Pr[X >= a] <= E[X]/a for nonnegative X.
BoundResult markov(const MomentProfile& profile, double a);

// Reverse Markov: Pr[X <= a] <= (U - E[X])/(U - a) where U = support_hi.
BoundResult reverse_markov(const MomentProfile& profile, double a);

// Chebyshev: Pr[|X - E X| >= a] <= Var/a^2. With `symmetric` the caller
// asserts a symmetric distribution and receives the one-sided half.
BoundResult chebyshev(const MomentProfile& profile, double a, bool symmetric);

/// inf_{t in (0, t_domain_hi)} exp(log_mgf(t) - t a).
///
/// The search doubles t from 1e-6 to bracket the minimum of the convex
/// exponent g(t) = log_mgf(t) - t a, narrows the bracket by golden-section
/// until g is stable to 1e-10 relative, then polishes the minimizer by
/// bisection on a five-point-stencil estimate of g'(t). The polish step is
/// what makes the reported t accurate to ~1e-10; g itself is flat to double
/// precision over a window of roughly 1e-8 around the optimum.
///
/// Throws NumericError if log_mgf is non-finite inside the bracket.
BoundResult chernoff_optimize(const MgfHandle& mgf, double a);

// [e^delta / (1+delta)^(1+delta)]^np, the Bernoulli-sum Chernoff bound on
// Pr[X >= (1+delta) np].
BoundResult chernoff_bernoulli(double np, double delta);

// 2 exp(-mu delta^2 / 3) for Pr[|X - mu| >= delta mu], 0 < delta <= 1. This
// is the textbook two-sided multiplicative form; it is used as given rather
// than derived from chernoff_bernoulli.
BoundResult chernoff_binomial_two_sided(double mu, double delta);

/// Hoeffding's lemma: E[e^{lambda X}] <= exp(lambda mean + lambda^2 (hi-lo)^2 / 8).
double hoeffding_lemma_bound(double lambda, double mean, double lo, double hi);
/// Same bound, log domain.
double hoeffding_lemma_log_bound(double lambda, double mean, double lo, double hi);

// exp(-2 t^2 / sum (hi_i - lo_i)^2) for a sum deviation t. Mean deviations
// convert through t = n eps; absolute levels need every mean in the spec.
BoundResult hoeffding_tail(const BoundedSumSpec& spec, const TailQuery& query);

/// Smallest n with 2 exp(-2 n t^2) <= alpha for variables of unit range.
std::uint64_t hoeffding_sample_size(double alpha, double half_width);

// Azuma: exp(-t^2 / (2 sum c_i^2)) per side.
BoundResult azuma(const MartingaleDifferenceSpec& spec, double t, Direction direction);

// Bennett, generic scale form: exp(-(n v / s^2) h(t s / v)) for a mean
// deviation t, where v is the average variance and s bounds X_i - E X_i.
// With s = 1 and a sum deviation this is exp(-n v h(t_sum / (n v))).
BoundResult bennett(std::uint64_t n, double v, double s, const TailQuery& query);

// Bernstein: exp(-n eps^2 / (2 sigma2 + 2 eps / 3)) for a mean deviation,
// exp(-t^2 / (2 (n sigma2 + t / 3))) for a sum deviation.
BoundResult bernstein(std::uint64_t n, double sigma2, const TailQuery& query);

// McDiarmid: exp(-2 eps^2 / sum c_i^2) per side.
BoundResult mcdiarmid(const MartingaleDifferenceSpec& spec, double epsilon, Direction direction);

/// h(u) = (1 + u) ln(1 + u) - u.
double h_crescent(double u);
/// G(u) = (3/2) u^2 / (u + 3), the lower envelope of h used by Bernstein.
double g_lower(double u);

}  // namespace tailbound
