#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/rng.hpp"

using namespace tailbound;

namespace {

const MomentProfile kCoin{50.0, 25.0, 0.0, 100.0, true};

TailQuery upper_dev(double t) { return {Direction::upper, ThresholdKind::sum_deviation, t}; }

// Plain long-double evaluation of (1+u)ln(1+u) - u, trustworthy away from 0.
long double h_direct(long double u) { return (1.0L + u) * std::log1p(u) - u; }

}  // namespace

TEST_CASE("markov and reverse markov") {
    const MomentProfile weight{100.0, std::nullopt, 0.0, std::nullopt, true};
    CHECK(markov(weight, 200.0).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(markov(weight, 50.0).value == 1.0);
    CHECK(markov(weight, 50.0).clamped);
    CHECK_THROWS_AS(markov(MomentProfile{1.0, std::nullopt, std::nullopt, std::nullopt, false}, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(markov(weight, 0.0), std::invalid_argument);

    const MomentProfile marks{75.0, std::nullopt, 0.0, 100.0, true};
    CHECK(reverse_markov(marks, 50.0).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(reverse_markov(marks, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(reverse_markov(weight, 50.0), std::invalid_argument);
}

TEST_CASE("markov is non-increasing in the level") {
    const MomentProfile p{3.0, std::nullopt, 0.0, std::nullopt, true};
    double prev = 2.0;
    for (double a = 0.5; a < 100.0; a *= 1.3) {
        const double v = markov(p, a).value;
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("chebyshev") {
    CHECK(chebyshev(kCoin, 25.0, false).value == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(chebyshev(kCoin, 25.0, true).value == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(chebyshev(kCoin, 25.0, true).method == "chebyshev_symmetric");
    // Below one standard deviation the two-sided value clamps to 1 and the
    // symmetric one is half of that.
    CHECK(chebyshev(kCoin, 2.0, false).value == 1.0);
    CHECK(chebyshev(kCoin, 2.0, true).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(chebyshev(MomentProfile{1.0, std::nullopt, std::nullopt, std::nullopt, false}, 1.0, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(chebyshev(kCoin, 0.0, false), std::invalid_argument);
}

TEST_CASE("chernoff optimizer against a dense grid") {
    const auto mgf = binomial_mgf(100, 0.5);
    const auto r = chernoff_optimize(mgf, 75.0);
    // Independent oracle: brute-force minimum on t in [1e-6, 10] with step 1e-6.
    double best = INFINITY;
    double best_t = 0.0;
    for (int i = 1; i <= 10'000'000; ++i) {
        const double t = i * 1e-6;
        const double g = mgf.log_mgf(t) - 75.0 * t;
        if (g < best) {
            best = g;
            best_t = t;
        }
    }
    CHECK(r.log_value <= best + 1e-12);
    CHECK(r.value == doctest::Approx(2.084037178807143e-6).epsilon(1e-12));
    CHECK(*r.optimal_param == doctest::Approx(best_t).epsilon(1e-5));
    CHECK(*r.optimal_param == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("chernoff optimizer edge cases") {
    SUBCASE("level at or below the mean gives the trivial bound") {
        const auto r = chernoff_optimize(binomial_mgf(10, 0.5), 5.0);
        CHECK(r.value == doctest::Approx(1.0));
        CHECK(r.log_value <= 0.0);
    }
    SUBCASE("constant variable above its value") {
        CHECK(chernoff_optimize(constant_mgf(2.0), 3.0).value < 1e-100);
    }
    SUBCASE("empty handle") { CHECK_THROWS_AS(chernoff_optimize(MgfHandle{}, 1.0), std::invalid_argument); }
    SUBCASE("e-bound mgf recovers the closed form") {
        for (double delta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const auto num = chernoff_optimize(bernoulli_sum_ebound_mgf(20.0), 20.0 * (1.0 + delta));
            const auto closed = chernoff_bernoulli(20.0, delta);
            CHECK(num.log_value == doctest::Approx(closed.log_value).epsilon(1e-12));
            CHECK(*num.optimal_param == doctest::Approx(std::log1p(delta)).epsilon(1e-8));
        }
    }
}

TEST_CASE("chernoff closed forms") {
    CHECK(chernoff_bernoulli(100.0, 1.0).value == doctest::Approx(1.672819404220223620507978e-17).epsilon(1e-13));
    CHECK(*chernoff_bernoulli(100.0, 1.0).optimal_param == doctest::Approx(std::log(2.0)));
    CHECK(chernoff_binomial_two_sided(50.0, 0.5).value == doctest::Approx(0.031007707198018638).epsilon(1e-14));
    CHECK_THROWS_AS(chernoff_binomial_two_sided(50.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_bernoulli(0.0, 1.0), std::invalid_argument);
    // Larger deviations never give a larger bound.
    double prev = 1.0;
    for (double d = 0.05; d <= 1.0; d += 0.05) {
        const double v = chernoff_binomial_two_sided(30.0, d).value;
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("hoeffding lemma") {
    CHECK(hoeffding_lemma_bound(0.0, 0.3, 0.0, 1.0) == 1.0);
    // Symmetric +-1 variable: E e^{lambda X} = cosh(lambda) <= e^{lambda^2/2}.
    for (double x = -6.0; x <= 6.0; x += 0.01) CHECK(std::cosh(x) <= hoeffding_lemma_bound(x, 0.0, -1.0, 1.0));
    CHECK(hoeffding_lemma_bound(1.0, 0.0, -1.0, 1.0) == doctest::Approx(1.6487212707001282));
    CHECK(std::cosh(1.0) == doctest::Approx(1.5430806348152437));
    CHECK_THROWS_AS(hoeffding_lemma_bound(1.0, 2.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("hoeffding tail") {
    const auto coins = BoundedSumSpec::identical(100, BoundedVar{0.0, 1.0, 0.5, 0.25});
    const auto abs75 = hoeffding_tail(coins, TailQuery{Direction::upper, ThresholdKind::absolute_level, 75.0});
    CHECK(abs75.value == doctest::Approx(3.726653172078671e-6).epsilon(1e-13));
    const auto mean = hoeffding_tail(coins, TailQuery{Direction::upper, ThresholdKind::mean_deviation, 0.25});
    CHECK(mean.log_value == doctest::Approx(abs75.log_value).epsilon(1e-14));
    const auto two = hoeffding_tail(coins, TailQuery{Direction::two_sided, ThresholdKind::sum_deviation, 25.0});
    CHECK(two.value == doctest::Approx(2.0 * abs75.value).epsilon(1e-13));

    const auto no_means = BoundedSumSpec::identical(4, BoundedVar{0.0, 1.0, std::nullopt, std::nullopt});
    CHECK_THROWS_AS(hoeffding_tail(no_means, TailQuery{Direction::upper, ThresholdKind::absolute_level, 3.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(hoeffding_tail(coins, upper_dev(-1.0)), std::invalid_argument);
}

TEST_CASE("sample size") {
    CHECK(hoeffding_sample_size(0.05, 0.1) == 185);
    CHECK(hoeffding_sample_size(0.01, 0.05) == 1060);
    for (double alpha : {0.2, 0.05, 0.01, 1e-6})
        for (double t : {0.3, 0.1, 0.01}) {
            const auto n = hoeffding_sample_size(alpha, t);
            const double nd = static_cast<double>(n);
            CHECK(2.0 * std::exp(-2.0 * nd * t * t) <= alpha);
            if (n > 1) CHECK(2.0 * std::exp(-2.0 * (nd - 1.0) * t * t) > alpha);
        }
    CHECK_THROWS_AS(hoeffding_sample_size(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(hoeffding_sample_size(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("azuma and mcdiarmid") {
    const auto dna = MartingaleDifferenceSpec::uniform(1000, 5.0);
    CHECK(azuma(dna, 200.0, Direction::two_sided).value == doctest::Approx(0.8986579282344431).epsilon(1e-14));
    CHECK(azuma(dna, 200.0, Direction::upper).value == doctest::Approx(std::exp(-0.8)).epsilon(1e-14));
    const auto kde = MartingaleDifferenceSpec::uniform(100, 0.02);
    CHECK(mcdiarmid(kde, 0.5, Direction::two_sided).value == doctest::Approx(7.453306344157342e-6).epsilon(1e-12));
    const auto ks = MartingaleDifferenceSpec::uniform(100, 0.01);
    CHECK(mcdiarmid(ks, 0.1, Direction::two_sided).value == doctest::Approx(0.2706705664732254).epsilon(1e-13));
    CHECK(azuma(dna, 0.0, Direction::upper).value == 1.0);
    CHECK_THROWS_AS(azuma(dna, -1.0, Direction::upper), std::invalid_argument);
}

TEST_CASE("crescent function") {
    CHECK(h_crescent(0.0) == 0.0);
    CHECK(h_crescent(1.0) == doctest::Approx(0.3862943611198906).epsilon(1e-15));
    for (double u : {1e-9, 1e-6, 1e-3, 0.01, 0.04, 0.049, 0.051, 0.1, 0.5}) {
        const long double ref = u < 0.3 ? [&] {
            // Series (long double) for small u, where the direct form cancels.
            long double s = 0.0L;
            long double term = u * u / 2.0L;
            for (int k = 2; k < 40; ++k) {
                s += term;
                term *= -static_cast<long double>(u) * (k - 1) / (k + 1);
            }
            return s;
        }()
                                        : h_direct(u);
        CHECK(h_crescent(u) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    }
    for (double u = 0.0; u <= 50.0; u += 0.001) CHECK(h_crescent(u) >= g_lower(u));
    CHECK_THROWS_AS(h_crescent(-0.1), std::invalid_argument);
}

TEST_CASE("bennett and bernstein") {
    const TailQuery q{Direction::upper, ThresholdKind::mean_deviation, 5.0};
    CHECK(bennett(2, 512.5, 15.0, q).value == doctest::Approx(0.9545062124446320).epsilon(1e-13));
    CHECK(bernstein(2, 512.5, upper_dev(10.0)).value == doctest::Approx(0.9525407732950392).epsilon(1e-13));
    CHECK(bennett(100, 0.25, 1.0, {Direction::upper, ThresholdKind::mean_deviation, 0.1}).value ==
          doctest::Approx(0.16922462886375430).epsilon(1e-12));
    CHECK(bernstein(100, 0.25, {Direction::upper, ThresholdKind::mean_deviation, 0.1}).value ==
          doctest::Approx(0.17123714294478817).epsilon(1e-12));
    CHECK_THROWS_AS(bennett(2, 1.0, 1.0, {Direction::upper, ThresholdKind::absolute_level, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(bernstein(2, 0.0, upper_dev(1.0)), std::invalid_argument);

    // Dominance on a random grid, with s = 1 matching the bernstein form.
    Xoshiro256 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto n = 1 + static_cast<std::uint64_t>(rng.uniform() * 500);
        const double v = 0.001 + rng.uniform();
        const double t = rng.uniform() * static_cast<double>(n);
        CHECK(bennett(n, v, 1.0, upper_dev(t)).log_value <= bernstein(n, v, upper_dev(t)).log_value);
    }
}

TEST_CASE("two-sided versions double the one-sided ones") {
    const auto spec = MartingaleDifferenceSpec::uniform(50, 1.0);
    for (double t : {5.0, 10.0, 20.0}) {
        CHECK(azuma(spec, t, Direction::two_sided).raw_log_value ==
              doctest::Approx(azuma(spec, t, Direction::upper).raw_log_value + std::log(2.0)));
        const TailQuery up{Direction::upper, ThresholdKind::sum_deviation, t};
        const TailQuery two{Direction::two_sided, ThresholdKind::sum_deviation, t};
        CHECK(bernstein(50, 0.2, two).raw_log_value == doctest::Approx(bernstein(50, 0.2, up).raw_log_value + std::log(2.0)));
    }
}
