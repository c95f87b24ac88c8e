#include <cmath>
#include <stdexcept>

#include "tailbound/scenarios.hpp"

namespace tailbound {

namespace {

ExpectedValue expect(std::string method, double value, double tolerance = 1e-9, std::string note = {}) {
    return ExpectedValue{std::move(method), value, tolerance, false, std::move(note)};
}

Scenario weight() {
    Scenario s;
    s.name = "weight";
    s.description = "Nonnegative weight with mean 100; probability of reaching 200.";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{100.0, std::nullopt, 0.0, std::nullopt, true};
    s.query = {Direction::upper, ThresholdKind::absolute_level, 200.0};
    s.applicable = {"markov"};
    s.oracle = SamplerSpec{TwoPoint{0.0, 0.5, 200.0}, 1, AggregateKind::sum, std::nullopt};
    s.expected = {expect("markov", 0.5)};
    return s;
}

Scenario marks() {
    Scenario s;
    s.name = "marks";
    s.description = "Exam marks out of 100 with mean 75; probability of scoring at most 50.";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{75.0, std::nullopt, 0.0, 100.0, true};
    s.query = {Direction::lower, ThresholdKind::absolute_level, 50.0};
    s.applicable = {"reverse_markov"};
    s.oracle = SamplerSpec{TwoPoint{50.0, 0.5, 100.0}, 1, AggregateKind::sum, std::nullopt};
    s.expected = {expect("reverse_markov", 0.5)};
    return s;
}

Scenario coin() {
    Scenario s;
    s.name = "coin";
    s.description = "Heads in 100 fair coin flips; probability of at least 75 heads.";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{50.0, 25.0, 0.0, 100.0, true};
    s.sum = BoundedSumSpec::identical(100, BoundedVar{0.0, 1.0, 0.5, 0.25});
    s.mgf = BinomialMgf{100, 0.5};
    s.query = {Direction::upper, ThresholdKind::absolute_level, 75.0};
    s.applicable = {"markov",    "chebyshev", "chebyshev_symmetric", "chernoff", "chernoff_bernoulli",
                    "chernoff_binomial_two_sided", "hoeffding", "bennett", "bernstein"};
    s.oracle = ExactBinomialOracle{100, 0.5};
    s.expected = {expect("markov", 2.0 / 3.0), expect("chebyshev", 0.04), expect("chebyshev_symmetric", 0.02),
                  expect("chernoff_binomial_two_sided", 2.0 * std::exp(-100.0 / 24.0))};
    return s;
}

Scenario iq() {
    Scenario s;
    s.name = "iq";
    s.description = "IQ with mean 100 and standard deviation 15; probability of at least 250.";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{100.0, 225.0, 0.0, std::nullopt, true};
    s.query = {Direction::upper, ThresholdKind::absolute_level, 250.0};
    s.applicable = {"markov", "chebyshev"};
    s.oracle = SamplerSpec{TwoPoint{85.0, 0.5, 115.0}, 1, AggregateKind::sum, std::nullopt};
    s.expected = {expect("markov", 0.4), expect("chebyshev", 0.01)};
    return s;
}

Scenario lottery() {
    Scenario s;
    s.name = "lottery";
    s.description = "Wins in 10^6 independent plays at odds 10^-4; probability of at least 200 wins.";
    s.kind = ScenarioKind::moment;
    s.profile = MomentProfile{100.0, 99.99, 0.0, 1e6, true};
    s.mgf = BinomialMgf{1'000'000, 1e-4};
    s.query = {Direction::upper, ThresholdKind::absolute_level, 200.0};
    s.applicable = {"markov", "chebyshev", "chernoff", "chernoff_bernoulli"};
    s.oracle = ExactBinomialOracle{1'000'000, 1e-4};
    auto cb = expect("chernoff_bernoulli", 1.672819404220223620507978e-17, 1e-12,
                     "exp(100(1 - 2 ln 2)); rounding the base to 0.67 gives 0.67^100 = 4.05e-18, "
                     "recorded for reference only");
    cb.relative = true;
    s.expected = {expect("markov", 0.5), cb};
    return s;
}

Scenario portfolio() {
    Scenario s;
    s.name = "portfolio";
    s.description = "Payoff of two independent bounded investments; probability the total reaches 130.";
    s.kind = ScenarioKind::bounded_sum;
    s.sum = BoundedSumSpec{{BoundedVar{25.0, 65.0, 50.0, 625.0}, BoundedVar{60.0, 80.0, 70.0, 400.0}}};
    s.query = {Direction::upper, ThresholdKind::absolute_level, 130.0};
    s.applicable = {"hoeffding", "bennett", "bernstein"};
    s.expected = {expect("bennett", 0.9545, 5e-4), expect("bernstein", 0.9525, 5e-4),
                  expect("hoeffding", 0.9048, 5e-4)};
    return s;
}

Scenario dna() {
    Scenario s;
    s.name = "dna";
    s.description = "Occurrences of a length-5 motif in a random sequence of length 1000 (Doob martingale, c_i = 5).";
    s.kind = ScenarioKind::martingale;
    s.differences = MartingaleDifferenceSpec::uniform(1000, 5.0);
    s.query = {Direction::two_sided, ThresholdKind::sum_deviation, 200.0};
    s.applicable = {"azuma"};
    s.expected = {expect("azuma", 2.0 * std::exp(-0.8))};
    return s;
}

Scenario dna_small() {
    Scenario s;
    s.name = "dna-small";
    s.description = "Length-3 motif in a random 4-letter sequence of length 30, small enough to simulate.";
    s.kind = ScenarioKind::martingale;
    s.differences = MartingaleDifferenceSpec::uniform(30, 3.0);
    s.query = {Direction::two_sided, ThresholdKind::sum_deviation, 20.0};
    s.applicable = {"azuma"};
    const Distribution letters = Categorical{{0.0, 1.0, 2.0, 3.0}, {0.25, 0.25, 0.25, 0.25}};
    s.oracle = SamplerSpec{letters, 30, AggregateKind::custom,
                           make_custom_aggregate("pattern_count", {{"pattern", {0.0, 1.0, 2.0}}}, letters, 30)};
    s.expected = {expect("azuma", 2.0 * std::exp(-400.0 / 540.0))};
    return s;
}

Scenario kde() {
    Scenario s;
    s.name = "kde";
    s.description = "L1 error of a box-kernel density estimate from 100 uniform samples (c_i = 2/n).";
    s.kind = ScenarioKind::bounded_difference;
    s.differences = MartingaleDifferenceSpec::uniform(100, 0.02);
    s.query = {Direction::two_sided, ThresholdKind::sum_deviation, 0.5};
    s.applicable = {"mcdiarmid"};
    const Distribution u = Uniform{0.0, 1.0};
    s.oracle = SamplerSpec{u, 100, AggregateKind::custom, make_custom_aggregate("kde_l1", {}, u, 100)};
    s.expected = {expect("mcdiarmid", 2.0 * std::exp(-12.5))};
    return s;
}

Scenario empirical_process() {
    Scenario s;
    s.name = "empirical-process";
    s.description = "Sup over half-lines of the empirical deviation for 100 uniform samples (c_i = 1/n).";
    s.kind = ScenarioKind::bounded_difference;
    s.differences = MartingaleDifferenceSpec::uniform(100, 0.01);
    s.query = {Direction::two_sided, ThresholdKind::sum_deviation, 0.1};
    s.applicable = {"mcdiarmid"};
    const Distribution u = Uniform{0.0, 1.0};
    s.oracle = SamplerSpec{u, 100, AggregateKind::custom, make_custom_aggregate("ks_uniform", {}, u, 100)};
    s.expected = {expect("mcdiarmid", 2.0 * std::exp(-2.0))};
    return s;
}

}  // namespace

std::vector<Scenario> builtin_catalog() {
    return {weight(), marks(), coin(),  iq(),  lottery(), portfolio(),
            dna(),    dna_small(), kde(), empirical_process()};
}

Scenario builtin_scenario(std::string_view name) {
    for (auto& s : builtin_catalog())
        if (s.name == name) return s;
    throw std::out_of_range("unknown builtin scenario '" + std::string(name) + "'");
}

}  // namespace tailbound
