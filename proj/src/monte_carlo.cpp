#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "tailbound/oracle.hpp"

namespace tailbound {

namespace {

constexpr std::uint64_t kTailChunk = 1u << 14;
constexpr std::uint64_t kEfronSteinChunk = 64;

unsigned resolve_workers(unsigned requested, std::uint64_t chunks) {
    unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(chunks, 1)));
}

// Runs fn(chunk_index, begin, end) for every chunk of [0, total) and returns
// the per-chunk results in chunk order. Which worker runs which chunk is
// irrelevant to the output.
template <typename Partial, typename Fn>
std::vector<Partial> run_chunks(std::uint64_t total, std::uint64_t chunk, unsigned workers, Fn fn) {
    const std::uint64_t chunks = (total + chunk - 1) / chunk;
    std::vector<Partial> partials(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto body = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                const std::uint64_t begin = c * chunk;
                partials[c] = fn(c, begin, std::min(total, begin + chunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };

    const unsigned w = resolve_workers(workers, chunks);
    if (w <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (unsigned i = 0; i < w; ++i) pool.emplace_back(body);
    }
    if (failure) std::rethrow_exception(failure);
    return partials;
}

double checked(double z) {
    if (!std::isfinite(z)) throw NumericError("monte carlo: aggregate evaluated to a non-finite value");
    return z;
}

void fill(const SamplerSpec& s, Xoshiro256& rng, std::vector<double>& xs) {
    for (auto& x : xs) x = draw(s.dist, rng);
}

struct EventTest {
    Direction direction;
    bool absolute;
    double level;   // absolute level, or deviation threshold
    double center;

    bool operator()(double z) const {
        if (absolute) {
            switch (direction) {
                case Direction::upper: return z >= level;
                case Direction::lower: return z <= level;
                case Direction::two_sided: return std::abs(z - center) >= std::abs(level - center);
            }
        }
        const double dev = z - center;
        switch (direction) {
            case Direction::upper: return dev >= level;
            case Direction::lower: return -dev >= level;
            case Direction::two_sided: return std::abs(dev) >= level;
        }
        return false;
    }
};

}  // namespace

WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
    if (n == 0) throw std::invalid_argument("wilson_interval: n must be >= 1");
    if (hits > n) throw std::invalid_argument("wilson_interval: hits exceed trials");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    WilsonInterval w{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (hits == 0) w.lo = 0.0;
    if (hits == n) w.hi = 1.0;
    w.lo = std::min(w.lo, p);
    w.hi = std::max(w.hi, p);
    return w;
}

TailEstimate mc_tail_estimate(const SamplerSpec& sampler, const TailQuery& query, std::uint64_t samples,
                              std::uint64_t seed, const McOptions& options) {
    validate(sampler);
    validate(query);
    if (samples < 1) throw std::invalid_argument("mc_tail_estimate: samples must be >= 1");
    if (samples > options.max_samples)
        throw std::invalid_argument("mc_tail_estimate: samples exceed the configured maximum of " +
                                    std::to_string(options.max_samples));

    const bool absolute = query.threshold_kind == ThresholdKind::absolute_level;
    const bool needs_center = !absolute || query.direction == Direction::two_sided;

    double center = sampler.center().value_or(std::numeric_limits<double>::quiet_NaN());
    if (needs_center && !sampler.center()) {
        // First pass: sample mean of the same draws the second pass will see.
        auto sums = run_chunks<double>(samples, kTailChunk, options.workers,
                                       [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                                           Xoshiro256 rng(chunk_seed(seed, c));
                                           std::vector<double> xs(sampler.n);
                                           double s = 0.0;
                                           for (std::uint64_t i = begin; i < end; ++i) {
                                               fill(sampler, rng, xs);
                                               s += checked(sampler.reduce(xs));
                                           }
                                           return s;
                                       });
        center = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(samples);
    }

    double level = query.threshold;
    if (query.threshold_kind == ThresholdKind::mean_deviation && sampler.aggregate == AggregateKind::sum)
        level *= static_cast<double>(sampler.n);
    const EventTest event{query.direction, absolute, level, center};

    auto counts = run_chunks<std::uint64_t>(samples, kTailChunk, options.workers,
                                            [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                                                Xoshiro256 rng(chunk_seed(seed, c));
                                                std::vector<double> xs(sampler.n);
                                                std::uint64_t hits = 0;
                                                for (std::uint64_t i = begin; i < end; ++i) {
                                                    fill(sampler, rng, xs);
                                                    if (event(checked(sampler.reduce(xs)))) ++hits;
                                                }
                                                return hits;
                                            });

    TailEstimate est;
    est.hits = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    est.samples = samples;
    est.seed = seed;
    est.center = needs_center ? center : sampler.center().value_or(0.0);
    est.point = static_cast<double>(est.hits) / static_cast<double>(samples);
    const auto w = wilson_interval(est.hits, samples, options.z);
    est.ci_lo = w.lo;
    est.ci_hi = w.hi;
    return est;
}

EfronSteinEstimate efron_stein_estimate(const SamplerSpec& sampler, std::uint64_t outer, std::uint64_t inner,
                                        std::uint64_t seed, EfronSteinMode mode, const McOptions& options) {
    validate(sampler);
    if (outer < 2) throw std::invalid_argument("efron_stein_estimate: outer must be >= 2");
    if (inner < 2) throw std::invalid_argument("efron_stein_estimate: inner must be >= 2");
    if (outer > options.max_samples)
        throw std::invalid_argument("efron_stein_estimate: outer exceeds the configured maximum");

    std::vector<double> z(outer);
    std::vector<double> es(outer);
    const double inner_d = static_cast<double>(inner);
    const double debias = inner_d / (inner_d + 1.0);

    run_chunks<char>(outer, kEfronSteinChunk, options.workers,
                     [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                         Xoshiro256 rng(chunk_seed(seed, c));
                         std::vector<double> xs(sampler.n);
                         for (std::uint64_t o = begin; o < end; ++o) {
                             fill(sampler, rng, xs);
                             const double base = checked(sampler.reduce(xs));
                             double total = 0.0;
                             for (std::size_t i = 0; i < xs.size(); ++i) {
                                 const double keep = xs[i];
                                 double acc = 0.0;
                                 for (std::uint64_t j = 0; j < inner; ++j) {
                                     xs[i] = draw(sampler.dist, rng);
                                     const double zj = checked(sampler.reduce(xs));
                                     if (mode == EfronSteinMode::conditional) {
                                         acc += zj;
                                     } else {
                                         acc += 0.5 * (base - zj) * (base - zj);
                                     }
                                 }
                                 xs[i] = keep;
                                 if (mode == EfronSteinMode::conditional) {
                                     const double cond_mean = acc / inner_d;
                                     total += debias * (base - cond_mean) * (base - cond_mean);
                                 } else {
                                     total += acc / inner_d;
                                 }
                             }
                             z[o] = base;
                             es[o] = total;
                         }
                         return char{0};
                     });

    const double m = static_cast<double>(outer);
    const double z_mean = std::accumulate(z.begin(), z.end(), 0.0) / m;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : z) {
        const double d2 = (v - z_mean) * (v - z_mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var = m2 / (m - 1.0);
    const double mu2 = m2 / m;
    const double mu4 = m4 / m;

    const double es_mean = std::accumulate(es.begin(), es.end(), 0.0) / m;
    double es_m2 = 0.0;
    for (double v : es) es_m2 += (v - es_mean) * (v - es_mean);

    EfronSteinEstimate out;
    out.var_est = var;
    out.var_se = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / m);
    out.var_half_width = options.z * out.var_se;
    out.es_bound_est = es_mean;
    out.es_se = std::sqrt(es_m2 / (m - 1.0) / m);
    out.es_half_width = options.z * out.es_se;
    out.outer = outer;
    out.inner = inner;
    out.mode = mode;
    return out;
}

}  // namespace tailbound
