#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "s2sl/errors.hpp"

namespace s2sl {

/// Deterministic random stream.
///
/// Engine: std::mt19937_64, whose output sequence for a given seed is fixed
/// by the C++ standard, so streams replay bit-exactly across platforms.
/// All derived quantities (unit doubles, bounded integers, gaussians) are
/// produced by the transforms below rather than std::*_distribution, whose
/// sequences are implementation-defined.
///
///   unit double   : (x >> 11) * 2^-53, giving [0, 1)
///   bounded int   : rejection sampling on the top of the 64-bit range
///   gaussian      : Box-Muller; each round draws u1 = 1 - unit() in (0, 1]
///                   then u2 = unit(), yields r*cos(2*pi*u2) first and caches
///                   r*sin(2*pi*u2) as the next value, r = sqrt(-2 ln u1)
///
/// Substreams come from derive(): the master seed and each path component are
/// mixed through the splitmix64 finalizer, so (seed, worker index) pairs give
/// independent, reproducible streams.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Substream for a work item: seed' = mix chain over (master, path...).
    static RngStream derive(std::uint64_t master_seed,
                            std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = mix(master_seed);
        for (std::uint64_t p : path) s = mix(s ^ mix(p));
        return RngStream(s);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ConfigError("RngStream::next_below: n must be positive");
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// One draw from Normal(mean, stddev^2) via Box-Muller.
    double next_gaussian(double mean, double stddev) {
        if (stddev < 0.0) throw ConfigError("next_gaussian: stddev must be >= 0");
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps the log finite
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline std::vector<double> gaussian_sample(RngStream& rng, double mean, double stddev,
                                           std::size_t n) {
    if (stddev < 0.0) throw ConfigError("gaussian_sample: stddev must be >= 0");
    std::vector<double> out(n);
    for (auto& v : out) v = rng.next_gaussian(mean, stddev);
    return out;
}

/// In-place Fisher-Yates shuffle, iterating from the back.
template <typename T>
void seeded_shuffle(RngStream& rng, std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace s2sl
