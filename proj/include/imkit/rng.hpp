#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "imkit/error.hpp"

namespace imkit {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

/// A reproducible random stream identified by (seed, stream_id).
///
/// Streams with distinct ids are statistically independent and never share
/// draws, so replicate r of a simulation can use `RngStream(seed, r)` (or
/// `parent.derive(r)`) regardless of which thread runs it.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id), engine_(detail::mix_seed(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream; the child's draws do not depend on how far this stream has advanced.
    RngStream derive(std::uint64_t child_id) const {
        return RngStream(detail::mix_seed(seed_, stream_id_), child_id);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

    double chi_squared(double df) {
        std::chi_squared_distribution<double> d(df);
        return d(engine_);
    }

    double gamma(double shape, double scale = 1.0) {
        std::gamma_distribution<double> d(shape, scale);
        return d(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Monte Carlo settings shared by every stochastic estimate.
struct McConfig {
    std::size_t n_rep = 10000;
    std::uint64_t seed = 20210601;
    std::uint64_t stream_id = 0;

    void validate() const {
        if (n_rep < 100) throw ConfigError("McConfig: n_rep must be at least 100");
    }

    RngStream stream() const { return RngStream(seed, stream_id); }
};

/// A Monte Carlo proportion with its binomial standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    static McEstimate proportion(std::size_t hits, std::size_t n) {
        McEstimate e;
        e.n = n;
        if (n == 0) return e;
        e.value = static_cast<double>(hits) / static_cast<double>(n);
        e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
        return e;
    }
};

}  // namespace imkit
