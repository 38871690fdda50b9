#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ri2d {

// Counter-based stream RNG. Identical (seed, stream) pairs reproduce the
// same draw sequence on every platform, independently of scheduling, so
// replicas can derive their own streams and run in any order.
//
// The generator is a splitmix64 chain over a state initialized by mixing
// seed and stream id; all variate transforms below are hand-rolled since
// the std distributions are not bit-portable across implementations.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream)
    {
        state_ = mix(mix(0x9e3779b97f4a7c15ULL ^ seed) + stream);
        // warm up so that nearby (seed, stream) pairs decorrelate
        next_u64();
        next_u64();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Child stream for a sub-task (replica, point id, ...).
    RngStream derive(std::uint64_t id) const
    {
        return RngStream(seed_, mix(stream_ ^ mix(id + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1], safe as a log() argument.
    double uniform_pos()
    {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n)
    {
        if (n == 0) throw std::invalid_argument("uniform_int: n == 0");
        // rejection to remove modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    double exponential(double mean = 1.0)
    {
        return -mean * std::log(uniform_pos());
    }

    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(6.283185307179586477 * v);
        have_spare_ = true;
        return r * std::cos(6.283185307179586477 * v);
    }

    /// Poisson variate by inversion; for large rates the search starts at
    /// the mode so the expected work is O(sqrt(lambda)).
    std::uint64_t poisson(double lambda)
    {
        if (lambda < 0) throw std::invalid_argument("poisson: negative rate");
        if (lambda == 0) return 0;
        if (lambda < 30.0) {
            // product of uniforms
            const double l = std::exp(-lambda);
            std::uint64_t k = 0;
            double p = uniform_pos();
            while (p > l) {
                ++k;
                p *= uniform_pos();
            }
            return k;
        }
        return poisson_inversion_from_mode(lambda);
    }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t poisson_inversion_from_mode(double lambda)
    {
        const double u = uniform_pos();
        const std::int64_t mode = static_cast<std::int64_t>(lambda);
        const double log_pmode =
            mode * std::log(lambda) - lambda - std::lgamma(double(mode) + 1.0);
        const double pmode = std::exp(log_pmode);
        // CDF up to the mode, summed downward from the mode for stability
        double cdf_below = 0.0;
        {
            double p = pmode;
            for (std::int64_t k = mode; k > 0; --k) {
                p *= double(k) / lambda; // pmf(k-1)
                cdf_below += p;
                if (p < 1e-18 * (cdf_below + pmode)) break;
            }
        }
        double cdf = cdf_below + pmode;
        if (u <= cdf) {
            // walk downward
            double p = pmode;
            std::int64_t k = mode;
            double c = cdf;
            while (k > 0) {
                if (u > c - p) return static_cast<std::uint64_t>(k);
                c -= p;
                p *= double(k) / lambda; // pmf(k-1)
                --k;
            }
            return 0;
        }
        // walk upward
        double p = pmode;
        std::int64_t k = mode;
        while (true) {
            ++k;
            p *= lambda / double(k);
            cdf += p;
            if (u <= cdf || p < 1e-300)
                return static_cast<std::uint64_t>(k);
        }
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ri2d
