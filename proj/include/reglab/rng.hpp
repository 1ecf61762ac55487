#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace reglab {

// xoshiro256++ with splitmix64 stream derivation. All sampling is implemented
// here rather than through <random> distributions so that results are
// bit-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            word = splitmix64(s);
        }
        // xoshiro state must not be all zero; splitmix64 output makes this
        // astronomically unlikely, but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
            state_[0] = 0x9E3779B97F4A7C15ull;
        }
    }

    // Independent stream for (root, stream_id). Results never depend on the
    // order in which sibling streams are consumed.
    static Rng stream(std::uint64_t root, std::uint64_t stream_id) {
        return Rng(derive_seed(root, stream_id));
    }

    static std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream_id) {
        std::uint64_t s = root ^ (0x9E3779B97F4A7C15ull * (stream_id + 1));
        std::uint64_t a = splitmix64(s);
        std::uint64_t b = splitmix64(s);
        return a ^ (b >> 1);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer on [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        // 1 - u1 lies in (0, 1], keeping the log argument positive.
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double angle = 2.0 * kPi * u2;
        cached_ = r * std::sin(angle);
        have_cached_ = true;
        return r * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

  private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t splitmix64(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace reglab
