#ifndef MCSTRUCT_RNG_HPP
#define MCSTRUCT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mcstruct {

// splitmix64, used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random source. All randomness in the library flows through
/// this class; std::* distributions are avoided because their output is not
/// pinned by the standard, while mt19937_64 and the explicit transforms below
/// are reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return lo + static_cast<int>(r % span);
    }

    /// Standard normal via the Marsaglia polar method (no trig, pinned algorithm).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double mul = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * mul;
        have_spare_ = true;
        return u * mul;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
            const int j = uniform_int(0, i);
            T tmp = std::move(items[static_cast<std::size_t>(i)]);
            items[static_cast<std::size_t>(i)] = std::move(items[static_cast<std::size_t>(j)]);
            items[static_cast<std::size_t>(j)] = std::move(tmp);
        }
    }

    /// Seed for an independent substream keyed by `stream`. Derived from the
    /// construction seed, not the generator state, so substream layouts stay
    /// stable no matter how much of this stream has been consumed.
    std::uint64_t substream(std::uint64_t stream) const {
        return splitmix64(splitmix64(seed_) ^ splitmix64(stream));
    }

    Rng fork(std::uint64_t stream) const { return Rng(substream(stream)); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mcstruct

#endif
