#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace foedi {

// Seedable generator whose output is identical on every conforming platform.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
// The standard distributions are not (libstdc++ and libc++ differ), so the
// uniform draws below are implemented directly on the raw 64-bit output.
//
// Streams: every generation stage draws from its own engine seeded with
// stream_seed(seed, "<stage name>"), so adding draws to one stage never
// shifts the sequence seen by another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    Rng(std::uint64_t seed, std::string_view stream) : engine_(stream_seed(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, bound) by rejection; bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % bound;
    }

    // Uniform integer on [lo, hi].
    long long between(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Fisher-Yates, high index first.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t k = values.size(); k > 1; --k) {
            const std::size_t pick = static_cast<std::size_t>(below(k));
            std::swap(values[k - 1], values[pick]);
        }
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // FNV-1a over the stream name, mixed with the user seed.
    static std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char c : stream) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return splitmix64(splitmix64(seed) ^ h);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace foedi
