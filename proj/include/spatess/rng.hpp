#pragma once
// Deterministic RNG: mt19937_64 with manual double conversion so results do
// not depend on implementation-defined std::uniform_real_distribution.
#include <cstdint>
#include <random>
#include <vector>

namespace spatess {

// splitmix64-style mixing for deriving independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform integer in [lo, hi] inclusive, via masked rejection
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t range = hi - lo;
        if (range == ~0ULL) return gen_();
        std::uint64_t span = range + 1;
        std::uint64_t mask = ~0ULL;
        int bits = 0;
        while ((span >> bits) > 1) ++bits;
        if ((span & (span - 1)) != 0) ++bits;
        mask = (bits >= 64) ? ~0ULL : ((1ULL << bits) - 1);
        std::uint64_t v;
        do { v = gen_() & mask; } while (v > range);
        return lo + v;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, i - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace spatess
