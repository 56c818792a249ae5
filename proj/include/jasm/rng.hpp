#pragma once

// SplitMix64: the deterministic, splittable PRNG behind all generated
// corpora. Hand-rolled so the same seed yields the same programs on every
// platform and standard library.

#include <cmath>
#include <cstdint>

namespace jasm {

class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Independent child stream; advancing the child does not touch *this.
    SplitMix64 split() { return SplitMix64(next() ^ 0x632be59bd9b4e019ull); }

    uint64_t below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    // Inclusive on both ends.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    // Geometric with the given mean, capped at 8*mean + 64 so a single draw
    // cannot dwarf the program.
    int64_t geometric(double mean) {
        if (mean <= 0.0)
            return 0;
        const double p = 1.0 / (mean + 1.0);
        const double u = unit();
        const int64_t draw = static_cast<int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
        const int64_t cap = static_cast<int64_t>(8.0 * mean) + 64;
        return draw < cap ? draw : cap;
    }

private:
    uint64_t state_;
};

}  // namespace jasm
