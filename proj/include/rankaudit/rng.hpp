#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace rankaudit {

// Deterministic PRNG (splitmix64). The standard <random> distributions are
// implementation-defined, so every draw the toolkit makes goes through this
// class to keep ledgers reproducible across compilers and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n). Lemire's unbiased multiply-shift rejection.
    std::uint64_t next_below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0ULL - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Box-Muller; one spare cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

namespace detail {
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}
inline std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Hierarchical seed derivation: child streams never collide with siblings and
// adding a branch never perturbs another branch's draws.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
    return detail::mix(parent ^ detail::fnv1a64(tag) ^ 0x9E3779B97F4A7C15ULL);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index) {
    return detail::mix(derive_seed(parent, tag) ^ detail::mix(index + 0x2545F4914F6CDD1DULL));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::string_view a) {
    return detail::mix(derive_seed(parent, tag) ^ detail::fnv1a64(a));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t a,
                                 std::uint64_t b) {
    return detail::mix(derive_seed(parent, tag, a) ^ detail::mix(b + 0x452821E638D01377ULL));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                                 std::string_view a, std::string_view b) {
    std::string key;
    key.reserve(a.size() + b.size() + 1);
    key.append(a);
    key.push_back('\x1f');
    key.append(b);
    return detail::mix(derive_seed(parent, tag) ^ detail::fnv1a64(key));
}

}  // namespace rankaudit
