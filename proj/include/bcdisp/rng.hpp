#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace bcdisp {

// splitmix64 finalizer; full-avalanche 64-bit mixer
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based random stream: output k of stream (seed, id) is a pure
// function of (seed, id, k), so any consumer can be handed its own stream
// and the draw order across consumers never matters. One stream must not
// be shared between threads; copies replay the sequence.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix64(seed ^ 0x9E3779B97F4A7C15ULL) ^
               mix64(stream_id + 0xD1B54A32D192ED03ULL)) {}

    std::uint64_t next_u64() {
        return mix64(key_ + (++ctr_) * 0x9E3779B97F4A7C15ULL);
    }

    // uniform on the open interval (0, 1)
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; second member of each pair is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void fill_normal(double* dst, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) dst[i] = normal();
    }

    std::vector<double> normal_vector(std::size_t n) {
        std::vector<double> v(n);
        fill_normal(v.data(), n);
        return v;
    }

    // uniform index in [0, m)
    std::uint64_t uniform_index(std::uint64_t m) {
        std::uint64_t r = next_u64() % m;  // m << 2^64 everywhere we use this
        return r;
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bcdisp
