#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bcdisp/rng.hpp"

namespace bcdisp {

// M codewords drawn uniformly on the sphere of radius sqrt(n * power),
// stored row major. Immutable after generation.
class Codebook {
public:
    Codebook(std::size_t m, std::size_t n, double per_word_power, std::vector<double> rows);

    std::size_t size() const { return m_; }
    std::size_t block_length() const { return n_; }
    double per_word_power() const { return power_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_.data() + i * n_, n_);
    }
    const double* data() const { return data_.data(); }

private:
    std::size_t m_, n_;
    double power_;
    std::vector<double> data_;
};

Codebook gen_spherical_codebook(std::size_t m, std::size_t n, double power, RandomStream& rng);

// x = V(w1) + U(w2)
std::vector<double> encode(std::size_t w1, std::size_t w2, const Codebook& cb_v,
                           const Codebook& cb_u);

// The assumed Gaussian law behind a nearest-neighbor rule: codeword power S
// per symbol against effective noise power D.
struct DensityParams {
    double signal_power;    // S
    double effective_noise; // D, must be positive
};

// n-letter mismatched information density
//   n C(S/D) + ||y||^2 / (2(S+D)) - ||y-u||^2 / (2D).
// Conditional variants are obtained by passing the residual y - (known part).
double mismatched_density(std::span<const double> u, std::span<const double> y,
                          const DensityParams& params);

// argmin_w ||y2 - gain*U(w)||^2, ties to the lowest index
std::size_t nn_decode_user2(std::span<const double> y2, const Codebook& cb_u,
                            double gain = 1.0);

// stage 1: w2 from nn over U against y1; stage 2: w1 from nn over V against
// y1 - gain*U(w2). Returns (w1, w2).
std::pair<std::size_t, std::size_t> sic_decode_user1(std::span<const double> y1,
                                                     const Codebook& cb_u,
                                                     const Codebook& cb_v,
                                                     double gain = 1.0);

// exhaustive argmin over all (w1, w2) pairs of ||y1 - gain*(U(w2)+V(w1))||^2,
// ties to the lexicographically smallest pair
std::pair<std::size_t, std::size_t> jnn_decode_user1(std::span<const double> y1,
                                                     const Codebook& cb_u,
                                                     const Codebook& cb_v,
                                                     double gain = 1.0);

}  // namespace bcdisp
