#include "bcdisp/codec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcdisp/analysis.hpp"

namespace bcdisp {

Codebook::Codebook(std::size_t m, std::size_t n, double per_word_power,
                   std::vector<double> rows)
    : m_(m), n_(n), power_(per_word_power), data_(std::move(rows)) {
    if (m_ < 1) throw std::domain_error("Codebook: need at least one codeword");
    if (n_ < 2) throw std::domain_error("Codebook: block length must be >= 2");
    if (!(power_ > 0.0)) throw std::domain_error("Codebook: power must be positive");
    if (data_.size() != m_ * n_) throw std::invalid_argument("Codebook: bad row buffer");
    const double want = static_cast<double>(n_) * power_;
    for (std::size_t i = 0; i < m_; ++i) {
        double ss = 0.0;
        for (std::size_t k = 0; k < n_; ++k) ss += data_[i * n_ + k] * data_[i * n_ + k];
        if (std::fabs(ss - want) > 1e-9 * want)
            throw std::invalid_argument("Codebook: row norm violates the sphere constraint");
    }
}

Codebook gen_spherical_codebook(std::size_t m, std::size_t n, double power,
                                RandomStream& rng) {
    if (m < 1) throw std::domain_error("gen_spherical_codebook: m must be >= 1");
    if (n < 2) throw std::domain_error("gen_spherical_codebook: n must be >= 2");
    if (!(power > 0.0)) throw std::domain_error("gen_spherical_codebook: power must be positive");
    std::vector<double> rows(m * n);
    const double radius = std::sqrt(static_cast<double>(n) * power);
    for (std::size_t i = 0; i < m; ++i) {
        double* r = rows.data() + i * n;
        double ss = 0.0;
        do {
            rng.fill_normal(r, n);
            ss = 0.0;
            for (std::size_t k = 0; k < n; ++k) ss += r[k] * r[k];
        } while (!(ss > 0.0));
        double s = radius / std::sqrt(ss);
        for (std::size_t k = 0; k < n; ++k) r[k] *= s;
    }
    return Codebook(m, n, power, std::move(rows));
}

std::vector<double> encode(std::size_t w1, std::size_t w2, const Codebook& cb_v,
                           const Codebook& cb_u) {
    if (w1 >= cb_v.size()) throw std::out_of_range("encode: w1 out of range");
    if (w2 >= cb_u.size()) throw std::out_of_range("encode: w2 out of range");
    if (cb_v.block_length() != cb_u.block_length())
        throw std::invalid_argument("encode: codebook block lengths differ");
    auto v = cb_v.row(w1);
    auto u = cb_u.row(w2);
    std::vector<double> x(v.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = v[k] + u[k];
    return x;
}

double mismatched_density(std::span<const double> u, std::span<const double> y,
                          const DensityParams& params) {
    if (u.size() != y.size())
        throw std::invalid_argument("mismatched_density: length mismatch");
    const double s = params.signal_power, d = params.effective_noise;
    if (!(d > 0.0)) throw std::domain_error("mismatched_density: effective noise must be > 0");
    if (!(s >= 0.0)) throw std::domain_error("mismatched_density: signal power must be >= 0");
    double yy = 0.0, ee = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        yy += y[k] * y[k];
        double e = y[k] - u[k];
        ee += e * e;
    }
    return static_cast<double>(y.size()) * capacity(s / d) + yy / (2.0 * (s + d)) -
           ee / (2.0 * d);
}

namespace {

std::size_t nn_scan(std::span<const double> y, const Codebook& cb, double gain) {
    if (cb.size() == 0) throw std::domain_error("nn decode: empty codebook");
    if (y.size() != cb.block_length())
        throw std::invalid_argument("nn decode: length mismatch");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const std::size_t n = cb.block_length();
    for (std::size_t w = 0; w < cb.size(); ++w) {
        const double* r = cb.data() + w * n;
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double e = y[k] - gain * r[k];
            d += e * e;
        }
        if (d < best_d) {
            best_d = d;
            best = w;
        }
    }
    return best;
}

}  // namespace

std::size_t nn_decode_user2(std::span<const double> y2, const Codebook& cb_u, double gain) {
    if (!(gain > 0.0)) throw std::domain_error("nn_decode_user2: gain must be positive");
    return nn_scan(y2, cb_u, gain);
}

std::pair<std::size_t, std::size_t> sic_decode_user1(std::span<const double> y1,
                                                     const Codebook& cb_u,
                                                     const Codebook& cb_v, double gain) {
    if (!(gain > 0.0)) throw std::domain_error("sic_decode_user1: gain must be positive");
    std::size_t w2 = nn_scan(y1, cb_u, gain);
    auto u = cb_u.row(w2);
    std::vector<double> resid(y1.size());
    for (std::size_t k = 0; k < resid.size(); ++k) resid[k] = y1[k] - gain * u[k];
    std::size_t w1 = nn_scan(resid, cb_v, gain);
    return {w1, w2};
}

std::pair<std::size_t, std::size_t> jnn_decode_user1(std::span<const double> y1,
                                                     const Codebook& cb_u,
                                                     const Codebook& cb_v, double gain) {
    if (!(gain > 0.0)) throw std::domain_error("jnn_decode_user1: gain must be positive");
    if (cb_u.size() == 0 || cb_v.size() == 0)
        throw std::domain_error("jnn_decode_user1: empty codebook");
    if (y1.size() != cb_u.block_length() || cb_u.block_length() != cb_v.block_length())
        throw std::invalid_argument("jnn_decode_user1: length mismatch");
    const std::size_t n = y1.size();
    std::size_t best1 = 0, best2 = 0;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<double> resid(n);
    for (std::size_t w1 = 0; w1 < cb_v.size(); ++w1) {
        const double* v = cb_v.data() + w1 * n;
        for (std::size_t k = 0; k < n; ++k) resid[k] = y1[k] - gain * v[k];
        for (std::size_t w2 = 0; w2 < cb_u.size(); ++w2) {
            const double* u = cb_u.data() + w2 * n;
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double e = resid[k] - gain * u[k];
                d += e * e;
            }
            if (d < best_d) {
                best_d = d;
                best1 = w1;
                best2 = w2;
            }
        }
    }
    return {best1, best2};
}

}  // namespace bcdisp
