#include "bcdisp/model.hpp"

#include <cmath>
#include <cstdio>

namespace bcdisp {

const char* to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::laplace: return "laplace";
        case NoiseFamily::uniform: return "uniform";
        case NoiseFamily::scaled_rademacher_mixture: return "scaled_rademacher_mixture";
    }
    return "?";
}

const char* to_string(FadingFamily f) {
    switch (f) {
        case FadingFamily::rayleigh: return "rayleigh";
        case FadingFamily::rice: return "rice";
        case FadingFamily::deterministic: return "deterministic";
    }
    return "?";
}

NoiseSpec make_noise_spec(NoiseFamily family, double variance, double m4_target) {
    if (!(variance > 0.0))
        throw std::domain_error("make_noise_spec: variance must be positive");
    NoiseSpec s;
    s.family = family;
    s.variance = variance;
    const double v = variance;
    switch (family) {
        case NoiseFamily::gaussian:
            s.moment4 = 3.0 * v * v;
            s.moment6 = 15.0 * v * v * v;
            break;
        case NoiseFamily::laplace:
            // variance 2b^2, E|Z|^k = k! b^k
            s.moment4 = 6.0 * v * v;
            s.moment6 = 90.0 * v * v * v;
            break;
        case NoiseFamily::uniform:
            // on [-a,a] with a^2 = 3v
            s.moment4 = 9.0 * v * v / 5.0;
            s.moment6 = 27.0 * v * v * v / 7.0;
            break;
        case NoiseFamily::scaled_rademacher_mixture: {
            // Two-moment matching for a mixture of +-c atoms (weight q) and
            // a uniform leg on [-a,a] (weight 1-q). Kurtosis range splits in
            // two closed-form branches:
            //   k <= 9/5: c^2 = v, a^2 = 3v (equal component variances),
            //             q = (9 - 5k)/4
            //   k >  9/5: uniform leg collapses to a point mass at 0,
            //             q = 1/k, c^2 = v k
            if (!(m4_target >= v * v))
                throw std::domain_error(
                    "make_noise_spec: mixture fourth moment must be >= variance^2");
            double k = m4_target / (v * v);
            if (k <= 1.8) {
                s.atom_weight = (9.0 - 5.0 * k) / 4.0;
                s.atom = std::sqrt(v);
                s.unif_hw = std::sqrt(3.0 * v);
            } else {
                s.atom_weight = 1.0 / k;
                s.atom = std::sqrt(v * k);
                s.unif_hw = 0.0;
            }
            double q = s.atom_weight, c = s.atom, a = s.unif_hw;
            s.moment4 = q * c * c * c * c + (1.0 - q) * a * a * a * a / 5.0;
            s.moment6 = q * std::pow(c, 6.0) + (1.0 - q) * std::pow(a, 6.0) / 7.0;
            break;
        }
    }
    return s;
}

Moments noise_moments(const NoiseSpec& spec) {
    NoiseSpec ref = make_noise_spec(spec.family, spec.variance,
                                    spec.family == NoiseFamily::scaled_rademacher_mixture
                                        ? spec.moment4
                                        : 0.0);
    return Moments{ref.variance, ref.moment4, ref.moment6};
}

void sample_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng, double* dst) {
    if (n < 1) throw std::domain_error("sample_noise: n must be >= 1");
    const double v = spec.variance;
    switch (spec.family) {
        case NoiseFamily::gaussian: {
            double sd = std::sqrt(v);
            for (std::size_t i = 0; i < n; ++i) dst[i] = sd * rng.normal();
            break;
        }
        case NoiseFamily::laplace: {
            double b = std::sqrt(v / 2.0);
            for (std::size_t i = 0; i < n; ++i) {
                double u = rng.uniform01() - 0.5;
                dst[i] = -b * std::copysign(std::log1p(-2.0 * std::fabs(u)), u);
            }
            break;
        }
        case NoiseFamily::uniform: {
            double a = std::sqrt(3.0 * v);
            for (std::size_t i = 0; i < n; ++i) dst[i] = a * (2.0 * rng.uniform01() - 1.0);
            break;
        }
        case NoiseFamily::scaled_rademacher_mixture: {
            for (std::size_t i = 0; i < n; ++i) {
                double u = rng.uniform01();
                if (u < spec.atom_weight) {
                    dst[i] = rng.uniform01() < 0.5 ? -spec.atom : spec.atom;
                } else {
                    dst[i] = spec.unif_hw * (2.0 * rng.uniform01() - 1.0);
                }
            }
            break;
        }
    }
}

std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng) {
    std::vector<double> v(n);
    sample_noise(spec, n, rng, v.data());
    return v;
}

std::vector<std::string> fading_violations(const FadingSpec& spec) {
    std::vector<std::string> errs;
    switch (spec.family) {
        case FadingFamily::rayleigh:
            if (!(spec.scale > 0.0)) errs.push_back("rayleigh scale must be positive");
            break;
        case FadingFamily::rice:
            if (!(spec.scale > 0.0)) errs.push_back("rice scale must be positive");
            if (!(spec.k_factor >= 0.0)) errs.push_back("rice k_factor must be >= 0");
            break;
        case FadingFamily::deterministic:
            if (!(spec.gain > 0.0)) errs.push_back("deterministic gain must be positive");
            break;
    }
    return errs;
}

namespace {

void check_noise_spec(const NoiseSpec& s, const char* name, double want_variance,
                      std::vector<std::string>& errs) {
    char buf[160];
    if (!(s.variance > 0.0)) {
        std::snprintf(buf, sizeof buf, "%s: variance must be positive", name);
        errs.push_back(buf);
        return;
    }
    if (std::fabs(s.variance - want_variance) > 1e-12) {
        std::snprintf(buf, sizeof buf, "%s: variance %.17g does not match required %.17g",
                      name, s.variance, want_variance);
        errs.push_back(buf);
    }
    if (!(s.moment4 >= s.variance * s.variance)) {
        std::snprintf(buf, sizeof buf, "%s: moment4 must be >= variance^2", name);
        errs.push_back(buf);
        return;
    }
    if (!std::isfinite(s.moment4) || !std::isfinite(s.moment6)) {
        std::snprintf(buf, sizeof buf, "%s: moments must be finite", name);
        errs.push_back(buf);
        return;
    }
    // family moments must be the analytic ones
    Moments ref = noise_moments(s);
    if (std::fabs(ref.m4 - s.moment4) > 1e-9 * std::fabs(ref.m4) + 1e-12 ||
        std::fabs(ref.m6 - s.moment6) > 1e-9 * std::fabs(ref.m6) + 1e-12) {
        std::snprintf(buf, sizeof buf, "%s: moments do not match the %s family at variance %.17g",
                      name, to_string(s.family), s.variance);
        errs.push_back(buf);
    }
}

}  // namespace

std::vector<std::string> config_violations(const ChannelConfig& cfg) {
    std::vector<std::string> errs;
    if (!(cfg.total_power > 0.0)) errs.push_back("total_power must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) errs.push_back("alpha must lie strictly in (0,1)");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) errs.push_back("beta must lie strictly in (0,1)");
    check_noise_spec(cfg.noise1, "noise1", cfg.beta, errs);
    check_noise_spec(cfg.noise2, "noise2", 1.0, errs);
    return errs;
}

ValidatedConfig validate_config(const ChannelConfig& cfg) {
    auto errs = config_violations(cfg);
    if (!errs.empty()) {
        std::string what = "invalid channel config:";
        for (const auto& e : errs) what += "\n  - " + e;
        throw ConfigError(what, errs);
    }
    return ValidatedConfig(cfg);
}

}  // namespace bcdisp
