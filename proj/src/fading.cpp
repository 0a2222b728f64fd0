#include "bcdisp/fading.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcdisp/special.hpp"

#include "json.hpp"

namespace bcdisp {

namespace {

// sigma^2 of each scatter component and the noncentrality 2K of H^2/sigma^2
double rice_sigma_sq(const FadingSpec& s) { return s.scale * s.scale / (2.0 * (s.k_factor + 1.0)); }

// chi-square cdf with 2m degrees of freedom
double chi2_cdf_even(double x, std::uint64_t m) {
    if (x <= 0.0) return 0.0;
    double half = 0.5 * x;
    if (half > 1400.0) return 1.0;
    double term = 1.0, sum = 1.0;
    for (std::uint64_t j = 1; j < m; ++j) {
        term *= half / static_cast<double>(j);
        sum += term;
    }
    return -std::expm1(-half + std::log(sum));
}

// noncentral chi-square cdf, 2 degrees of freedom, noncentrality lambda,
// as a Poisson mixture of central chi-squares
double ncx2_cdf_2dof(double x, double lambda) {
    if (x <= 0.0) return 0.0;
    if (lambda <= 0.0) return chi2_cdf_even(x, 1);
    double hl = 0.5 * lambda;
    double w = std::exp(-hl);
    double cdf = 0.0, wsum = 0.0;
    for (std::uint64_t k = 0; k < 100000; ++k) {
        if (k > 0) w *= hl / static_cast<double>(k);
        if (w > 0.0) {
            cdf += w * chi2_cdf_even(x, k + 1);
            wsum += w;
        }
        if (wsum > 1.0 - 1e-15 && k > hl) break;
    }
    return std::min(1.0, cdf);
}

void check_spec(const FadingSpec& spec) {
    auto errs = fading_violations(spec);
    if (!errs.empty()) {
        std::string what = "invalid fading spec:";
        for (const auto& e : errs) what += "\n  - " + e;
        throw ConfigError(what, errs);
    }
}

}  // namespace

double sample_gain(const FadingSpec& spec, RandomStream& rng) {
    switch (spec.family) {
        case FadingFamily::deterministic:
            return spec.gain;
        case FadingFamily::rayleigh: {
            // H^2 exponential with mean scale^2
            double u = rng.uniform01();
            return spec.scale * std::sqrt(-std::log1p(-u));
        }
        case FadingFamily::rice: {
            double nu = spec.scale * std::sqrt(spec.k_factor / (spec.k_factor + 1.0));
            double sigma = std::sqrt(rice_sigma_sq(spec));
            double a = nu + sigma * rng.normal();
            double b = sigma * rng.normal();
            return std::sqrt(a * a + b * b);
        }
    }
    throw std::invalid_argument("sample_gain: unknown fading family");
}

double gain_sq_cdf(const FadingSpec& spec, double q) {
    if (q < 0.0) return 0.0;
    switch (spec.family) {
        case FadingFamily::deterministic:
            return q >= spec.gain * spec.gain ? 1.0 : 0.0;
        case FadingFamily::rayleigh:
            return -std::expm1(-q / (spec.scale * spec.scale));
        case FadingFamily::rice:
            return ncx2_cdf_2dof(q / rice_sigma_sq(spec), 2.0 * spec.k_factor);
    }
    throw std::invalid_argument("gain_sq_cdf: unknown fading family");
}

double gain_sq_quantile(const FadingSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("gain_sq_quantile: p must lie in (0,1)");
    switch (spec.family) {
        case FadingFamily::deterministic:
            return spec.gain * spec.gain;
        case FadingFamily::rayleigh:
            return -spec.scale * spec.scale * std::log1p(-p);
        case FadingFamily::rice: {
            double lo = 0.0, hi = spec.scale * spec.scale;
            while (gain_sq_cdf(spec, hi) < p) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (gain_sq_cdf(spec, mid) < p)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < 1e-15 * (1.0 + hi)) break;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw std::invalid_argument("gain_sq_quantile: unknown fading family");
}

const char* to_string(OutageMethod m) {
    switch (m) {
        case OutageMethod::closed_form: return "closed_form";
        case OutageMethod::quadrature: return "quadrature";
        case OutageMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

namespace {

// gain-squared threshold of the outage event; infinity when the rate is
// above the gain->inf ceiling
double outage_threshold(const ChannelConfig& cfg, int user, double rate) {
    double s = std::expm1(2.0 * rate);
    if (user == 1) return cfg.beta * s / cfg.p1();
    double denom = cfg.p2() - s * cfg.p1();
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return s / denom;
}

}  // namespace

OutageReport outage_probability(const ValidatedConfig& vcfg, const FadingSpec& spec,
                                int user, double rate, OutageMethod method,
                                std::uint64_t samples, std::uint64_t seed) {
    check_spec(spec);
    if (user != 1 && user != 2) throw std::domain_error("outage_probability: user must be 1 or 2");
    if (!(rate >= 0.0)) throw std::domain_error("outage_probability: rate must be >= 0");
    double q_th = outage_threshold(vcfg.get(), user, rate);
    OutageReport r;
    r.user = user;
    r.rate = rate;
    r.method = method;
    if (std::isinf(q_th)) {
        r.outage_prob = 1.0;
        return r;
    }
    switch (method) {
        case OutageMethod::closed_form:
            if (spec.family == FadingFamily::rayleigh) {
                r.outage_prob = -std::expm1(-q_th / (spec.scale * spec.scale));
            } else if (spec.family == FadingFamily::deterministic) {
                r.outage_prob = gain_sq_cdf(spec, q_th);
            } else {
                throw std::domain_error("outage_probability: no closed form for this family");
            }
            break;
        case OutageMethod::quadrature:
            r.outage_prob = gain_sq_cdf(spec, q_th);
            break;
        case OutageMethod::monte_carlo: {
            if (samples < 1) throw std::domain_error("outage_probability: samples must be >= 1");
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < samples; ++i) {
                RandomStream rng(seed, i);
                double h = sample_gain(spec, rng);
                hits += (h * h <= q_th);
            }
            double p = static_cast<double>(hits) / static_cast<double>(samples);
            r.outage_prob = p;
            r.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
            break;
        }
    }
    return r;
}

RegionBoundary outage_region(const ValidatedConfig& vcfg, const FadingSpec& spec1,
                             const FadingSpec& spec2, double eps1, double eps2) {
    check_spec(spec1);
    check_spec(spec2);
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps2 > 0.0 && eps2 < 1.0))
        throw std::domain_error("outage_region: outage targets must lie in (0,1)");
    const ChannelConfig& cfg = vcfg.get();
    double q1 = gain_sq_quantile(spec1, eps1);
    double q2 = gain_sq_quantile(spec2, eps2);
    RegionBoundary b;
    b.criterion = RegionCriterion::outage;
    b.eps1 = eps1;
    b.eps2 = eps2;
    b.alpha = cfg.alpha;
    b.total_power = cfg.total_power;
    b.beta = cfg.beta;
    b.zeta1 = cfg.zeta1();
    b.zeta2 = cfg.zeta2();
    b.xs.push_back(capacity(q1 * cfg.p1() / cfg.beta));
    b.ys.push_back(capacity(q2 * cfg.p2() / (q2 * cfg.p1() + 1.0)));
    return b;
}

namespace {

// Q((n C - log M)/sqrt(n V)) with the V -> 0 limit as an indicator
double fading_q_term(std::size_t n, double cap_rate, double log_m, double v) {
    double num = static_cast<double>(n) * cap_rate - log_m;
    double den = std::sqrt(static_cast<double>(n) * v);
    if (den == 0.0) return num > 0.0 ? 0.0 : (num < 0.0 ? 1.0 : 0.5);
    return qfunc(num / den);
}

}  // namespace

FadingErrorBound fading_error_bound(const ValidatedConfig& vcfg, const FadingSpec& spec,
                             int user, std::size_t n, double log_m,
                             const FadingBoundOptions& opts) {
    check_spec(spec);
    if (user != 1 && user != 2) throw std::domain_error("fading_error_bound: user must be 1 or 2");
    if (n < 1) throw std::domain_error("fading_error_bound: n must be >= 1");
    const ChannelConfig& cfg = vcfg.get();
    const FadingSpec& cross = opts.cross_spec ? *opts.cross_spec : spec;
    if (user == 2 || opts.dispersion_own_gain) {
        // single-gain expectation
        auto term = [&](double q) {
            if (user == 1)
                return fading_q_term(n, capacity(q * cfg.p1() / cfg.beta), log_m,
                                     dispersion_v1(q * cfg.p1(), cfg.beta, cfg.zeta1()));
            return fading_q_term(
                n, capacity(q * cfg.p2() / (q * cfg.p1() + 1.0)), log_m,
                dispersion_v2(q * cfg.p2(), q * cfg.p1(), 1.0, cfg.zeta2()));
        };
        FadingErrorBound out;
        out.dispersion_own_gain = opts.dispersion_own_gain;
        if (spec.family == FadingFamily::deterministic) {
            out.value = term(spec.gain * spec.gain);
            out.method = "exact";
            return out;
        }
        if (!opts.force_monte_carlo) {
            QuadRule gl = gauss_legendre(opts.quad_nodes);
            double acc = 0.0;
            for (std::size_t i = 0; i < gl.size; ++i) {
                double u = 0.5 * (gl.nodes[i] + 1.0);
                acc += 0.5 * gl.weights[i] * term(gain_sq_quantile(spec, u));
            }
            out.value = std::min(1.0, std::max(0.0, acc));
            out.method = "quadrature";
            return out;
        }
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t i = 0; i < opts.samples; ++i) {
            RandomStream rng(opts.seed, i);
            double h = sample_gain(spec, rng);
            double v = term(h * h);
            s += v;
            s2 += v * v;
        }
        double nd = static_cast<double>(opts.samples);
        out.value = s / nd;
        out.std_error = std::sqrt(std::max(0.0, (s2 - nd * out.value * out.value) / (nd - 1.0)) / nd);
        out.method = "monte_carlo";
        return out;
    }

    // user 1, printed form: the capacity sees the own gain, the dispersion
    // sees an independent draw of the other user's gain
    auto term2 = [&](double q_own, double q_cross) {
        return fading_q_term(n, capacity(q_own * cfg.p1() / cfg.beta), log_m,
                             dispersion_v1(q_cross * cfg.p1(), cfg.beta, cfg.zeta1()));
    };
    FadingErrorBound out;
    out.dispersion_own_gain = false;
    if (spec.family == FadingFamily::deterministic &&
        cross.family == FadingFamily::deterministic) {
        out.value = term2(spec.gain * spec.gain, cross.gain * cross.gain);
        out.method = "exact";
        return out;
    }
    if (!opts.force_monte_carlo) {
        std::size_t nodes = std::max<std::size_t>(64, opts.quad_nodes / 2);
        QuadRule gl = gauss_legendre(nodes);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            double ui = 0.5 * (gl.nodes[i] + 1.0);
            double qi = spec.family == FadingFamily::deterministic
                            ? spec.gain * spec.gain
                            : gain_sq_quantile(spec, ui);
            double wi = 0.5 * gl.weights[i];
            for (std::size_t j = 0; j < nodes; ++j) {
                double uj = 0.5 * (gl.nodes[j] + 1.0);
                double qj = cross.family == FadingFamily::deterministic
                                ? cross.gain * cross.gain
                                : gain_sq_quantile(cross, uj);
                acc += wi * 0.5 * gl.weights[j] * term2(qi, qj);
            }
        }
        out.value = std::min(1.0, std::max(0.0, acc));
        out.method = "quadrature";
        return out;
    }
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t i = 0; i < opts.samples; ++i) {
        RandomStream rng(opts.seed, i);
        double h = sample_gain(spec, rng);
        double hc = sample_gain(cross, rng);
        double v = term2(h * h, hc * hc);
        s += v;
        s2 += v * v;
    }
    double nd = static_cast<double>(opts.samples);
    out.value = s / nd;
    out.std_error = std::sqrt(std::max(0.0, (s2 - nd * out.value * out.value) / (nd - 1.0)) / nd);
    out.method = "monte_carlo";
    return out;
}

std::string outage_report_to_json(const OutageReport& r, const std::string& fingerprint) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = "outage_report";
    j["config_fingerprint"] = fingerprint;
    j["user"] = r.user;
    j["rate"] = r.rate;
    j["outage_prob"] = r.outage_prob;
    j["method"] = to_string(r.method);
    j["std_error"] = r.std_error;
    return j.dump(2) + "\n";
}

std::string fading_bound_to_json(const FadingErrorBound& b, int user, std::size_t n,
                             double log_m, const std::string& fingerprint) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = "fading_error_bound";
    j["config_fingerprint"] = fingerprint;
    j["user"] = user;
    j["n"] = n;
    j["log_m"] = log_m;
    j["value"] = b.value;
    j["std_error"] = b.std_error;
    j["method"] = b.method;
    j["dispersion_gain"] = b.dispersion_own_gain ? "own" : "cross_as_printed";
    return j.dump(2) + "\n";
}

}  // namespace bcdisp
