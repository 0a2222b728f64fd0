#include "bcdisp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "bcdisp/fading.hpp"
#include "bcdisp/fingerprint.hpp"
#include "bcdisp/special.hpp"

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bcdisp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kFullPairLimit = 1ULL << 20;
constexpr std::size_t kFullBlockLimit = 1024;
constexpr std::uint64_t kBookStreamBase = 1ULL << 62;
constexpr double kPi = 3.14159265358979323846;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double sq_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace

ConfidenceInterval confidence_interval(std::uint64_t successes, std::uint64_t trials,
                                       double level) {
    if (trials < 1) throw std::domain_error("confidence_interval: trials must be >= 1");
    if (successes > trials)
        throw std::domain_error("confidence_interval: successes exceed trials");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("confidence_interval: level must lie in (0,1)");
    double z = qfunc_inv((1.0 - level) / 2.0);
    double t = static_cast<double>(trials);
    double p = static_cast<double>(successes) / t;
    double z2 = z * z;
    double denom = 1.0 + z2 / t;
    double center = (p + z2 / (2.0 * t)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
    return ConfidenceInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---- g kernels ---------------------------------------------------------------

double log_g_cap(double t, double center_sq_norm, const DensityParams& params,
                 std::size_t n) {
    const double s = params.signal_power, d = params.effective_noise;
    if (!(d > 0.0)) throw std::domain_error("g_cap: effective noise must be > 0");
    if (!(s >= 0.0)) throw std::domain_error("g_cap: signal power must be >= 0");
    const double nd = static_cast<double>(n);
    if (s == 0.0) {
        // the word is the origin; the density is a constant
        return 0.0 >= t ? 0.0 : -kInf;  // density(0, y) == 0 identically
    }
    if (center_sq_norm <= 0.0) {
        double cst = nd * capacity(s / d) - nd * s / (2.0 * d);
        return cst >= t ? 0.0 : -kInf;
    }
    double theta = d * (t - nd * capacity(s / d)) - d * center_sq_norm / (2.0 * (s + d)) +
                   (center_sq_norm + nd * s) / 2.0;
    double c = theta / std::sqrt(center_sq_norm * nd * s);
    return log_sphere_cap_tail(n, c);
}

double g_cap(double t, std::span<const double> center, const DensityParams& params,
             std::size_t n) {
    if (center.size() != n) throw std::invalid_argument("g_cap: center length must equal n");
    if (t == -kInf) return 1.0;
    return std::exp(log_g_cap(t, sq_norm(center), params, n));
}

double log_g_joint(double t, double y1_sq_norm, const ValidatedConfig& vcfg,
                   std::size_t n, std::size_t quad_nodes) {
    const ChannelConfig& cfg = vcfg.get();
    if (n < 2) throw std::domain_error("g_joint: n must be >= 2");
    if (quad_nodes < 2) throw std::domain_error("g_joint: need at least 2 quadrature nodes");
    const double nd = static_cast<double>(n);
    const double pa = cfg.p1();        // power of V
    const double pb = cfg.p2();        // power of U
    const double p = cfg.total_power;
    const double beta = cfg.beta;
    const double ny = std::sqrt(std::max(0.0, y1_sq_norm));
    const double cj = nd * capacity(p / beta);
    const double cc = nd * capacity(pb / beta);
    // condition on the angle phi between y1 and V; the angle density is
    // proportional to sin(phi)^(n-2) on [0, pi]
    QuadRule q = gauss_legendre(quad_nodes);
    double max_num = -kInf, max_den = -kInf;
    static thread_local std::vector<double> lnum, lden;
    lnum.resize(quad_nodes);
    lden.resize(quad_nodes);
    DensityParams cond{pb, beta};
    for (std::size_t i = 0; i < quad_nodes; ++i) {
        double phi = 0.5 * kPi * (q.nodes[i] + 1.0);
        double rho = std::cos(phi);
        double resid_sq = y1_sq_norm + nd * pa - 2.0 * rho * ny * std::sqrt(nd * pa);
        resid_sq = std::max(resid_sq, 0.0);
        // shift the joint threshold into the conditional single-word density
        double tp = t - cj + cc - y1_sq_norm / (2.0 * (p + beta)) +
                    resid_sq / (2.0 * (pb + beta));
        double lcap = log_g_cap(tp, resid_sq, cond, n);
        double lw = std::log(q.weights[i]) + (nd - 2.0) * std::log(std::sin(phi));
        if (std::isnan(lw) || std::isnan(lcap))
            throw NumericError("g_joint: non-finite quadrature node value");
        lden[i] = lw;
        lnum[i] = lw + lcap;
        max_num = std::max(max_num, lnum[i]);
        max_den = std::max(max_den, lden[i]);
    }
    if (max_den == -kInf) throw NumericError("g_joint: quadrature weights vanished");
    if (max_num == -kInf) return -kInf;
    double snum = 0.0, sden = 0.0;
    for (std::size_t i = 0; i < quad_nodes; ++i) {
        snum += std::exp(lnum[i] - max_num);
        sden += std::exp(lden[i] - max_den);
    }
    double out = max_num + std::log(snum) - (max_den + std::log(sden));
    if (std::isnan(out)) throw NumericError("g_joint: quadrature failure");
    return std::min(out, 0.0);
}

double g_joint(double t, std::span<const double> y1, const ValidatedConfig& cfg,
               std::size_t n, std::size_t quad_nodes) {
    if (y1.size() != n) throw std::invalid_argument("g_joint: y1 length must equal n");
    if (t == -kInf) return 1.0;
    return std::exp(log_g_joint(t, sq_norm(y1), cfg, n, quad_nodes));
}

// ---- shared helpers ------------------------------------------------------------

namespace {

// log(M - 1) from log M; -inf when there is no competitor
double log_m_minus_1(double log_m) {
    if (log_m < 44.0) {
        double m = std::nearbyint(std::exp(log_m));
        if (m <= 1.0) return -kInf;
        return std::log(m - 1.0);
    }
    return log_m;
}

// round(exp(log_m)) as an integer codebook size; caller checks the range
std::uint64_t m_from_log(double log_m) {
    double m = std::nearbyint(std::exp(log_m));
    if (m < 1.0) throw std::domain_error("codebook size rounds below 1");
    return static_cast<std::uint64_t>(m);
}

// log of (1-p)^(M-1) with p given in log domain
double log_survival(double lmm1, double log_p) {
    if (lmm1 == -kInf || log_p == -kInf) return 0.0;
    if (log_p >= 0.0) return -kInf;
    double log_neg_l1p;
    if (log_p < -23.0) {
        log_neg_l1p = log_p;  // -log1p(-p) ~ p
    } else {
        double p = std::exp(log_p);
        log_neg_l1p = std::log(-std::log1p(-p));
    }
    double e = lmm1 + log_neg_l1p;
    if (e > 700.0) return -kInf;
    return -std::exp(e);
}

// P{some of the M-1 iid competitors wins}, win prob in log domain
double union_err_prob(double lmm1, double log_p) {
    return -std::expm1(log_survival(lmm1, log_p));
}

// projection cosine of x against y; 0 on degenerate input
double proj_cos(std::span<const double> y, std::span<const double> x) {
    double ny = sq_norm(y), nx = sq_norm(x);
    if (!(ny > 0.0) || !(nx > 0.0)) return 0.0;
    double c = dot(y, x) / std::sqrt(ny * nx);
    return std::clamp(c, -1.0, 1.0);
}

struct Counts {
    std::uint64_t e1 = 0, e2 = 0, ej = 0;
    Counts& operator+=(const Counts& o) {
        e1 += o.e1;
        e2 += o.e2;
        ej += o.ej;
        return *this;
    }
};

void draw_sphere_point(RandomStream& rng, std::size_t n, double power, double* dst) {
    double ss = 0.0;
    do {
        rng.fill_normal(dst, n);
        ss = 0.0;
        for (std::size_t k = 0; k < n; ++k) ss += dst[k] * dst[k];
    } while (!(ss > 0.0));
    double s = std::sqrt(static_cast<double>(n) * power / ss);
    for (std::size_t k = 0; k < n; ++k) dst[k] *= s;
}

double draw_gain(const std::optional<FadingSpec>& spec, RandomStream& rng) {
    if (!spec) return 1.0;
    return sample_gain(*spec, rng);
}

struct Scratch {
    std::vector<double> v, u, z1, z2, y1, y2, resid;
    void resize(std::size_t n) {
        v.resize(n);
        u.resize(n);
        z1.resize(n);
        z2.resize(n);
        y1.resize(n);
        y2.resize(n);
        resid.resize(n);
    }
};

// Runs `blocks` independent tasks with deterministic per-block results and
// reduces them in block order. workers == 1 is the serial reference path;
// the parallel path must produce bit-identical output.
template <typename Task>
void run_blocks(std::uint64_t blocks, int workers, Task&& task) {
#ifdef _OPENMP
    if (workers != 1) {
        int nt = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b)
            task(static_cast<std::uint64_t>(b));
        return;
    }
#else
    (void)workers;
#endif
    for (std::uint64_t b = 0; b < blocks; ++b) task(b);
}

}  // namespace

const char* to_string(DecoderKind d) { return d == DecoderKind::sic ? "sic" : "jnn"; }

const char* to_string(SimMode m) {
    switch (m) {
        case SimMode::automatic: return "automatic";
        case SimMode::full: return "full";
        case SimMode::ensemble: return "ensemble";
    }
    return "?";
}

const char* to_string(RcuKind k) {
    switch (k) {
        case RcuKind::user2_sep: return "user2_sep";
        case RcuKind::user1_sep_sic: return "user1_sep_sic";
        case RcuKind::user1_sep_jnn: return "user1_sep_jnn";
        case RcuKind::jep_sic: return "jep_sic";
        case RcuKind::jep_jnn: return "jep_jnn";
    }
    return "?";
}

// ---- simulation ---------------------------------------------------------------

namespace {

// One trial without materialized codebooks. The transmitted pair and the
// noises are drawn; each competitor-set win is a Bernoulli draw from the
// exact conditional win probability (a sphere cap), which is valid because
// the M-1 competitors are iid uniform on their sphere given the trial state.
Counts ensemble_trial(const ChannelConfig& cfg, const SimParams& p, double lmm1,
                      double lmm2, std::uint64_t trial_idx, Scratch& sc) {
    const std::size_t n = p.n;
    RandomStream rng(p.seed, trial_idx);
    draw_sphere_point(rng, n, cfg.p1(), sc.v.data());
    draw_sphere_point(rng, n, cfg.p2(), sc.u.data());
    sample_noise(cfg.noise1, n, rng, sc.z1.data());
    sample_noise(cfg.noise2, n, rng, sc.z2.data());
    double h1 = draw_gain(p.fading1, rng);
    double h2 = draw_gain(p.fading2, rng);
    for (std::size_t k = 0; k < n; ++k) {
        double x = sc.v[k] + sc.u[k];
        sc.y1[k] = h1 * x + sc.z1[k];
        sc.y2[k] = h2 * x + sc.z2[k];
    }
    Counts c;
    // user 2: competitor U' beats U iff <y2,U'> >= <y2,U>
    double p2 = union_err_prob(lmm2, log_sphere_cap_tail(n, proj_cos(sc.y2, sc.u)));
    bool e2 = rng.uniform01() < p2;
    // user 1, SIC stage 1 against the U book at y1
    double pa = union_err_prob(lmm2, log_sphere_cap_tail(n, proj_cos(sc.y1, sc.u)));
    bool e1;
    if (rng.uniform01() < pa) {
        e1 = true;
    } else {
        for (std::size_t k = 0; k < n; ++k) sc.resid[k] = sc.y1[k] - h1 * sc.u[k];
        double pb =
            union_err_prob(lmm1, log_sphere_cap_tail(n, proj_cos(sc.resid, sc.v)));
        e1 = rng.uniform01() < pb;
    }
    c.e1 = e1;
    c.e2 = e2;
    c.ej = (e1 || e2);
    return c;
}

// joint nearest neighbor scan using a precomputed Gram matrix of the two
// codebooks; identical argmin to the literal pair scan
std::pair<std::size_t, std::size_t> jnn_scan_gram(std::span<const double> y1,
                                                  const Codebook& cb_u,
                                                  const Codebook& cb_v,
                                                  const std::vector<double>& gram,
                                                  double gain, std::vector<double>& au,
                                                  std::vector<double>& bv) {
    const std::size_t m1 = cb_v.size(), m2 = cb_u.size();
    for (std::size_t w2 = 0; w2 < m2; ++w2)
        au[w2] = dot(y1, cb_u.row(w2));
    for (std::size_t w1 = 0; w1 < m1; ++w1)
        bv[w1] = dot(y1, cb_v.row(w1));
    std::size_t best1 = 0, best2 = 0;
    double best = kInf;
    for (std::size_t w1 = 0; w1 < m1; ++w1) {
        const double* grow = gram.data() + w1 * m2;
        double b = -bv[w1];
        for (std::size_t w2 = 0; w2 < m2; ++w2) {
            double score = b - au[w2] + gain * grow[w2];
            if (score < best) {
                best = score;
                best1 = w1;
                best2 = w2;
            }
        }
    }
    return {best1, best2};
}

struct FullCtx {
    std::uint64_t m1 = 1, m2 = 1;
    bool use_gram = false;
};

Counts full_batch(const ChannelConfig& cfg, const SimParams& p, const FullCtx& fc,
                  std::uint64_t batch_idx, std::uint64_t t_begin, std::uint64_t t_end,
                  Scratch& sc) {
    const std::size_t n = p.n;
    RandomStream book_rng(p.seed, kBookStreamBase + batch_idx);
    Codebook cb_v = gen_spherical_codebook(fc.m1, n, cfg.p1(), book_rng);
    Codebook cb_u = gen_spherical_codebook(fc.m2, n, cfg.p2(), book_rng);
    std::vector<double> gram;
    std::vector<double> au, bv;
    if (fc.use_gram) {
        gram.resize(fc.m1 * fc.m2);
        for (std::size_t w1 = 0; w1 < fc.m1; ++w1) {
            auto v = cb_v.row(w1);
            double* grow = gram.data() + w1 * fc.m2;
            for (std::size_t w2 = 0; w2 < fc.m2; ++w2) grow[w2] = dot(v, cb_u.row(w2));
        }
        au.resize(fc.m2);
        bv.resize(fc.m1);
    }
    Counts c;
    for (std::uint64_t t = t_begin; t < t_end; ++t) {
        RandomStream rng(p.seed, t);
        std::size_t w1 = static_cast<std::size_t>(rng.uniform_index(fc.m1));
        std::size_t w2 = static_cast<std::size_t>(rng.uniform_index(fc.m2));
        sample_noise(cfg.noise1, n, rng, sc.z1.data());
        sample_noise(cfg.noise2, n, rng, sc.z2.data());
        double h1 = draw_gain(p.fading1, rng);
        double h2 = draw_gain(p.fading2, rng);
        auto v = cb_v.row(w1);
        auto u = cb_u.row(w2);
        for (std::size_t k = 0; k < n; ++k) {
            double x = v[k] + u[k];
            sc.y1[k] = h1 * x + sc.z1[k];
            sc.y2[k] = h2 * x + sc.z2[k];
        }
        std::size_t hat2 = nn_decode_user2(sc.y2, cb_u, h2);
        std::size_t hat1, bar2;
        if (p.decoder == DecoderKind::sic) {
            auto r = sic_decode_user1(sc.y1, cb_u, cb_v, h1);
            hat1 = r.first;
            bar2 = r.second;
        } else if (fc.use_gram) {
            auto r = jnn_scan_gram(sc.y1, cb_u, cb_v, gram, h1, au, bv);
            hat1 = r.first;
            bar2 = r.second;
        } else {
            auto r = jnn_decode_user1(sc.y1, cb_u, cb_v, h1);
            hat1 = r.first;
            bar2 = r.second;
        }
        bool e1 = (hat1 != w1) || (bar2 != w2);
        bool e2 = (hat2 != w2);
        c.e1 += e1;
        c.e2 += e2;
        c.ej += (e1 || e2);
    }
    return c;
}

double draw_gain(const std::optional<FadingSpec>& spec, RandomStream& rng);

}  // namespace

SimReport run_simulation(const ValidatedConfig& vcfg, const SimParams& p) {
    const ChannelConfig& cfg = vcfg.get();
    if (p.n < 2) throw std::domain_error("run_simulation: n must be >= 2");
    if (p.trials < 1) throw std::domain_error("run_simulation: trials must be >= 1");
    if (p.batch < 1) throw std::domain_error("run_simulation: batch must be >= 1");
    if (p.log_m1 < std::log(0.5) || p.log_m2 < std::log(0.5))
        throw std::domain_error("run_simulation: codebook sizes round below 1");
    if (p.fading1.has_value() != p.fading2.has_value())
        throw std::invalid_argument("run_simulation: provide fading for both users or neither");

    // materialize sizes when they are small enough for explicit decoding
    bool small = p.log_m1 < 44.0 && p.log_m2 < 44.0;
    std::uint64_t m1 = 0, m2 = 0;
    bool pair_ok = false;
    if (small) {
        m1 = m_from_log(p.log_m1);
        m2 = m_from_log(p.log_m2);
        pair_ok = m1 <= kFullPairLimit / m2;
    }
    bool full_allowed = pair_ok && p.n <= kFullBlockLimit;

    SimMode mode = p.mode;
    if (mode == SimMode::automatic)
        mode = full_allowed ? SimMode::full : SimMode::ensemble;
    if (mode == SimMode::full && !full_allowed)
        throw SizeGuardError(
            "run_simulation: explicit decoding needs M1*M2 <= 2^20 and n <= 1024");
    if (mode == SimMode::ensemble && p.decoder == DecoderKind::jnn)
        throw SizeGuardError(
            "run_simulation: jnn decoding needs M1*M2 <= 2^20; use the rcu bounds "
            "for larger codebooks");

    const std::uint64_t trials = p.trials;
    Counts total;
    if (mode == SimMode::full) {
        FullCtx fc;
        fc.m1 = m1;
        fc.m2 = m2;
        fc.use_gram = p.decoder == DecoderKind::jnn && m1 * m2 >= 4096;
        std::uint64_t nb = (trials + p.batch - 1) / p.batch;
        std::vector<Counts> parts(nb);
        run_blocks(nb, p.workers, [&](std::uint64_t b) {
            Scratch sc;
            sc.resize(p.n);
            std::uint64_t t0 = b * p.batch;
            std::uint64_t t1 = std::min(trials, t0 + p.batch);
            parts[b] = full_batch(cfg, p, fc, b, t0, t1, sc);
        });
        for (const Counts& c : parts) total += c;
    } else {
        double lmm1 = log_m_minus_1(p.log_m1);
        double lmm2 = log_m_minus_1(p.log_m2);
        const std::uint64_t chunk = 4096;
        std::uint64_t nb = (trials + chunk - 1) / chunk;
        std::vector<Counts> parts(nb);
        run_blocks(nb, p.workers, [&](std::uint64_t b) {
            Scratch sc;
            sc.resize(p.n);
            Counts c;
            std::uint64_t t0 = b * chunk;
            std::uint64_t t1 = std::min(trials, t0 + chunk);
            for (std::uint64_t t = t0; t < t1; ++t)
                c += ensemble_trial(cfg, p, lmm1, lmm2, t, sc);
            parts[b] = c;
        });
        for (const Counts& c : parts) total += c;
    }

    SimReport r;
    r.trials = trials;
    r.err1 = total.e1;
    r.err2 = total.e2;
    r.err_joint = total.ej;
    double td = static_cast<double>(trials);
    r.est1 = static_cast<double>(total.e1) / td;
    r.est2 = static_cast<double>(total.e2) / td;
    r.est_joint = static_cast<double>(total.ej) / td;
    r.ci1 = confidence_interval(total.e1, trials, 0.95);
    r.ci2 = confidence_interval(total.e2, trials, 0.95);
    r.ci_joint = confidence_interval(total.ej, trials, 0.95);
    r.seed = p.seed;
    r.batch = p.batch;
    r.n = p.n;
    r.log_m1 = p.log_m1;
    r.log_m2 = p.log_m2;
    r.decoder = p.decoder;
    r.mode = mode;
    r.faded = p.fading1.has_value();

    char canon[512];
    std::snprintf(canon, sizeof canon,
                  "sim|P=%.17g|a=%.17g|b=%.17g|nf1=%s|v1=%.17g|m41=%.17g|nf2=%s|v2=%.17g|"
                  "m42=%.17g|n=%zu|lm1=%.17g|lm2=%.17g|dec=%s|trials=%llu|seed=%llu|"
                  "batch=%llu|mode=%s|faded=%d",
                  cfg.total_power, cfg.alpha, cfg.beta, to_string(cfg.noise1.family),
                  cfg.noise1.variance, cfg.noise1.moment4, to_string(cfg.noise2.family),
                  cfg.noise2.variance, cfg.noise2.moment4, p.n, p.log_m1, p.log_m2,
                  to_string(p.decoder), static_cast<unsigned long long>(trials),
                  static_cast<unsigned long long>(p.seed),
                  static_cast<unsigned long long>(p.batch), to_string(mode),
                  r.faded ? 1 : 0);
    r.config_fingerprint = fingerprint_hex(canon);

    char result[256];
    std::snprintf(result, sizeof result, "res|%llu|%llu|%llu|%llu",
                  static_cast<unsigned long long>(trials),
                  static_cast<unsigned long long>(total.e1),
                  static_cast<unsigned long long>(total.e2),
                  static_cast<unsigned long long>(total.ej));
    r.report_fingerprint = fingerprint_hex(r.config_fingerprint + result);
    return r;
}

std::string sim_report_to_json(const SimReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = "sim_report";
    j["config_fingerprint"] = r.config_fingerprint;
    j["report_fingerprint"] = r.report_fingerprint;
    j["decoder"] = to_string(r.decoder);
    j["mode"] = to_string(r.mode);
    j["n"] = r.n;
    j["log_m1"] = r.log_m1;
    j["log_m2"] = r.log_m2;
    j["trials"] = r.trials;
    j["batch"] = r.batch;
    j["seed"] = r.seed;
    j["faded"] = r.faded;
    j["err1"] = r.err1;
    j["err2"] = r.err2;
    j["err_joint"] = r.err_joint;
    j["est1"] = r.est1;
    j["est2"] = r.est2;
    j["est_joint"] = r.est_joint;
    j["ci_level"] = 0.95;
    j["ci1"] = {r.ci1.lo, r.ci1.hi};
    j["ci2"] = {r.ci2.lo, r.ci2.hi};
    j["ci_joint"] = {r.ci_joint.lo, r.ci_joint.hi};
    return j.dump(2) + "\n";
}

// ---- rcu bounds -----------------------------------------------------------------

namespace {

double lse3(double a, double b, double c) {
    double m = std::max(a, std::max(b, c));
    if (m == -kInf) return -kInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

double lse4(double a, double b, double c, double d) {
    double m = std::max(std::max(a, b), std::max(c, d));
    if (m == -kInf) return -kInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m) +
                        std::exp(d - m));
}

double min1(double log_x) { return log_x >= 0.0 ? 1.0 : std::exp(log_x); }

double rcu_sample_value(const ValidatedConfig& vcfg, const RcuParams& rp,
                        std::uint64_t idx, Scratch& sc) {
    const ChannelConfig& cfg = vcfg.get();
    const std::size_t n = rp.n;
    const double pa = cfg.p1(), pb = cfg.p2(), pt = cfg.total_power, beta = cfg.beta;
    const double lmm1 = log_m_minus_1(rp.log_m1);
    const double lmm2 = log_m_minus_1(rp.log_m2);
    RandomStream rng(rp.seed, idx);
    draw_sphere_point(rng, n, pa, sc.v.data());
    draw_sphere_point(rng, n, pb, sc.u.data());
    sample_noise(cfg.noise1, n, rng, sc.z1.data());
    sample_noise(cfg.noise2, n, rng, sc.z2.data());
    for (std::size_t k = 0; k < n; ++k) {
        double x = sc.v[k] + sc.u[k];
        sc.y1[k] = x + sc.z1[k];
        sc.y2[k] = x + sc.z2[k];
    }

    auto cond_term = [&](std::span<const double> word, std::span<const double> y,
                         std::span<const double> known, DensityParams dp) {
        // density of the transmitted word against y - known, then the tail
        // over a fresh word of the same power
        for (std::size_t k = 0; k < n; ++k) sc.resid[k] = y[k] - known[k];
        double t = mismatched_density(word, sc.resid, dp);
        return log_g_cap(t, sq_norm(sc.resid), dp, n);
    };

    switch (rp.kind) {
        case RcuKind::user2_sep: {
            DensityParams dp{pb, pa + 1.0};
            double t = mismatched_density(sc.u, sc.y2, dp);
            return min1(lmm2 + log_g_cap(t, sq_norm(sc.y2), dp, n));
        }
        case RcuKind::user1_sep_sic: {
            DensityParams dp_a{pb, pa + beta};
            double ta = mismatched_density(sc.u, sc.y1, dp_a);
            double stage1 = min1(lmm2 + log_g_cap(ta, sq_norm(sc.y1), dp_a, n));
            double stage2 = min1(lmm1 + cond_term(sc.v, sc.y1, sc.u, {pa, beta}));
            return stage1 + stage2;
        }
        case RcuKind::user1_sep_jnn: {
            double lg1 = cond_term(sc.v, sc.y1, sc.u, {pa, beta});
            double lg2 = cond_term(sc.u, sc.y1, sc.v, {pb, beta});
            DensityParams dpj{pt, beta};
            for (std::size_t k = 0; k < n; ++k) sc.resid[k] = sc.v[k] + sc.u[k];
            double t3 = mismatched_density(sc.resid, sc.y1, dpj);
            double lg12 = log_g_joint(t3, sq_norm(sc.y1), vcfg, n, rp.quad_nodes);
            return min1(lse3(lmm1 + lg1, lmm2 + lg2, lmm1 + lmm2 + lg12));
        }
        case RcuKind::jep_sic: {
            double lg1 = cond_term(sc.v, sc.y1, sc.u, {pa, beta});
            DensityParams dp_a{pb, pa + beta};
            double ta = mismatched_density(sc.u, sc.y1, dp_a);
            double lg2s = log_g_cap(ta, sq_norm(sc.y1), dp_a, n);
            DensityParams dp3{pb, pa + 1.0};
            double t4 = mismatched_density(sc.u, sc.y2, dp3);
            double lg3 = log_g_cap(t4, sq_norm(sc.y2), dp3, n);
            return min1(lse3(lmm1 + lg1, lmm2 + lg2s, lmm2 + lg3));
        }
        case RcuKind::jep_jnn: {
            double lg1 = cond_term(sc.v, sc.y1, sc.u, {pa, beta});
            double lg2 = cond_term(sc.u, sc.y1, sc.v, {pb, beta});
            DensityParams dpj{pt, beta};
            for (std::size_t k = 0; k < n; ++k) sc.resid[k] = sc.v[k] + sc.u[k];
            double t3 = mismatched_density(sc.resid, sc.y1, dpj);
            double lg12 = log_g_joint(t3, sq_norm(sc.y1), vcfg, n, rp.quad_nodes);
            DensityParams dp3{pb, pa + 1.0};
            double t4 = mismatched_density(sc.u, sc.y2, dp3);
            double lg3 = log_g_cap(t4, sq_norm(sc.y2), dp3, n);
            return min1(
                lse4(lmm1 + lg1, lmm2 + lg2, lmm1 + lmm2 + lg12, lmm2 + lg3));
        }
    }
    throw std::invalid_argument("rcu_bound: unknown bound kind");
}

}  // namespace

RcuEstimate rcu_bound(const ValidatedConfig& vcfg, const RcuParams& rp) {
    if (rp.n < 2) throw std::domain_error("rcu_bound: n must be >= 2");
    if (rp.samples < 1) throw std::domain_error("rcu_bound: samples must be >= 1");
    if (rp.log_m1 < std::log(0.5) || rp.log_m2 < std::log(0.5))
        throw std::domain_error("rcu_bound: codebook sizes round below 1");

    const std::uint64_t chunk = 1024;
    std::uint64_t nb = (rp.samples + chunk - 1) / chunk;
    std::vector<double> sums(nb, 0.0), sqs(nb, 0.0);
    run_blocks(nb, rp.workers, [&](std::uint64_t b) {
        Scratch sc;
        sc.resize(rp.n);
        double s = 0.0, s2 = 0.0;
        std::uint64_t t0 = b * chunk, t1 = std::min(rp.samples, t0 + chunk);
        for (std::uint64_t t = t0; t < t1; ++t) {
            double v = rcu_sample_value(vcfg, rp, t, sc);
            s += v;
            s2 += v * v;
        }
        sums[b] = s;
        sqs[b] = s2;
    });
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t b = 0; b < nb; ++b) {
        sum += sums[b];
        sumsq += sqs[b];
    }
    double nd = static_cast<double>(rp.samples);
    double mean = sum / nd;
    double var = rp.samples > 1 ? std::max(0.0, (sumsq - nd * mean * mean) / (nd - 1.0))
                                : 0.0;

    RcuEstimate est;
    est.value = std::min(1.0, mean);
    est.std_error = std::sqrt(var / nd);
    est.samples = rp.samples;
    est.kind = rp.kind;
    est.n = rp.n;
    est.log_m1 = rp.log_m1;
    est.log_m2 = rp.log_m2;
    est.seed = rp.seed;

    const ChannelConfig& cfg = vcfg.get();
    char canon[512];
    std::snprintf(canon, sizeof canon,
                  "rcu|P=%.17g|a=%.17g|b=%.17g|nf1=%s|v1=%.17g|m41=%.17g|nf2=%s|v2=%.17g|"
                  "m42=%.17g|n=%zu|lm1=%.17g|lm2=%.17g|kind=%s|samples=%llu|seed=%llu|"
                  "quad=%zu",
                  cfg.total_power, cfg.alpha, cfg.beta, to_string(cfg.noise1.family),
                  cfg.noise1.variance, cfg.noise1.moment4, to_string(cfg.noise2.family),
                  cfg.noise2.variance, cfg.noise2.moment4, rp.n, rp.log_m1, rp.log_m2,
                  to_string(rp.kind), static_cast<unsigned long long>(rp.samples),
                  static_cast<unsigned long long>(rp.seed), rp.quad_nodes);
    est.config_fingerprint = fingerprint_hex(canon);
    return est;
}

std::string rcu_estimate_to_json(const RcuEstimate& r) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = "rcu_estimate";
    j["config_fingerprint"] = r.config_fingerprint;
    j["bound_kind"] = to_string(r.kind);
    j["n"] = r.n;
    j["log_m1"] = r.log_m1;
    j["log_m2"] = r.log_m2;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["value"] = r.value;
    j["std_error"] = r.std_error;
    return j.dump(2) + "\n";
}

}  // namespace bcdisp
