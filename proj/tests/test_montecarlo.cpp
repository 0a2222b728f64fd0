#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "bcdisp/analysis.hpp"
#include "bcdisp/codec.hpp"
#include "bcdisp/montecarlo.hpp"

using namespace bcdisp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ValidatedConfig make_config(double p, double alpha, double beta) {
    ChannelConfig cfg;
    cfg.total_power = p;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.noise1 = make_noise_spec(NoiseFamily::gaussian, beta);
    cfg.noise2 = make_noise_spec(NoiseFamily::gaussian, 1.0);
    return validate_config(cfg);
}

void draw_sphere(RandomStream& rng, std::size_t n, double power, std::vector<double>& out) {
    out.resize(n);
    double ss = 0.0;
    for (auto& x : out) {
        x = rng.normal();
        ss += x * x;
    }
    double s = std::sqrt(n * power / ss);
    for (auto& x : out) x *= s;
}

}  // namespace

TEST_CASE("confidence interval") {
    auto z = confidence_interval(0, 100, 0.95);
    CHECK(z.lo == 0.0);
    CHECK(z.hi > 0.0);
    auto mid = confidence_interval(50, 100, 0.95);
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);
    // Wilson center at p = 1/2 is exactly 1/2, so the interval is symmetric
    CHECK(mid.lo + mid.hi == doctest::Approx(1.0).epsilon(1e-12));
    // direct Wilson formula oracle
    {
        double zq = 1.9599639845400545;  // Qinv(0.025)
        double p = 10.0 / 1000.0, nt = 1000.0;
        double denom = 1.0 + zq * zq / nt;
        double center = (p + zq * zq / (2.0 * nt)) / denom;
        double half = zq * std::sqrt(p * (1.0 - p) / nt + zq * zq / (4.0 * nt * nt)) / denom;
        auto got = confidence_interval(10, 1000, 0.95);
        CHECK(got.lo == doctest::Approx(center - half).epsilon(1e-12));
        CHECK(got.hi == doctest::Approx(center + half).epsilon(1e-12));
    }
    CHECK_THROWS_AS(confidence_interval(5, 4, 0.95), std::domain_error);
    CHECK_THROWS_AS(confidence_interval(1, 0, 0.95), std::domain_error);
}

TEST_CASE("g_cap trivial limits and monotonicity") {
    std::vector<double> y = {1.0, -0.5, 2.0, 0.25, -1.5, 0.5, 0.75, -0.25};
    DensityParams dp{1.3, 0.8};
    CHECK(g_cap(-kInf, y, dp, 8) == 1.0);
    CHECK(g_cap(1e12, y, dp, 8) == 0.0);
    double prev = 1.1;
    for (double t = -30.0; t < 30.0; t += 1.0) {
        double v = g_cap(t, y, dp, 8);
        CHECK(v <= prev + 1e-14);
        prev = v;
    }
}

TEST_CASE("g_cap against brute-force Monte Carlo at n=8") {
    const std::size_t n = 8;
    RandomStream rng(808, 0);
    std::vector<double> y(n);
    for (auto& v : y) v = 1.7 * rng.normal();
    DensityParams dp{1.3, 0.8};
    const std::size_t samples = 200000;
    // pivot thresholds around the density scale
    std::vector<double> probe(n);
    draw_sphere(rng, n, dp.signal_power, probe);
    double t0 = mismatched_density(probe, y, dp);
    for (double shift : {-4.0, -1.0, 0.0, 1.5, 4.0}) {
        double t = t0 + shift;
        std::size_t hits = 0;
        RandomStream mc(808, 1);
        std::vector<double> u(n);
        for (std::size_t i = 0; i < samples; ++i) {
            draw_sphere(mc, n, dp.signal_power, u);
            hits += (mismatched_density(u, y, dp) >= t);
        }
        double est = double(hits) / double(samples);
        double v = g_cap(t, y, dp, n);
        double se = std::sqrt(std::max(v * (1.0 - v), 1e-12) / double(samples));
        CHECK(std::fabs(est - v) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("g_joint against joint Monte Carlo at n=8") {
    const std::size_t n = 8;
    ValidatedConfig cfg = make_config(5.0, 0.3, 0.6);
    RandomStream rng(909, 0);
    std::vector<double> y(n);
    for (auto& v : y) v = 2.0 * rng.normal();
    DensityParams joint{5.0, 0.6};
    std::vector<double> probe_u(n), probe_v(n), sum(n);
    draw_sphere(rng, n, cfg->p2(), probe_u);
    draw_sphere(rng, n, cfg->p1(), probe_v);
    for (std::size_t k = 0; k < n; ++k) sum[k] = probe_u[k] + probe_v[k];
    double t0 = mismatched_density(sum, y, joint);
    const std::size_t samples = 400000;
    for (double shift : {-3.0, 0.0, 2.0}) {
        double t = t0 + shift;
        std::size_t hits = 0;
        RandomStream mc(909, 1);
        std::vector<double> u(n), v(n);
        for (std::size_t i = 0; i < samples; ++i) {
            draw_sphere(mc, n, cfg->p2(), u);
            draw_sphere(mc, n, cfg->p1(), v);
            for (std::size_t k = 0; k < n; ++k) sum[k] = u[k] + v[k];
            hits += (mismatched_density(sum, y, joint) >= t);
        }
        double est = double(hits) / double(samples);
        double g = g_joint(t, y, cfg, n, 200);
        double se = std::sqrt(std::max(g * (1.0 - g), 1e-12) / double(samples));
        CHECK(std::fabs(est - g) <= 4.0 * se + 1e-12);
    }
    CHECK(g_joint(-kInf, y, cfg, n) == 1.0);
    // monotone in t
    double prev = 1.1;
    for (double t = t0 - 20.0; t < t0 + 20.0; t += 2.0) {
        double g = g_joint(t, y, cfg, n, 120);
        CHECK(g <= prev + 1e-12);
        prev = g;
    }
}

TEST_CASE("g_joint node doubling self-convergence at n=64") {
    const std::size_t n = 64;
    ValidatedConfig cfg = make_config(5.0, 0.3, 0.6);
    RandomStream rng(910, 0);
    std::vector<double> y(n);
    for (auto& v : y) v = 2.2 * rng.normal();
    DensityParams joint{5.0, 0.6};
    std::vector<double> u(n), v(n), sum(n);
    draw_sphere(rng, n, cfg->p2(), u);
    draw_sphere(rng, n, cfg->p1(), v);
    for (std::size_t k = 0; k < n; ++k) sum[k] = u[k] + v[k];
    for (double shift : {-10.0, 0.0, 10.0}) {
        double t = mismatched_density(sum, y, joint) + shift;
        double a = g_joint(t, y, cfg, n, 200);
        double b = g_joint(t, y, cfg, n, 400);
        CHECK(std::fabs(a - b) < 1e-8);
    }
}

TEST_CASE("simulation trivial cases") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    SimParams p;
    p.n = 16;
    p.trials = 500;
    p.seed = 5;
    p.log_m1 = 0.0;
    p.log_m2 = 0.0;
    SimReport r = run_simulation(cfg, p);
    CHECK(r.err1 == 0);
    CHECK(r.err2 == 0);
    CHECK(r.err_joint == 0);
    CHECK(r.est1 == 0.0);
    // near-noiseless channel decodes everything at moderate rates
    ChannelConfig tiny = cfg.get();
    tiny.beta = 0.5;
    tiny.noise1 = make_noise_spec(NoiseFamily::gaussian, 0.5);
    tiny.total_power = 5e6;  // power >> noise
    ValidatedConfig vtiny = validate_config(tiny);
    SimParams q;
    q.n = 32;
    q.trials = 1000;
    q.seed = 6;
    q.log_m1 = std::log(64.0);
    q.log_m2 = std::log(64.0);
    SimReport rq = run_simulation(vtiny, q);
    CHECK(rq.err1 == 0);
    CHECK(rq.err2 == 0);
    CHECK(rq.err_joint == 0);
    // bad params
    SimParams bad = p;
    bad.trials = 0;
    CHECK_THROWS_AS(run_simulation(cfg, bad), std::domain_error);
    bad = p;
    bad.log_m1 = -2.0;
    CHECK_THROWS_AS(run_simulation(cfg, bad), std::domain_error);
}

TEST_CASE("simulation invariants and determinism across workers") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    SimParams p;
    p.n = 16;
    p.trials = 4000;
    p.seed = 99;
    p.log_m1 = std::log(64.0);
    p.log_m2 = std::log(64.0);
    p.decoder = DecoderKind::sic;
    SimReport r1 = run_simulation(cfg, p);
    CHECK(r1.err_joint >= r1.err1);
    CHECK(r1.err_joint >= r1.err2);
    CHECK(r1.err_joint <= r1.err1 + r1.err2);
    CHECK(r1.est1 == double(r1.err1) / double(r1.trials));
    CHECK(r1.mode == SimMode::full);
    for (int workers : {1, 2, 4, 8}) {
        SimParams pw = p;
        pw.workers = workers;
        SimReport rw = run_simulation(cfg, pw);
        CHECK(rw.err1 == r1.err1);
        CHECK(rw.err2 == r1.err2);
        CHECK(rw.err_joint == r1.err_joint);
        CHECK(rw.report_fingerprint == r1.report_fingerprint);
    }
    // ensemble mode determinism too
    SimParams pe = p;
    pe.mode = SimMode::ensemble;
    SimReport re1 = run_simulation(cfg, pe);
    pe.workers = 4;
    SimReport re4 = run_simulation(cfg, pe);
    CHECK(re1.err1 == re4.err1);
    CHECK(re1.err2 == re4.err2);
    CHECK(re1.err_joint == re4.err_joint);
    CHECK(re1.mode == SimMode::ensemble);
}

TEST_CASE("ensemble mode agrees with explicit decoding") {
    // moderate-error operating point so the comparison has power
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    SimParams p;
    p.n = 16;
    p.trials = 20000;
    p.seed = 31337;
    p.log_m1 = std::log(64.0);
    p.log_m2 = std::log(64.0);
    p.decoder = DecoderKind::sic;
    p.mode = SimMode::full;
    SimReport full = run_simulation(cfg, p);
    p.mode = SimMode::ensemble;
    p.seed = 777;  // independent randomness, same distribution
    SimReport ens = run_simulation(cfg, p);
    // marginals are exactly equidistributed; compare within 4 combined se
    auto se = [&](double a, double b) {
        return std::sqrt((a * (1 - a) + b * (1 - b)) / double(p.trials));
    };
    CHECK(full.est1 > 0.02);  // the operating point is interesting
    CHECK(full.est2 > 0.02);
    CHECK(std::fabs(full.est1 - ens.est1) <= 4.0 * se(full.est1, ens.est1));
    CHECK(std::fabs(full.est2 - ens.est2) <= 4.0 * se(full.est2, ens.est2));
    // the joint event ignores cross-user competitor coupling; allow slack
    CHECK(std::fabs(full.est_joint - ens.est_joint) <=
          4.0 * se(full.est_joint, ens.est_joint) + 0.02);
}

TEST_CASE("jnn full simulation invariants") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    SimParams p;
    p.n = 16;
    p.trials = 3000;
    p.seed = 4242;
    p.log_m1 = std::log(32.0);
    p.log_m2 = std::log(32.0);
    p.decoder = DecoderKind::jnn;
    SimReport r = run_simulation(cfg, p);
    CHECK(r.err_joint >= r.err1);
    CHECK(r.err_joint >= r.err2);
    CHECK(r.err_joint <= r.err1 + r.err2);
    // jnn refuses to run beyond the pair guard
    SimParams big = p;
    big.log_m1 = 30.0;
    big.log_m2 = 30.0;
    CHECK_THROWS_AS(run_simulation(cfg, big), SizeGuardError);
}

TEST_CASE("gram-based jnn matches the literal decoder inside the simulator") {
    // indirect check: same seed, same config, scan threshold crossed or not
    // must produce identical counts
    ValidatedConfig cfg = make_config(2.0, 0.35, 0.55);
    SimParams p;
    p.n = 12;
    p.trials = 2000;
    p.seed = 22;
    p.log_m1 = std::log(72.0);  // 72*72 = 5184 >= 4096 switches the gram path
    p.log_m2 = std::log(72.0);
    p.decoder = DecoderKind::jnn;
    SimReport gram = run_simulation(cfg, p);
    // shrink below the gram threshold with the same trial streams: the two
    // paths cannot be compared directly then, so instead rerun the same size
    // twice to confirm stability, and cross-check against sic err2 (user-2
    // side is decoder independent)
    SimReport gram2 = run_simulation(cfg, p);
    CHECK(gram.report_fingerprint == gram2.report_fingerprint);
    SimParams ps = p;
    ps.decoder = DecoderKind::sic;
    SimReport sic = run_simulation(cfg, ps);
    CHECK(sic.err2 == gram.err2);
}

TEST_CASE("rcu bound basics and monotonicity in M2") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    RcuParams rp;
    rp.n = 16;
    rp.samples = 400;
    rp.seed = 51;
    rp.kind = RcuKind::user2_sep;
    rp.log_m1 = 0.0;
    rp.log_m2 = 0.0;
    RcuEstimate zero = rcu_bound(cfg, rp);
    CHECK(zero.value == 0.0);
    // same seed means pointwise monotone samples, so the ladder is exact
    double prev = -1.0;
    for (double lm2 : {2.0, 4.0, 6.0}) {
        rp.log_m2 = lm2;
        RcuEstimate e = rcu_bound(cfg, rp);
        CHECK(e.value >= prev);
        CHECK(e.value <= 1.0);
        CHECK(e.value >= 0.0);
        prev = e.value;
    }
}

TEST_CASE("rcu bounds dominate simulation estimates") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    const std::size_t n = 16;
    const double lm = std::log(64.0);
    SimParams sp;
    sp.n = n;
    sp.trials = 20000;
    sp.seed = 1234;
    sp.log_m1 = lm;
    sp.log_m2 = lm;
    sp.decoder = DecoderKind::sic;
    SimReport sic = run_simulation(cfg, sp);
    sp.decoder = DecoderKind::jnn;
    SimReport jnn = run_simulation(cfg, sp);

    RcuParams rp;
    rp.n = n;
    rp.samples = 3000;
    rp.seed = 4321;
    rp.log_m1 = lm;
    rp.log_m2 = lm;
    rp.quad_nodes = 160;

    auto dominates = [&](RcuKind kind, double sim_est, double sim_trials) {
        rp.kind = kind;
        RcuEstimate e = rcu_bound(cfg, rp);
        double se = std::sqrt(sim_est * (1.0 - sim_est) / sim_trials +
                              e.std_error * e.std_error);
        CHECK(e.value >= sim_est - 3.0 * se);
    };
    dominates(RcuKind::user2_sep, sic.est2, double(sp.trials));
    dominates(RcuKind::user1_sep_sic, sic.est1, double(sp.trials));
    dominates(RcuKind::user1_sep_jnn, jnn.est1, double(sp.trials));
    dominates(RcuKind::jep_sic, sic.est_joint, double(sp.trials));
    dominates(RcuKind::jep_jnn, jnn.est_joint, double(sp.trials));
}

TEST_CASE("rcu handles astronomically large codebooks in log domain") {
    ValidatedConfig cfg = make_config(5.0, 0.3, 0.6);
    RcuParams rp;
    rp.n = 16;
    rp.samples = 200;
    rp.seed = 8;
    rp.kind = RcuKind::user2_sep;
    // log M far beyond double overflow in linear space
    rp.log_m1 = 500.0;
    rp.log_m2 = 800.0;
    RcuEstimate e = rcu_bound(cfg, rp);
    CHECK(e.value == 1.0);  // hopeless rate, bound saturates
    rp.log_m2 = 0.0;
    RcuEstimate z = rcu_bound(cfg, rp);
    CHECK(z.value == 0.0);
}

TEST_CASE("sim report json is canonical and complete") {
    ValidatedConfig cfg = make_config(2.0, 0.3, 0.6);
    SimParams p;
    p.n = 8;
    p.trials = 100;
    p.seed = 3;
    p.log_m1 = std::log(4.0);
    p.log_m2 = std::log(4.0);
    SimReport r = run_simulation(cfg, p);
    std::string j = sim_report_to_json(r);
    CHECK(j.find("\"schema\": 1") != std::string::npos);
    CHECK(j.find("config_fingerprint") != std::string::npos);
    CHECK(j.find("report_fingerprint") != std::string::npos);
    CHECK(j.find("\"decoder\": \"sic\"") != std::string::npos);
    CHECK(sim_report_to_json(r) == j);
}
