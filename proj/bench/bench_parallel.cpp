// Throughput comparison of the serial reference path (workers=1) against the
// OpenMP path, with a bit-identity check between the two. Build and run:
//   cmake --build build --target bench_parallel && ./build/bench_parallel

#include <chrono>
#include <cmath>
#include <cstdio>

#include "bcdisp/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace bcdisp;

namespace {

ValidatedConfig bench_config() {
    ChannelConfig c;
    c.total_power = 5.0;
    c.alpha = 0.3;
    c.beta = 0.6;
    c.noise1 = make_noise_spec(NoiseFamily::gaussian, 0.6);
    c.noise2 = make_noise_spec(NoiseFamily::gaussian, 1.0);
    return validate_config(c);
}

template <typename Fn>
double time_s(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int mismatches = 0;

void row(const char* name, double serial_s, double parallel_s, double units,
         const char* unit_name, bool identical) {
    std::printf("%-28s %9.2f %s/s serial   %9.2f %s/s parallel   speedup %.2fx   %s\n",
                name, units / serial_s, unit_name, units / parallel_s, unit_name,
                serial_s / parallel_s, identical ? "identical" : "MISMATCH");
    if (!identical) ++mismatches;
}

}  // namespace

int main() {
    ValidatedConfig cfg = bench_config();
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("parallel path uses %d threads\n\n", threads);

    {
        SimParams p;
        p.n = 64;
        p.trials = 20000;
        p.seed = 1;
        p.log_m1 = std::log(256.0);
        p.log_m2 = std::log(256.0);
        p.decoder = DecoderKind::sic;
        p.workers = 1;
        SimReport a;
        double ts = time_s([&] { a = run_simulation(cfg, p); });
        p.workers = 0;
        SimReport b;
        double tp = time_s([&] { b = run_simulation(cfg, p); });
        row("simulate full sic", ts, tp, double(p.trials), "trials",
            a.report_fingerprint == b.report_fingerprint);
    }
    {
        SimParams p;
        p.n = 64;
        p.trials = 4000;
        p.seed = 2;
        p.log_m1 = std::log(256.0);
        p.log_m2 = std::log(256.0);
        p.decoder = DecoderKind::jnn;
        p.workers = 1;
        SimReport a;
        double ts = time_s([&] { a = run_simulation(cfg, p); });
        p.workers = 0;
        SimReport b;
        double tp = time_s([&] { b = run_simulation(cfg, p); });
        row("simulate full jnn", ts, tp, double(p.trials), "trials",
            a.report_fingerprint == b.report_fingerprint);
    }
    {
        SimParams p;
        p.n = 256;
        p.trials = 100000;
        p.seed = 3;
        p.log_m1 = 100.0;  // ensemble regime, no codebook fits
        p.log_m2 = 80.0;
        p.decoder = DecoderKind::sic;
        p.workers = 1;
        SimReport a;
        double ts = time_s([&] { a = run_simulation(cfg, p); });
        p.workers = 0;
        SimReport b;
        double tp = time_s([&] { b = run_simulation(cfg, p); });
        row("simulate ensemble sic", ts, tp, double(p.trials), "trials",
            a.report_fingerprint == b.report_fingerprint);
    }
    {
        RcuParams p;
        p.n = 64;
        p.samples = 4000;
        p.seed = 4;
        p.log_m1 = std::log(64.0);
        p.log_m2 = std::log(64.0);
        p.kind = RcuKind::jep_jnn;
        p.quad_nodes = 200;
        p.workers = 1;
        RcuEstimate a;
        double ts = time_s([&] { a = rcu_bound(cfg, p); });
        p.workers = 0;
        RcuEstimate b;
        double tp = time_s([&] { b = rcu_bound(cfg, p); });
        row("rcu jep_jnn", ts, tp, double(p.samples), "samples",
            a.value == b.value && a.std_error == b.std_error);
    }

    if (mismatches) {
        std::printf("\n%d path(s) diverged between serial and parallel\n", mismatches);
        return 1;
    }
    std::printf("\nall parallel results bit-identical to the serial reference\n");
    return 0;
}
