#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "bcdisp/analysis.hpp"
#include "bcdisp/codec.hpp"
#include "bcdisp/model.hpp"

namespace bcdisp {

// thrown when a request exceeds the explicit-decoding size guards
class SizeGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// thrown on quadrature / numeric breakdown
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfidenceInterval {
    double lo = 0.0, hi = 1.0;
};

// Wilson score interval
ConfidenceInterval confidence_interval(std::uint64_t successes, std::uint64_t trials,
                                       double level);

// ---- pairwise-error kernels -------------------------------------------------

// P{ density(W, center, params) >= t } for W uniform on the sphere of radius
// sqrt(n * params.signal_power). Reduces to a sphere cap:
//   theta = D (t - n C(S/D)) - D ||c||^2 / (2(S+D)) + (||c||^2 + nS) / 2
//   result = sphere_cap_tail(n, theta / (||c|| sqrt(nS)))
double g_cap(double t, std::span<const double> center, const DensityParams& params,
             std::size_t n);

// log-domain core; depends on the center through its squared norm only
double log_g_cap(double t, double center_sq_norm, const DensityParams& params,
                 std::size_t n);

// P over independent spherical (U,V) of power (abar P, alpha P) that the
// joint density with params (P, beta) exceeds t, by Gauss-Legendre
// integration over the angle between y1 and V.
double g_joint(double t, std::span<const double> y1, const ValidatedConfig& cfg,
               std::size_t n, std::size_t quad_nodes = 200);

double log_g_joint(double t, double y1_sq_norm, const ValidatedConfig& cfg,
                   std::size_t n, std::size_t quad_nodes = 200);

// ---- ensemble simulation ----------------------------------------------------

enum class DecoderKind { sic, jnn };
const char* to_string(DecoderKind d);

// full: materialize codebooks and run the literal decoders (needs
//       M1*M2 <= 2^20 and n <= 1024).
// ensemble: per trial, draw only the transmitted pair; competitor wins are
//       Bernoulli draws from the exact conditional win probability given by
//       the sphere-cap tail. Marginals of err1/err2 are exact for nn/sic at
//       any codebook size; the joint indicator treats the two users'
//       competitor ensembles as independent. Not available for jnn.
enum class SimMode { automatic, full, ensemble };
const char* to_string(SimMode m);

struct SimParams {
    std::size_t n = 0;
    double log_m1 = 0.0, log_m2 = 0.0;  // nats
    DecoderKind decoder = DecoderKind::sic;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t batch = 100;  // trials per codebook redraw in full mode
    int workers = 0;            // 0 = all available; 1 = serial reference path
    SimMode mode = SimMode::automatic;
    std::optional<FadingSpec> fading1, fading2;  // quasi-static gains
};

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t err1 = 0, err2 = 0, err_joint = 0;
    double est1 = 0.0, est2 = 0.0, est_joint = 0.0;
    ConfidenceInterval ci1, ci2, ci_joint;  // two-sided 95%
    std::uint64_t seed = 0, batch = 0;
    std::size_t n = 0;
    double log_m1 = 0.0, log_m2 = 0.0;
    DecoderKind decoder = DecoderKind::sic;
    SimMode mode = SimMode::full;  // mode that actually ran
    bool faded = false;
    std::string config_fingerprint;
    std::string report_fingerprint;  // over all result fields
};

// Deterministic in (cfg, params, seed, trials, batch) for any worker count:
// every trial owns a counter-based stream keyed by its global index and
// batches reduce in index order.
SimReport run_simulation(const ValidatedConfig& cfg, const SimParams& params);

std::string sim_report_to_json(const SimReport& r);

// ---- random coding union bounds ----------------------------------------------

enum class RcuKind { user2_sep, user1_sep_sic, user1_sep_jnn, jep_sic, jep_jnn };
const char* to_string(RcuKind k);

struct RcuParams {
    std::size_t n = 0;
    double log_m1 = 0.0, log_m2 = 0.0;
    RcuKind kind = RcuKind::user2_sep;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t quad_nodes = 200;
    int workers = 0;
};

struct RcuEstimate {
    double value = 0.0;      // in [0,1]
    double std_error = 0.0;
    std::uint64_t samples = 0;
    RcuKind kind = RcuKind::user2_sep;
    std::size_t n = 0;
    double log_m1 = 0.0, log_m2 = 0.0;
    std::uint64_t seed = 0;
    std::string config_fingerprint;
};

// Monte Carlo average of the per-sample union expression
// min{1, sum_i (M_i - 1) g_i(t_i)} with every g evaluated analytically
// (sphere caps, joint term by quadrature). No codebook size limits.
RcuEstimate rcu_bound(const ValidatedConfig& cfg, const RcuParams& params);

std::string rcu_estimate_to_json(const RcuEstimate& r);

}  // namespace bcdisp
