#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bcdisp/analysis.hpp"
#include "bcdisp/model.hpp"
#include "bcdisp/rng.hpp"

namespace bcdisp {

// one draw of the channel gain H >= 0
double sample_gain(const FadingSpec& spec, RandomStream& rng);

// P{H^2 <= q}
double gain_sq_cdf(const FadingSpec& spec, double q);

// p-quantile of H^2 for p in (0,1); closed form for Rayleigh and
// deterministic, bisection on the cdf otherwise
double gain_sq_quantile(const FadingSpec& spec, double p);

enum class OutageMethod { closed_form, quadrature, monte_carlo };
const char* to_string(OutageMethod m);

struct OutageReport {
    int user = 1;
    double rate = 0.0;
    double outage_prob = 0.0;
    OutageMethod method = OutageMethod::closed_form;
    double std_error = 0.0;  // 0 for exact methods
};

// P{n C_i(H) <= n rate} for the per-user effective capacities
//   C_1(H) = C(H^2 alpha P / beta),  C_2(H) = C(H^2 abar P / (H^2 alpha P + 1)).
// The outage condition inverts to a gain-squared threshold; user 2 rates at
// or above the gain->inf ceiling C(abar/alpha) give outage 1.
OutageReport outage_probability(const ValidatedConfig& cfg, const FadingSpec& spec,
                                int user, double rate, OutageMethod method,
                                std::uint64_t samples = 1000000, std::uint64_t seed = 0);

// Rectangle corner (R1*, R2*) of the rate pairs meeting the per-user outage
// targets, by quantile inversion of the outage condition.
RegionBoundary outage_region(const ValidatedConfig& cfg, const FadingSpec& spec1,
                             const FadingSpec& spec2, double eps1, double eps2);

struct FadingBoundOptions {
    // printed form of the strong-user bound uses the weak user's gain inside
    // the dispersion; set own_gain to evaluate the plausible-typo variant
    bool dispersion_own_gain = false;
    std::optional<FadingSpec> cross_spec;  // gain law for the printed form
    bool force_monte_carlo = false;
    std::uint64_t samples = 200000;
    std::uint64_t seed = 0;
    std::size_t quad_nodes = 400;
};

struct FadingErrorBound {
    double value = 0.0;
    double std_error = 0.0;  // 0 for exact/quadrature paths
    std::string method;      // exact | quadrature | monte_carlo
    bool dispersion_own_gain = false;
};

// E_H[ Q( (n C_i(H) - log M) / sqrt(n V_i(...)) ) ], the dominant term of the
// finite-blocklength error bound under quasi-static fading.
FadingErrorBound fading_error_bound(const ValidatedConfig& cfg, const FadingSpec& spec,
                             int user, std::size_t n, double log_m,
                             const FadingBoundOptions& opts = {});

std::string outage_report_to_json(const OutageReport& r, const std::string& fingerprint);
std::string fading_bound_to_json(const FadingErrorBound& b, int user, std::size_t n,
                             double log_m, const std::string& fingerprint);

}  // namespace bcdisp
