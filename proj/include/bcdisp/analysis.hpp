#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bcdisp/model.hpp"

namespace bcdisp {

// 0.5 * ln(1 + snr), nats per channel use
double capacity(double snr);

// Second-order variance coefficient of the strong user's private stream:
//   (p^2 (zeta - beta^2) + 4 p beta^3) / (4 beta^2 (p + beta)^2)
double dispersion_v1(double p, double beta, double zeta);

// Variance coefficient with an interfering stream of power p_bar:
//   (p^2 (zeta - beta^2 + 4 p_bar) + 4 p (p_bar + beta)^3)
//   / (4 (p_bar + beta)^2 (p + p_bar + beta)^2)
double dispersion_v2(double p, double p_bar, double beta, double zeta);

// Config-level shorthands: V1(alpha P, beta, zeta1), V2(abar P, alpha P, 1, zeta2)
double v1_of(const ChannelConfig& cfg);
double v2_of(const ChannelConfig& cfg);

// First-order rates of the two streams at the given power split.
double c1_of(const ChannelConfig& cfg);  // C(alpha P / beta)
double c2_of(const ChannelConfig& cfg);  // C(abar P / (alpha P + 1))

struct RatePair {
    double r1 = 0.0, r2 = 0.0;
};

struct SecondOrderPair {
    double l1 = 0.0, l2 = 0.0;
};

enum class RegionCriterion { first_order, sep, jep, outage };
const char* to_string(RegionCriterion c);

struct RegionBoundary {
    RegionCriterion criterion = RegionCriterion::first_order;
    std::vector<double> xs, ys;  // boundary points sorted by x

    static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    double eps1 = kNaN;  // sep/outage: per-user targets; jep: joint target in eps1
    double eps2 = kNaN;
    double alpha = kNaN;
    double total_power = kNaN;
    double beta = kNaN;
    double zeta1 = kNaN;
    double zeta2 = kNaN;
};

// Rectangle corners (C(alpha P/beta), C(abar P/(alpha P+1))) over the alpha
// grid; the corners themselves trace the upper-right frontier of the union.
RegionBoundary first_order_region(const ValidatedConfig& cfg,
                                  const std::vector<double>& alpha_grid);

// Corner of the second-order achievable set under per-user error targets:
// L1 = sqrt(V1) Qinv(eps1), L2 = sqrt(V2) Qinv(eps2).
SecondOrderPair sep_second_order_point(const ValidatedConfig& cfg, double eps1, double eps2);

// Boundary of the joint-error second-order set. The dispersion matrix is
// diagonal, so membership reduces to the product constraint
//   (1 - Q(l1/sqrt(V1))) (1 - Q(l2/sqrt(V2))) >= 1 - eps,
// and the curve solves it with equality. Grid values at or below the l1
// asymptote sqrt(V1) Qinv(eps) are infeasible and raise std::domain_error.
RegionBoundary jep_second_order_boundary(const ValidatedConfig& cfg, double eps,
                                         const std::vector<double>& l1_grid);

// Default l1 grid for the jep boundary: log-spaced offsets from the
// asymptote so both knee and flats are resolved.
std::vector<double> default_jep_l1_grid(const ValidatedConfig& cfg, double eps,
                                        std::size_t count = 201);

enum class RateCriterion { sep, jep_corner };

struct LogSizes {
    double log_m1 = 0.0, log_m2 = 0.0;  // nats
};

// log Mi = n Ci - sqrt(n) Li with (L1,L2) the sep corner at (eps1,eps2), or
// for jep_corner the symmetric boundary point at joint target eps1+eps2.
// The vanishing O(log n) correction carries no derivable constant and is
// dropped. Throws std::domain_error if either size comes out negative.
LogSizes normal_approx_log_m(const ValidatedConfig& cfg, std::size_t n, double eps1,
                             double eps2, RateCriterion criterion);

// CSV with a fingerprint comment line followed by
// "criterion,eps1,eps2,x,y"; numbers at 17 significant digits.
std::string region_to_csv(const RegionBoundary& b, const std::string& fingerprint);
std::string region_to_json(const RegionBoundary& b, const std::string& fingerprint);

}  // namespace bcdisp
