#include "bcdisp/special.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace bcdisp {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440084436210485;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double qfunc(double x) {
    return 0.5 * std::erfc(x * kSqrt1_2);
}

double log_qfunc(double x) {
    if (x < 30.0) {
        double q = qfunc(x);
        if (q > 0.0) return std::log(q);
    }
    // Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6) for large x
    double x2 = x * x;
    double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - kLogSqrt2Pi - std::log(x) + std::log(series);
}

double qfunc_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("qfunc_inv: p must lie in (0,1)");

    // Acklam's rational approximation for the standard normal quantile,
    // evaluated for the lower-tail probability 1-p, then negated:
    // Q^{-1}(p) = -Phi^{-1}(p).
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;

    double z;  // z = Phi^{-1}(p)
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double x = -z;  // Q^{-1}(p)
    // Newton polish on Q(x) - p; phi(x) stays representable wherever p does.
    for (int it = 0; it < 2; ++it) {
        double phi = std::exp(-0.5 * x * x - kLogSqrt2Pi);
        if (phi == 0.0) break;
        x += (qfunc(x) - p) / phi;
    }
    return x;
}

namespace {

double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// modified Lentz continued fraction for I_x(a,b), valid for
// x < (a+1)/(a+b+2)
double betacf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double cfc = 1.0;
    double cfd = 1.0 - qab * x / qap;
    if (std::fabs(cfd) < tiny) cfd = tiny;
    cfd = 1.0 / cfd;
    double h = cfd;
    for (int m = 1; m <= 300; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        cfd = 1.0 + aa * cfd;
        if (std::fabs(cfd) < tiny) cfd = tiny;
        cfc = 1.0 + aa / cfc;
        if (std::fabs(cfc) < tiny) cfc = tiny;
        cfd = 1.0 / cfd;
        h *= cfd * cfc;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        cfd = 1.0 + aa * cfd;
        if (std::fabs(cfd) < tiny) cfd = tiny;
        cfc = 1.0 + aa / cfc;
        if (std::fabs(cfc) < tiny) cfc = tiny;
        cfd = 1.0 / cfd;
        double del = cfd * cfc;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

void check_beta_args(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("reg_inc_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("reg_inc_beta: x must lie in [0,1]");
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
    check_beta_args(x, a, b);
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double lpre = a * std::log(x) + b * std::log1p(-x) - std::log(a) - lbeta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lpre) * betacf(x, a, b);
    double lpre2 = b * std::log1p(-x) + a * std::log(x) - std::log(b) - lbeta(b, a);
    return 1.0 - std::exp(lpre2) * betacf(1.0 - x, b, a);
}

double log_reg_inc_beta(double x, double a, double b) {
    check_beta_args(x, a, b);
    if (x == 0.0) return -kInf;
    if (x == 1.0) return 0.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        double lpre = a * std::log(x) + b * std::log1p(-x) - std::log(a) - lbeta(a, b);
        return lpre + std::log(betacf(x, a, b));
    }
    double lpre2 = b * std::log1p(-x) + a * std::log(x) - std::log(b) - lbeta(b, a);
    return std::log1p(-std::exp(lpre2) * betacf(1.0 - x, b, a));
}

namespace {

void check_cap_args(std::size_t n) {
    if (n < 2) throw std::domain_error("sphere_cap_tail: n must be >= 2");
}

}  // namespace

namespace {

// Two algebraically equal forms of the nonnegative-c tail; each is evaluated
// only where its incomplete-beta argument sits in the direct continued
// fraction regime, which keeps the small quantity on the computed side:
//   large c:  0.5 I_{1-c^2}(a, 1/2)          (deep tail, log safe)
//   small c:  0.5 (1 - I_{c^2}(1/2, a))      (near 1/2, c^2 carried exactly)
bool cap_uses_direct_form(double c, double half_a) {
    return c * c >= 1.5 / (half_a + 2.5);
}

}  // namespace

double sphere_cap_tail(std::size_t n, double c) {
    check_cap_args(n);
    if (c >= 1.0) return 0.0;
    if (c <= -1.0) return 1.0;
    double half_a = 0.5 * static_cast<double>(n - 1);
    double pos = std::fabs(c);
    double tail_pos;
    if (cap_uses_direct_form(pos, half_a)) {
        double x = (1.0 - pos) * (1.0 + pos);
        tail_pos = 0.5 * reg_inc_beta(x, half_a, 0.5);
    } else {
        tail_pos = 0.5 * (1.0 - reg_inc_beta(pos * pos, 0.5, half_a));
    }
    return c >= 0.0 ? tail_pos : 1.0 - tail_pos;
}

double log_sphere_cap_tail(std::size_t n, double c) {
    check_cap_args(n);
    if (c >= 1.0) return -kInf;
    if (c <= -1.0) return 0.0;
    double half_a = 0.5 * static_cast<double>(n - 1);
    if (c >= 0.0) {
        if (cap_uses_direct_form(c, half_a)) {
            double x = (1.0 - c) * (1.0 + c);
            return std::log(0.5) + log_reg_inc_beta(x, half_a, 0.5);
        }
        return std::log(0.5) + std::log1p(-reg_inc_beta(c * c, 0.5, half_a));
    }
    return std::log1p(-sphere_cap_tail(n, -c));
}

namespace {

struct GlTable {
    std::vector<double> nodes, weights;
};

// Newton iteration on Legendre polynomials; standard construction.
GlTable build_gauss_legendre(std::size_t order) {
    GlTable t;
    t.nodes.resize(order);
    t.weights.resize(order);
    const std::size_t m = (order + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        t.nodes[i] = -x;
        t.nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        t.weights[i] = w;
        t.weights[order - 1 - i] = w;
    }
    return t;
}

std::map<std::size_t, GlTable> gl_cache;
std::mutex gl_mutex;

}  // namespace

QuadRule gauss_legendre(std::size_t order) {
    if (order == 0) throw std::domain_error("gauss_legendre: order must be positive");
    std::lock_guard<std::mutex> lock(gl_mutex);
    auto it = gl_cache.find(order);
    if (it == gl_cache.end())
        it = gl_cache.emplace(order, build_gauss_legendre(order)).first;
    return QuadRule{it->second.nodes.data(), it->second.weights.data(), order};
}

}  // namespace bcdisp
