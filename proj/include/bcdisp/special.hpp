#pragma once

#include <cstddef>

namespace bcdisp {

struct Tolerance {
    double abs = 0.0;
    double rel = 0.0;
};

// Gaussian tail Q(x) = P{N(0,1) > x}. Total function; underflows to 0 only
// past x ~ 38 where the value drops below ~1e-308.
double qfunc(double x);

// log Q(x), finite for all finite x (asymptotic expansion in the deep tail
// where qfunc itself underflows).
double log_qfunc(double x);

// Inverse of qfunc on (0,1). Throws std::domain_error outside the open
// interval. Rational approximation polished with Newton steps on qfunc.
double qfunc_inv(double p);

// Regularized incomplete beta I_x(a,b), continued fraction with the
// symmetry switch at x > (a+1)/(a+b+2).
double reg_inc_beta(double x, double a, double b);

// log I_x(a,b); avoids underflow when the direct branch applies, i.e. for
// small tails. Falls back to log(reg_inc_beta) near 1.
double log_reg_inc_beta(double x, double a, double b);

// P{W_1 >= c} for W uniform on the unit sphere in R^n:
//   1                                for c <= -1
//   1 - t(-c)                        for c in (-1,0)
//   t(c) = 0.5 I_{1-c^2}((n-1)/2, 1/2)  for c in [0,1]
//   0                                for c > 1
double sphere_cap_tail(std::size_t n, double c);

// log of the above; exact -inf for c >= 1.
double log_sphere_cap_tail(std::size_t n, double c);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct QuadRule {
    const double* nodes;
    const double* weights;
    std::size_t size;
};
QuadRule gauss_legendre(std::size_t order);

}  // namespace bcdisp
