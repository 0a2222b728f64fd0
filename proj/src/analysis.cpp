#include "bcdisp/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bcdisp/special.hpp"

#include "json.hpp"

namespace bcdisp {

double capacity(double snr) {
    if (!(snr >= 0.0)) throw std::domain_error("capacity: snr must be >= 0");
    return 0.5 * std::log1p(snr);
}

double dispersion_v1(double p, double beta, double zeta) {
    if (!(p >= 0.0)) throw std::domain_error("dispersion_v1: p must be >= 0");
    if (!(beta > 0.0)) throw std::domain_error("dispersion_v1: beta must be > 0");
    if (!(zeta >= beta * beta))
        throw std::domain_error("dispersion_v1: zeta must be >= beta^2");
    double num = p * p * (zeta - beta * beta) + 4.0 * p * beta * beta * beta;
    double den = 4.0 * beta * beta * (p + beta) * (p + beta);
    return num / den;
}

double dispersion_v2(double p, double p_bar, double beta, double zeta) {
    if (!(p >= 0.0)) throw std::domain_error("dispersion_v2: p must be >= 0");
    if (!(p_bar >= 0.0)) throw std::domain_error("dispersion_v2: p_bar must be >= 0");
    if (!(beta > 0.0)) throw std::domain_error("dispersion_v2: beta must be > 0");
    if (!(zeta >= beta * beta))
        throw std::domain_error("dispersion_v2: zeta must be >= beta^2");
    double pb = p_bar + beta;
    double num = p * p * (zeta - beta * beta + 4.0 * p_bar) + 4.0 * p * pb * pb * pb;
    double den = 4.0 * pb * pb * (p + pb) * (p + pb);
    return num / den;
}

double v1_of(const ChannelConfig& cfg) {
    return dispersion_v1(cfg.p1(), cfg.beta, cfg.zeta1());
}

double v2_of(const ChannelConfig& cfg) {
    return dispersion_v2(cfg.p2(), cfg.p1(), 1.0, cfg.zeta2());
}

double c1_of(const ChannelConfig& cfg) { return capacity(cfg.p1() / cfg.beta); }

double c2_of(const ChannelConfig& cfg) { return capacity(cfg.p2() / (cfg.p1() + 1.0)); }

const char* to_string(RegionCriterion c) {
    switch (c) {
        case RegionCriterion::first_order: return "first_order";
        case RegionCriterion::sep: return "sep";
        case RegionCriterion::jep: return "jep";
        case RegionCriterion::outage: return "outage";
    }
    return "?";
}

namespace {

void fill_meta(RegionBoundary& b, const ChannelConfig& cfg) {
    b.alpha = cfg.alpha;
    b.total_power = cfg.total_power;
    b.beta = cfg.beta;
    b.zeta1 = cfg.zeta1();
    b.zeta2 = cfg.zeta2();
}

}  // namespace

RegionBoundary first_order_region(const ValidatedConfig& vcfg,
                                  const std::vector<double>& alpha_grid) {
    const ChannelConfig& cfg = vcfg.get();
    if (alpha_grid.empty())
        throw std::domain_error("first_order_region: alpha grid must be nonempty");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        double a = alpha_grid[i];
        if (!(a > 0.0 && a < 1.0))
            throw std::domain_error("first_order_region: alpha grid values must lie in (0,1)");
        if (i > 0 && !(a > alpha_grid[i - 1]))
            throw std::domain_error("first_order_region: alpha grid must be strictly increasing");
    }
    RegionBoundary b;
    b.criterion = RegionCriterion::first_order;
    fill_meta(b, cfg);
    b.xs.reserve(alpha_grid.size());
    b.ys.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        double p = cfg.total_power;
        b.xs.push_back(capacity(a * p / cfg.beta));
        b.ys.push_back(capacity((1.0 - a) * p / (a * p + 1.0)));
    }
    return b;
}

SecondOrderPair sep_second_order_point(const ValidatedConfig& vcfg, double eps1, double eps2) {
    const ChannelConfig& cfg = vcfg.get();
    SecondOrderPair pt;
    pt.l1 = std::sqrt(v1_of(cfg)) * qfunc_inv(eps1);
    pt.l2 = std::sqrt(v2_of(cfg)) * qfunc_inv(eps2);
    return pt;
}

RegionBoundary jep_second_order_boundary(const ValidatedConfig& vcfg, double eps,
                                         const std::vector<double>& l1_grid) {
    const ChannelConfig& cfg = vcfg.get();
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("jep_second_order_boundary: eps must lie in (0,1)");
    double s1 = std::sqrt(v1_of(cfg));
    double s2 = std::sqrt(v2_of(cfg));
    RegionBoundary b;
    b.criterion = RegionCriterion::jep;
    fill_meta(b, cfg);
    b.eps1 = eps;
    b.eps2 = eps;
    b.xs.reserve(l1_grid.size());
    b.ys.reserve(l1_grid.size());
    for (double l1 : l1_grid) {
        double q1 = qfunc(l1 / s1);
        if (!(q1 < eps)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "jep boundary: l1 = %.17g is at or below the asymptote %.17g",
                          l1, s1 * qfunc_inv(eps));
            throw std::domain_error(buf);
        }
        // (1-q1)(1-q2) = 1-eps  =>  q2 = (eps - q1) / (1 - q1)
        double q2 = (eps - q1) / (1.0 - q1);
        b.xs.push_back(l1);
        b.ys.push_back(s2 * qfunc_inv(q2));
    }
    return b;
}

std::vector<double> default_jep_l1_grid(const ValidatedConfig& vcfg, double eps,
                                        std::size_t count) {
    if (count < 2) throw std::domain_error("default_jep_l1_grid: count must be >= 2");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("default_jep_l1_grid: eps must lie in (0,1)");
    double s1 = std::sqrt(v1_of(vcfg.get()));
    double asym = s1 * qfunc_inv(eps);
    // offsets from the asymptote, log spaced from 1e-7*s1 to 8*s1
    double lo = 1e-7 * s1, hi = 8.0 * s1;
    double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
    std::vector<double> grid(count);
    double off = lo;
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = asym + off;
        off *= ratio;
    }
    grid.back() = asym + hi;
    return grid;
}

LogSizes normal_approx_log_m(const ValidatedConfig& vcfg, std::size_t n, double eps1,
                             double eps2, RateCriterion criterion) {
    const ChannelConfig& cfg = vcfg.get();
    if (n < 1) throw std::domain_error("normal_approx_log_m: n must be >= 1");
    SecondOrderPair pt;
    if (criterion == RateCriterion::sep) {
        pt = sep_second_order_point(vcfg, eps1, eps2);
    } else {
        double eps = eps1 + eps2;
        if (!(eps > 0.0 && eps < 1.0))
            throw std::domain_error("normal_approx_log_m: joint eps1+eps2 must lie in (0,1)");
        double q = qfunc_inv(1.0 - std::sqrt(1.0 - eps));
        pt.l1 = std::sqrt(v1_of(cfg)) * q;
        pt.l2 = std::sqrt(v2_of(cfg)) * q;
    }
    double rn = std::sqrt(static_cast<double>(n));
    LogSizes out;
    out.log_m1 = static_cast<double>(n) * c1_of(cfg) - rn * pt.l1;
    out.log_m2 = static_cast<double>(n) * c2_of(cfg) - rn * pt.l2;
    if (out.log_m1 < 0.0 || out.log_m2 < 0.0)
        throw std::domain_error(
            "normal_approx_log_m: blocklength too small for the target error rates");
    return out;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string region_to_csv(const RegionBoundary& b, const std::string& fingerprint) {
    std::string out;
    out += "# schema=1 kind=region criterion=";
    out += to_string(b.criterion);
    out += " fingerprint=" + fingerprint;
    out += " alpha=" + g17(b.alpha) + " P=" + g17(b.total_power) + " beta=" + g17(b.beta);
    out += " zeta1=" + g17(b.zeta1) + " zeta2=" + g17(b.zeta2) + "\n";
    out += "criterion,eps1,eps2,x,y\n";
    for (std::size_t i = 0; i < b.xs.size(); ++i) {
        out += to_string(b.criterion);
        out += ',';
        out += g17(b.eps1);
        out += ',';
        out += g17(b.eps2);
        out += ',';
        out += g17(b.xs[i]);
        out += ',';
        out += g17(b.ys[i]);
        out += '\n';
    }
    return out;
}

std::string region_to_json(const RegionBoundary& b, const std::string& fingerprint) {
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = "region";
    j["criterion"] = to_string(b.criterion);
    j["config_fingerprint"] = fingerprint;
    auto put = [&j](const char* k, double v) {
        if (std::isnan(v)) j[k] = nullptr; else j[k] = v;
    };
    put("eps1", b.eps1);
    put("eps2", b.eps2);
    put("alpha", b.alpha);
    put("total_power", b.total_power);
    put("beta", b.beta);
    put("zeta1", b.zeta1);
    put("zeta2", b.zeta2);
    j["x"] = b.xs;
    j["y"] = b.ys;
    return j.dump(2) + "\n";
}

}  // namespace bcdisp
