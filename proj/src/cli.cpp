#include "bcdisp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bcdisp/fingerprint.hpp"
#include "bcdisp/special.hpp"

#include "json.hpp"

namespace bcdisp {

namespace {

using nlohmann::json;

void push_err(std::vector<std::string>& errs, const std::string& ptr, const std::string& msg) {
    errs.push_back(ptr + ": " + msg);
}

void check_keys(const json& obj, const std::string& ptr,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) push_err(errs, ptr + "/" + it.key(), "unknown key");
    }
}

bool want_number(const json& obj, const std::string& ptr, const char* key, bool required,
                 std::vector<std::string>& errs, double& out) {
    if (!obj.contains(key)) {
        if (required) push_err(errs, ptr + "/" + key, "missing required key");
        return false;
    }
    if (!obj[key].is_number()) {
        push_err(errs, ptr + "/" + key, "must be a number");
        return false;
    }
    out = obj[key].get<double>();
    return true;
}

bool want_uint(const json& obj, const std::string& ptr, const char* key, bool required,
               std::vector<std::string>& errs, std::uint64_t& out) {
    if (!obj.contains(key)) {
        if (required) push_err(errs, ptr + "/" + key, "missing required key");
        return false;
    }
    if (!obj[key].is_number_unsigned() && !(obj[key].is_number_integer() &&
                                            obj[key].get<long long>() >= 0)) {
        push_err(errs, ptr + "/" + key, "must be a nonnegative integer");
        return false;
    }
    out = obj[key].get<std::uint64_t>();
    return true;
}

bool want_string(const json& obj, const std::string& ptr, const char* key, bool required,
                 std::vector<std::string>& errs, std::string& out) {
    if (!obj.contains(key)) {
        if (required) push_err(errs, ptr + "/" + key, "missing required key");
        return false;
    }
    if (!obj[key].is_string()) {
        push_err(errs, ptr + "/" + key, "must be a string");
        return false;
    }
    out = obj[key].get<std::string>();
    return true;
}

NoiseSpec parse_noise(const json& obj, const std::string& ptr,
                      std::vector<std::string>& errs) {
    check_keys(obj, ptr, {"family", "variance", "moment4"}, errs);
    std::string fam;
    double variance = 0.0;
    want_string(obj, ptr, "family", true, errs, fam);
    want_number(obj, ptr, "variance", true, errs, variance);
    NoiseFamily family = NoiseFamily::gaussian;
    bool fam_ok = true;
    if (fam == "gaussian") family = NoiseFamily::gaussian;
    else if (fam == "laplace") family = NoiseFamily::laplace;
    else if (fam == "uniform") family = NoiseFamily::uniform;
    else if (fam == "scaled_rademacher_mixture") family = NoiseFamily::scaled_rademacher_mixture;
    else {
        fam_ok = false;
        if (!fam.empty()) push_err(errs, ptr + "/family", "unknown noise family '" + fam + "'");
    }
    double m4 = 0.0;
    bool has_m4 = want_number(obj, ptr, "moment4", false, errs, m4);
    if (family == NoiseFamily::scaled_rademacher_mixture) {
        if (!has_m4) push_err(errs, ptr + "/moment4", "required for scaled_rademacher_mixture");
    } else if (has_m4) {
        push_err(errs, ptr + "/moment4", "only applies to scaled_rademacher_mixture");
    }
    if (!fam_ok || !(variance > 0.0)) {
        if (!(variance > 0.0)) push_err(errs, ptr + "/variance", "must be positive");
        return NoiseSpec{};
    }
    try {
        return make_noise_spec(family, variance, m4);
    } catch (const std::exception& e) {
        push_err(errs, ptr, e.what());
        return NoiseSpec{};
    }
}

FadingSpec parse_fading(const json& obj, const std::string& ptr,
                        std::vector<std::string>& errs) {
    FadingSpec spec;
    std::string fam;
    want_string(obj, ptr, "family", true, errs, fam);
    if (fam == "rayleigh") {
        spec.family = FadingFamily::rayleigh;
        check_keys(obj, ptr, {"family", "scale"}, errs);
        double v = 1.0;
        if (want_number(obj, ptr, "scale", true, errs, v)) spec.scale = v;
    } else if (fam == "rice") {
        spec.family = FadingFamily::rice;
        check_keys(obj, ptr, {"family", "scale", "k_factor"}, errs);
        double v = 1.0;
        if (want_number(obj, ptr, "scale", true, errs, v)) spec.scale = v;
        if (want_number(obj, ptr, "k_factor", true, errs, v)) spec.k_factor = v;
    } else if (fam == "deterministic") {
        spec.family = FadingFamily::deterministic;
        check_keys(obj, ptr, {"family", "gain"}, errs);
        double v = 1.0;
        if (want_number(obj, ptr, "gain", true, errs, v)) spec.gain = v;
    } else if (!fam.empty()) {
        push_err(errs, ptr + "/family", "unknown fading family '" + fam + "'");
    }
    for (const auto& e : fading_violations(spec)) push_err(errs, ptr, e);
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path, {path + ": cannot open"});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(),
                          {e.what()});
    }

    std::vector<std::string> errs;
    ExperimentConfig cfg;
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object", {"/: must be an object"});
    }
    check_keys(doc, "", {"schema", "channel", "fading", "run"}, errs);
    if (doc.contains("schema") && (!doc["schema"].is_number_integer() ||
                                   doc["schema"].get<int>() != 1))
        push_err(errs, "/schema", "unsupported schema version (expected 1)");

    if (!doc.contains("channel") || !doc["channel"].is_object()) {
        push_err(errs, "/channel", "missing required object");
    } else {
        const json& ch = doc["channel"];
        check_keys(ch, "/channel", {"total_power", "alpha", "beta", "noise1", "noise2"}, errs);
        double v = 0.0;
        if (want_number(ch, "/channel", "total_power", true, errs, v)) {
            cfg.channel.total_power = v;
            if (!(v > 0.0)) push_err(errs, "/channel/total_power", "must be positive");
        }
        if (want_number(ch, "/channel", "alpha", true, errs, v)) {
            cfg.channel.alpha = v;
            if (!(v > 0.0 && v < 1.0)) push_err(errs, "/channel/alpha", "must lie strictly in (0,1)");
        }
        if (want_number(ch, "/channel", "beta", true, errs, v)) {
            cfg.channel.beta = v;
            if (!(v > 0.0 && v < 1.0)) push_err(errs, "/channel/beta", "must lie strictly in (0,1)");
        }
        if (ch.contains("noise1") && ch["noise1"].is_object())
            cfg.channel.noise1 = parse_noise(ch["noise1"], "/channel/noise1", errs);
        else
            push_err(errs, "/channel/noise1", "missing required object");
        if (ch.contains("noise2") && ch["noise2"].is_object())
            cfg.channel.noise2 = parse_noise(ch["noise2"], "/channel/noise2", errs);
        else
            push_err(errs, "/channel/noise2", "missing required object");
    }

    if (doc.contains("fading")) {
        if (!doc["fading"].is_object()) {
            push_err(errs, "/fading", "must be an object");
        } else {
            const json& fd = doc["fading"];
            check_keys(fd, "/fading", {"user1", "user2"}, errs);
            if (fd.contains("user1") && fd["user1"].is_object())
                cfg.fading1 = parse_fading(fd["user1"], "/fading/user1", errs);
            else
                push_err(errs, "/fading/user1", "missing required object");
            if (fd.contains("user2") && fd["user2"].is_object())
                cfg.fading2 = parse_fading(fd["user2"], "/fading/user2", errs);
            else
                push_err(errs, "/fading/user2", "missing required object");
        }
    }

    if (doc.contains("run")) {
        if (!doc["run"].is_object()) {
            push_err(errs, "/run", "must be an object");
        } else {
            const json& rn = doc["run"];
            check_keys(rn, "/run",
                       {"seed", "n", "trials", "batch", "decoder", "log_m1", "log_m2",
                        "eps", "eps1", "eps2", "rate_from", "criterion", "grid_points",
                        "alpha_min", "alpha_max", "samples", "quad_nodes", "bound_kind",
                        "dispersion_gain"},
                       errs);
            std::uint64_t u = 0;
            double v = 0.0;
            std::string s;
            if (want_uint(rn, "/run", "seed", false, errs, u)) cfg.seed = u;
            if (want_uint(rn, "/run", "n", false, errs, u)) cfg.n = static_cast<std::size_t>(u);
            if (want_uint(rn, "/run", "trials", false, errs, u)) cfg.trials = u;
            if (want_uint(rn, "/run", "batch", false, errs, u)) cfg.batch = u;
            if (want_uint(rn, "/run", "grid_points", false, errs, u))
                cfg.grid_points = static_cast<std::size_t>(u);
            if (want_uint(rn, "/run", "samples", false, errs, u)) cfg.samples = u;
            if (want_uint(rn, "/run", "quad_nodes", false, errs, u))
                cfg.quad_nodes = static_cast<std::size_t>(u);
            if (want_number(rn, "/run", "log_m1", false, errs, v)) cfg.log_m1 = v;
            if (want_number(rn, "/run", "log_m2", false, errs, v)) cfg.log_m2 = v;
            if (want_number(rn, "/run", "eps", false, errs, v)) cfg.eps = v;
            if (want_number(rn, "/run", "eps1", false, errs, v)) cfg.eps1 = v;
            if (want_number(rn, "/run", "eps2", false, errs, v)) cfg.eps2 = v;
            if (want_number(rn, "/run", "alpha_min", false, errs, v)) cfg.alpha_min = v;
            if (want_number(rn, "/run", "alpha_max", false, errs, v)) cfg.alpha_max = v;
            if (want_string(rn, "/run", "decoder", false, errs, s)) {
                if (s == "sic") cfg.decoder = DecoderKind::sic;
                else if (s == "jnn") cfg.decoder = DecoderKind::jnn;
                else push_err(errs, "/run/decoder", "must be 'sic' or 'jnn'");
            }
            if (want_string(rn, "/run", "rate_from", false, errs, s)) {
                if (s == "sep") cfg.rate_from = RateCriterion::sep;
                else if (s == "jep_corner") cfg.rate_from = RateCriterion::jep_corner;
                else push_err(errs, "/run/rate_from", "must be 'sep' or 'jep_corner'");
            }
            if (want_string(rn, "/run", "criterion", false, errs, s)) {
                if (s == "first" || s == "sep" || s == "jep" || s == "outage") cfg.criterion = s;
                else push_err(errs, "/run/criterion", "must be first|sep|jep|outage");
            }
            if (want_string(rn, "/run", "bound_kind", false, errs, s)) {
                if (s == "user2_sep") cfg.bound_kind = RcuKind::user2_sep;
                else if (s == "user1_sep_sic") cfg.bound_kind = RcuKind::user1_sep_sic;
                else if (s == "user1_sep_jnn") cfg.bound_kind = RcuKind::user1_sep_jnn;
                else if (s == "jep_sic") cfg.bound_kind = RcuKind::jep_sic;
                else if (s == "jep_jnn") cfg.bound_kind = RcuKind::jep_jnn;
                else push_err(errs, "/run/bound_kind", "unknown bound kind '" + s + "'");
            }
            if (want_string(rn, "/run", "dispersion_gain", false, errs, s)) {
                if (s == "own") cfg.fading_bound_own_gain = true;
                else if (s == "as_printed") cfg.fading_bound_own_gain = false;
                else push_err(errs, "/run/dispersion_gain", "must be 'as_printed' or 'own'");
            }
        }
    }

    // channel invariants, reported with pointer prefixes
    for (const auto& e : config_violations(cfg.channel)) push_err(errs, "/channel", e);

    if (!errs.empty()) {
        std::string what = "config validation failed:";
        for (const auto& e : errs) what += "\n  - " + e;
        throw ConfigError(what, errs);
    }
    return cfg;
}

std::string write_atomic(const std::string& dir, const std::string& name,
                         const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::path final_path = fs::path(dir) / name;
    fs::path tmp_path = final_path;
    tmp_path += ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp_path.string());
        out << content;
    }
    fs::rename(tmp_path, final_path);
    return final_path.string();
}

namespace {

std::string channel_canonical(const ChannelConfig& c) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "ch|P=%.17g|a=%.17g|b=%.17g|nf1=%s|v1=%.17g|m41=%.17g|nf2=%s|v2=%.17g|m42=%.17g",
                  c.total_power, c.alpha, c.beta, to_string(c.noise1.family),
                  c.noise1.variance, c.noise1.moment4, to_string(c.noise2.family),
                  c.noise2.variance, c.noise2.moment4);
    return buf;
}

std::string fading_canonical(const FadingSpec& f) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "fd|%s|scale=%.17g|k=%.17g|g=%.17g", to_string(f.family),
                  f.scale, f.k_factor, f.gain);
    return buf;
}

int config_fail(const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
}

// dispatch helper shared by the subcommands
template <typename Fn>
int run_command(const CliOptions& opt, Fn&& fn) {
    try {
        ExperimentConfig cfg = parse_config(opt.config_path);
        if (opt.seed_override) cfg.seed = *opt.seed_override;
        return fn(cfg);
    } catch (const ConfigError& e) {
        return config_fail(e);
    } catch (const SizeGuardError& e) {
        std::cerr << e.what() << "\n";
        return kExitSizeGuard;
    } catch (const std::domain_error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    }
}

double require(const std::optional<double>& v, const char* what) {
    if (!v) throw std::domain_error(std::string("missing required run parameter: ") + what);
    return *v;
}

std::uint64_t require_u(const std::optional<std::uint64_t>& v, const char* what) {
    if (!v) throw std::domain_error(std::string("missing required run parameter: ") + what);
    return *v;
}

std::size_t require_n(const std::optional<std::size_t>& v) {
    if (!v) throw std::domain_error("missing required run parameter: n");
    return *v;
}

void check_eps_open(double e, const char* what) {
    if (!(e > 0.0 && e < 1.0))
        throw std::domain_error(std::string(what) + " must lie strictly in (0,1)");
}

LogSizes resolve_rates(const ExperimentConfig& cfg, const ValidatedConfig& vc) {
    if (cfg.log_m1 && cfg.log_m2) return LogSizes{*cfg.log_m1, *cfg.log_m2};
    if (cfg.log_m1 || cfg.log_m2)
        throw std::domain_error("provide both log_m1 and log_m2, or neither");
    double e1 = require(cfg.eps1, "eps1 (or explicit log_m1/log_m2)");
    double e2 = require(cfg.eps2, "eps2 (or explicit log_m1/log_m2)");
    check_eps_open(e1, "eps1");
    check_eps_open(e2, "eps2");
    return normal_approx_log_m(vc, require_n(cfg.n), e1, e2, cfg.rate_from);
}

std::string now_ms_string() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count();
    return std::to_string(ms);
}

// append the volatile timestamp key to an otherwise canonical json artifact
std::string with_timestamp(const std::string& json_text) {
    auto j = nlohmann::ordered_json::parse(json_text);
    j["generated_unix_ms"] = now_ms_string();
    return j.dump(2) + "\n";
}

}  // namespace

int cmd_region(const CliOptions& opt) {
    return run_command(opt, [&](ExperimentConfig& cfg) {
        ValidatedConfig vc = validate_config(cfg.channel);
        if (!cfg.criterion)
            throw std::domain_error("missing required run parameter: criterion");
        const std::string& crit = *cfg.criterion;
        RegionBoundary b;
        std::string summary;
        if (crit == "first") {
            if (!(cfg.alpha_min > 0.0 && cfg.alpha_max < 1.0 && cfg.alpha_min < cfg.alpha_max))
                throw std::domain_error("alpha grid bounds must satisfy 0 < min < max < 1");
            std::size_t k = std::max<std::size_t>(2, cfg.grid_points);
            std::vector<double> grid(k);
            for (std::size_t i = 0; i < k; ++i)
                grid[i] = cfg.alpha_min +
                          (cfg.alpha_max - cfg.alpha_min) * static_cast<double>(i) /
                              static_cast<double>(k - 1);
            b = first_order_region(vc, grid);
            char s[256];
            std::snprintf(s, sizeof s,
                          "first-order frontier: %zu points, R1 in [%.9g, %.9g], R2 in [%.9g, %.9g]",
                          b.xs.size(), b.xs.front(), b.xs.back(), b.ys.back(), b.ys.front());
            summary = s;
        } else if (crit == "sep") {
            double e1 = require(cfg.eps1, "eps1");
            double e2 = require(cfg.eps2, "eps2");
            check_eps_open(e1, "eps1");
            check_eps_open(e2, "eps2");
            SecondOrderPair pt = sep_second_order_point(vc, e1, e2);
            b.criterion = RegionCriterion::sep;
            b.eps1 = e1;
            b.eps2 = e2;
            b.alpha = cfg.channel.alpha;
            b.total_power = cfg.channel.total_power;
            b.beta = cfg.channel.beta;
            b.zeta1 = cfg.channel.zeta1();
            b.zeta2 = cfg.channel.zeta2();
            b.xs.push_back(pt.l1);
            b.ys.push_back(pt.l2);
            char s[256];
            std::snprintf(s, sizeof s, "sep corner: L1 = %.9g, L2 = %.9g", pt.l1, pt.l2);
            summary = s;
        } else if (crit == "jep") {
            double e = require(cfg.eps, "eps");
            check_eps_open(e, "eps");
            b = jep_second_order_boundary(vc, e, default_jep_l1_grid(vc, e, cfg.grid_points));
            double a1 = std::sqrt(v1_of(cfg.channel)) * qfunc_inv(e);
            double a2 = std::sqrt(v2_of(cfg.channel)) * qfunc_inv(e);
            char s[256];
            std::snprintf(s, sizeof s,
                          "jep boundary: %zu points, asymptotes L1 = %.12g, L2 = %.12g",
                          b.xs.size(), a1, a2);
            summary = s;
        } else if (crit == "outage") {
            if (!cfg.fading1 || !cfg.fading2)
                throw std::domain_error("outage region needs the fading block");
            double e1 = require(cfg.eps1, "eps1");
            double e2 = require(cfg.eps2, "eps2");
            check_eps_open(e1, "eps1");
            check_eps_open(e2, "eps2");
            b = outage_region(vc, *cfg.fading1, *cfg.fading2, e1, e2);
            char s[256];
            std::snprintf(s, sizeof s, "outage corner: R1 = %.9g, R2 = %.9g", b.xs[0], b.ys[0]);
            summary = s;
        } else {
            throw std::domain_error("unknown region criterion: " + crit);
        }
        std::string canon = channel_canonical(cfg.channel) + "|region|" + crit;
        char extra[160];
        std::snprintf(extra, sizeof extra, "|e1=%.17g|e2=%.17g|e=%.17g|gp=%zu",
                      cfg.eps1.value_or(-1.0), cfg.eps2.value_or(-1.0),
                      cfg.eps.value_or(-1.0), cfg.grid_points);
        canon += extra;
        if (cfg.fading1) canon += "|f1=" + fading_canonical(*cfg.fading1);
        if (cfg.fading2) canon += "|f2=" + fading_canonical(*cfg.fading2);
        std::string fp = fingerprint_hex(canon);
        std::string path =
            write_atomic(opt.out_dir, "region_" + crit + "_" + fp + ".csv",
                         region_to_csv(b, fp));
        std::cout << summary << "\n" << path << "\n";
        return kExitOk;
    });
}

int cmd_simulate(const CliOptions& opt) {
    return run_command(opt, [&](ExperimentConfig& cfg) {
        ValidatedConfig vc = validate_config(cfg.channel);
        SimParams p;
        p.n = require_n(cfg.n);
        p.trials = require_u(cfg.trials, "trials");
        if (p.trials < 1) throw std::domain_error("trials must be >= 1");
        p.seed = require_u(cfg.seed, "seed (all randomized commands require one)");
        p.batch = cfg.batch;
        p.decoder = cfg.decoder;
        p.workers = opt.workers;
        p.fading1 = cfg.fading1;
        p.fading2 = cfg.fading2;
        LogSizes ls = resolve_rates(cfg, vc);
        p.log_m1 = ls.log_m1;
        p.log_m2 = ls.log_m2;
        SimReport r = run_simulation(vc, p);
        std::string path = write_atomic(opt.out_dir, "sim_" + r.config_fingerprint + ".json",
                                        with_timestamp(sim_report_to_json(r)));
        char s[320];
        std::snprintf(s, sizeof s,
                      "P_e1 = %.6g [%.6g, %.6g]  P_e2 = %.6g [%.6g, %.6g]  P_eJ = %.6g [%.6g, %.6g]",
                      r.est1, r.ci1.lo, r.ci1.hi, r.est2, r.ci2.lo, r.ci2.hi, r.est_joint,
                      r.ci_joint.lo, r.ci_joint.hi);
        std::cout << s << "\n" << path << "\n";
        return kExitOk;
    });
}

int cmd_rcu(const CliOptions& opt) {
    return run_command(opt, [&](ExperimentConfig& cfg) {
        ValidatedConfig vc = validate_config(cfg.channel);
        if (!cfg.bound_kind) throw std::domain_error("missing required run parameter: bound_kind");
        RcuParams p;
        p.n = require_n(cfg.n);
        p.kind = *cfg.bound_kind;
        p.samples = cfg.samples;
        if (p.samples < 1) throw std::domain_error("samples must be >= 1");
        p.seed = require_u(cfg.seed, "seed (all randomized commands require one)");
        p.quad_nodes = cfg.quad_nodes;
        p.workers = opt.workers;
        LogSizes ls = resolve_rates(cfg, vc);
        p.log_m1 = ls.log_m1;
        p.log_m2 = ls.log_m2;
        RcuEstimate r = rcu_bound(vc, p);
        std::string path = write_atomic(opt.out_dir, "rcu_" + r.config_fingerprint + ".json",
                                        with_timestamp(rcu_estimate_to_json(r)));
        char s[160];
        std::snprintf(s, sizeof s, "%s bound = %.6g (se %.3g, %llu samples)", to_string(r.kind),
                      r.value, r.std_error, static_cast<unsigned long long>(r.samples));
        std::cout << s << "\n" << path << "\n";
        return kExitOk;
    });
}

int cmd_fading(const CliOptions& opt) {
    return run_command(opt, [&](ExperimentConfig& cfg) {
        ValidatedConfig vc = validate_config(cfg.channel);
        if (!cfg.fading1 || !cfg.fading2)
            throw std::domain_error("cmd_fading needs the fading block with both users");
        double e1 = require(cfg.eps1, "eps1");
        double e2 = require(cfg.eps2, "eps2");
        check_eps_open(e1, "eps1");
        check_eps_open(e2, "eps2");
        std::size_t n = require_n(cfg.n);

        RegionBoundary region = outage_region(vc, *cfg.fading1, *cfg.fading2, e1, e2);
        double log_m1, log_m2;
        if (cfg.log_m1 && cfg.log_m2) {
            log_m1 = *cfg.log_m1;
            log_m2 = *cfg.log_m2;
        } else {
            log_m1 = static_cast<double>(n) * region.xs[0];
            log_m2 = static_cast<double>(n) * region.ys[0];
        }

        FadingBoundOptions bopts;
        bopts.dispersion_own_gain = cfg.fading_bound_own_gain;
        bopts.cross_spec = *cfg.fading2;
        bopts.samples = cfg.samples;
        bopts.seed = cfg.seed.value_or(0);
        bopts.quad_nodes = std::max<std::size_t>(cfg.quad_nodes, 200);
        FadingErrorBound b1 = fading_error_bound(vc, *cfg.fading1, 1, n, log_m1, bopts);
        FadingErrorBound b2 = fading_error_bound(vc, *cfg.fading2, 2, n, log_m2, bopts);

        std::string canon = channel_canonical(cfg.channel) + "|fading|" +
                            fading_canonical(*cfg.fading1) + "|" +
                            fading_canonical(*cfg.fading2);
        char extra[200];
        std::snprintf(extra, sizeof extra, "|e1=%.17g|e2=%.17g|n=%zu|lm1=%.17g|lm2=%.17g|own=%d",
                      e1, e2, n, log_m1, log_m2, cfg.fading_bound_own_gain ? 1 : 0);
        canon += extra;
        std::string fp = fingerprint_hex(canon);

        std::string p1 = write_atomic(opt.out_dir, "fading_region_" + fp + ".csv",
                                      region_to_csv(region, fp));
        std::string p2 = write_atomic(opt.out_dir, "fading_bound_user1_" + fp + ".json",
                                      with_timestamp(fading_bound_to_json(b1, 1, n, log_m1, fp)));
        std::string p3 = write_atomic(opt.out_dir, "fading_bound_user2_" + fp + ".json",
                                      with_timestamp(fading_bound_to_json(b2, 2, n, log_m2, fp)));
        char s[320];
        std::snprintf(s, sizeof s,
                      "outage corner: R1 = %.9g, R2 = %.9g; error bounds: user1 = %.6g (%s), "
                      "user2 = %.6g (%s)",
                      region.xs[0], region.ys[0], b1.value, b1.method.c_str(), b2.value,
                      b2.method.c_str());
        std::cout << s << "\n" << p1 << "\n" << p2 << "\n" << p3 << "\n";
        return kExitOk;
    });
}

}  // namespace bcdisp
