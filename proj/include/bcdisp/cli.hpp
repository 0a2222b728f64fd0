#pragma once

#include <optional>
#include <string>

#include "bcdisp/analysis.hpp"
#include "bcdisp/fading.hpp"
#include "bcdisp/model.hpp"
#include "bcdisp/montecarlo.hpp"

namespace bcdisp {

// Parsed experiment description; the channel block is mandatory, everything
// else depends on the subcommand.
struct ExperimentConfig {
    ChannelConfig channel;
    std::optional<FadingSpec> fading1, fading2;

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> trials;
    std::uint64_t batch = 100;
    DecoderKind decoder = DecoderKind::sic;
    std::optional<double> log_m1, log_m2;
    std::optional<double> eps, eps1, eps2;
    RateCriterion rate_from = RateCriterion::sep;
    std::optional<std::string> criterion;
    std::size_t grid_points = 201;
    double alpha_min = 0.005, alpha_max = 0.995;
    std::uint64_t samples = 100000;
    std::size_t quad_nodes = 200;
    std::optional<RcuKind> bound_kind;
    bool fading_bound_own_gain = false;
};

// Strict parse: unknown keys, type mismatches and every violated channel
// invariant are collected with JSON pointer paths and thrown as ConfigError.
ExperimentConfig parse_config(const std::string& path);

// exit codes shared by the subcommands
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitSizeGuard = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::optional<std::uint64_t> seed_override;
};

int cmd_region(const CliOptions& opt);
int cmd_simulate(const CliOptions& opt);
int cmd_rcu(const CliOptions& opt);
int cmd_fading(const CliOptions& opt);

// write-temp-then-rename; returns the final path
std::string write_atomic(const std::string& dir, const std::string& name,
                         const std::string& content);

}  // namespace bcdisp
