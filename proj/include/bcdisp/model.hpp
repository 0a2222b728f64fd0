#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcdisp/rng.hpp"

namespace bcdisp {

// Aggregated validation failure; message lists every violated constraint.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string what, std::vector<std::string> violations)
        : std::runtime_error(std::move(what)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

enum class NoiseFamily { gaussian, laplace, uniform, scaled_rademacher_mixture };

const char* to_string(NoiseFamily f);

// Zero-mean additive noise with finite moments. moment4/moment6 always hold
// the analytic values for the family at the given variance; for the mixture
// family the fourth moment is a free target and the atom/uniform weights are
// solved to match it.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian;
    double variance = 1.0;
    double moment4 = 3.0;
    double moment6 = 15.0;

    // mixture parameters (valid only for scaled_rademacher_mixture):
    // value is +-atom with prob atom_weight, else uniform on [-unif_hw, unif_hw]
    double atom = 0.0;
    double atom_weight = 0.0;
    double unif_hw = 0.0;
};

// Builds a spec with analytic moments. m4_target is consumed only by
// scaled_rademacher_mixture and must satisfy m4_target >= variance^2.
NoiseSpec make_noise_spec(NoiseFamily family, double variance, double m4_target = 0.0);

struct Moments {
    double m2, m4, m6;
};
Moments noise_moments(const NoiseSpec& spec);

void sample_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng, double* dst);
std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng);

enum class FadingFamily { rayleigh, rice, deterministic };

const char* to_string(FadingFamily f);

// Channel gain H >= 0, constant over a codeword. scale is the root mean
// square gain, so scale=1 gives E[H^2]=1; Rice splits scale^2 between a line
// of sight component and scatter according to k_factor.
struct FadingSpec {
    FadingFamily family = FadingFamily::deterministic;
    double scale = 1.0;     // rayleigh/rice: sqrt(E[H^2])
    double k_factor = 0.0;  // rice only
    double gain = 1.0;      // deterministic only
};

std::vector<std::string> fading_violations(const FadingSpec& spec);

struct ChannelConfig {
    double total_power = 0.0;  // P
    double alpha = 0.0;        // strong-user power share
    double beta = 0.0;         // strong-user noise power, in (0,1)
    NoiseSpec noise1;          // variance beta
    NoiseSpec noise2;          // variance 1

    double alpha_bar() const { return 1.0 - alpha; }
    double p1() const { return alpha * total_power; }       // power of V
    double p2() const { return alpha_bar() * total_power; } // power of U
    double zeta1() const { return noise1.moment4; }
    double zeta2() const { return noise2.moment4; }
};

std::vector<std::string> config_violations(const ChannelConfig& cfg);

// A config that passed validation. Constructible only through
// validate_config, which throws ConfigError listing all violations.
class ValidatedConfig {
public:
    const ChannelConfig& get() const { return cfg_; }
    const ChannelConfig* operator->() const { return &cfg_; }

private:
    friend ValidatedConfig validate_config(const ChannelConfig& cfg);
    explicit ValidatedConfig(ChannelConfig cfg) : cfg_(std::move(cfg)) {}
    ChannelConfig cfg_;
};

ValidatedConfig validate_config(const ChannelConfig& cfg);

}  // namespace bcdisp
