#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nsfilter/filter_continuous.hpp"
#include "nsfilter/filter_discrete.hpp"

namespace nsfilter {

inline constexpr const char* kVersion = "0.1.0";

enum class FilterMode { discrete, continuous };
enum class MeanInit { attractor, zero };

// Full run parameterization.  Defaults reproduce the reference regime:
// n=32 on a box of side 2, nu=0.01, dt=0.005, forcing on (5,5), sigma=0.04,
// h=0.5, complete observations, eta=sigma, alpha=1.
struct ExperimentConfig {
    // grid.*
    int grid_n = 32;
    double grid_length = 2.0;
    // solver.*
    double nu = 0.01;
    double dt = 0.005;
    int forcing_k1 = 5;
    int forcing_k2 = 5;
    double forcing_amplitude = 1.0;
    double t_spin = 100.0;
    // obs.*
    double sigma = 0.04;
    double obs_beta = 0.0;
    double lambda_multiple = std::numeric_limits<double>::infinity();
    double h = 0.5;
    long steps = 400;
    // filter.*
    FilterMode mode = FilterMode::discrete;
    double eta = 0.04;
    double alpha = 1.0;
    double ell = 0.0; // 0 = auto (1/lambda_1 of the grid)
    MeanInit init = MeanInit::attractor;
    // continuous.*
    double omega = 100.0;
    double sigma0 = 0.005;
    double cont_beta = 0.0;
    double cont_alpha = 0.5;
    RelaxationMode r_mode = RelaxationMode::spde;
    double t_final = 100.0;
    long record_every = 1;
    // seeds.*
    std::uint64_t seed_truth = 101;
    std::uint64_t seed_noise = 202;
    std::uint64_t seed_init = 303;
    // tracked.*
    std::vector<TrackedMode> tracked{{1, 1}, {5, 5}, {7, 7}};
    // classify.*
    long classify_entry_step = 50;
    double classify_stable_frac = 0.9;
    long classify_median_start = 100;
    double classify_diverged_factor = 5.0;
    double classify_bounded_factor = 1000.0;
    // output.*
    std::string out_dir = "out";

    // Throws ConfigError naming the offending key.
    void validate() const;

    GridPtr build_grid() const;
    SolverParams solver_params() const;
    Cutoff cutoff() const;
    NoiseModel noise_model(GridPtr grid) const;
    GainOperator gain(GridPtr grid) const;
    ContinuousFilterParams continuous_params() const;
    DiscreteRunConfig discrete_run() const;
    ContinuousRunConfig continuous_run() const;

    // Canonical key=value lines, one per key, in declaration order; this is
    // what output headers embed.
    std::vector<std::string> resolved_lines() const;
};

// Parse the flat key=value format (# comments, blank lines allowed; unknown
// keys rejected).  load_config reads a file; parse_config works on text.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// The --seed flag: truth/noise/init streams become N, N+1, N+2.
void apply_seed_override(ExperimentConfig& config, std::uint64_t seed);

// Bit-exact double formatting used everywhere data is persisted.
std::string format_double(double value);

} // namespace nsfilter
