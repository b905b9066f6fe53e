#pragma once

#include <string>
#include <vector>

#include "nsfilter/serialize.hpp"

namespace nsfilter {

// Command bodies behind the CLI subcommands.  Each writes its artifacts into
// out_dir (created if missing) and prints one summary line per file unless
// quiet.  Errors surface as the typed exceptions in errors.hpp.

// truth.csv: spin up from seeds.truth, then record steps 0..J at interval h.
void cmd_truth(const ExperimentConfig& config, const std::string& out_dir, bool quiet);

// observations.csv from an existing truth.csv and seeds.noise.
void cmd_observe(const ExperimentConfig& config, const std::string& out_dir, bool quiet);

// filter.csv: discrete mode replays truth.csv + observations.csv through the
// 3DVAR update; continuous mode runs the split-step filter self-contained.
void cmd_filter(const ExperimentConfig& config, const std::string& out_dir, bool quiet);

// bounds.csv: per-step lower/upper error bounds along an existing truth.csv.
void cmd_bounds(const ExperimentConfig& config, const std::string& out_dir, bool quiet);

// sweep.csv: one full in-memory run per value of the swept parameter
// (eta, alpha, lambda, omega, or sigma0), executed on a worker pool.
void cmd_sweep(const ExperimentConfig& config, const std::string& parameter,
               const std::vector<double>& values, const std::string& out_dir,
               bool quiet);

// plot.py + rendered images for previously written filter CSVs.
void cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_dir,
              bool quiet, bool render = true);

// The filter mean's starting state per config (independent attractor spin-up
// from seeds.init, or zero).
SpectralField initial_mean(const ExperimentConfig& config, GridPtr grid);

// Regime label for a completed discrete run: "stable", "marginal", or
// "diverged" per the classify.* thresholds.
std::string classify_discrete(const std::vector<StepRecord>& records,
                              const ExperimentConfig& config);

// Continuous-run label from the relative-error trajectory.
std::string classify_continuous(const std::vector<StepRecord>& records);

} // namespace nsfilter
