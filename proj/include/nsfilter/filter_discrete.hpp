#pragma once

#include <functional>
#include <vector>

#include "nsfilter/gain.hpp"
#include "nsfilter/observations.hpp"

namespace nsfilter {

struct TrackedMode {
    int k1 = 0;
    int k2 = 0;
};

// Per-tracked-mode triplet recorded at each step.
struct ModeSample {
    int k1 = 0, k2 = 0;
    Complex truth{}, estimate{}, observation{};
    bool has_observation = false; // false at step 0 and off the observed band
};

// One diagnostics row.  Discrete runs fill the bounds; continuous runs fill
// rel_err_l2 instead and leave the bound columns empty.
struct StepRecord {
    long step = 0;
    double time = 0.0;
    double err_sq_h0 = 0.0; // squared L^2 flow distance between m and u
    double err_h1 = 0.0;    // H^1 flow distance between m and u
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool has_bounds = false;
    double rel_err_l2 = 0.0;
    bool has_rel_err = false;
    std::vector<ModeSample> modes;
};

struct FilterState {
    long step = 0;
    SpectralField mean;
};

// One assimilation cycle: forecast Psi(mean) over h, then blend with the
// observation.  obs.step must equal state.step + 1.  When forecast_out is
// given the pre-blend forecast is stored there (for identity checks).
FilterState filter_step(const FilterState& state, const Observation& obs,
                        const GainOperator& gain, NseSolver& solver, double h,
                        SpectralField* forecast_out = nullptr);

// Stationary error floor tr((I-B) Gamma (I-B)*) = sum_k (1-b_k)^2 g_k,
// summed over the full lattice like trace_gamma().
double lower_bound(const GainOperator& gain, const NoiseModel& noise);
// Asymptotic error ceiling: tr(Gamma) under complete observations, plus the
// unobserved truth flow energy |Q_lambda u|^2 under partial observations.
double upper_bound(const NoiseModel& noise, const SpectralField& u);

// Everything the identity test needs about one completed cycle.
struct StepContext {
    long step = 0; // index of the produced state (1-based)
    const SpectralField& truth_prev;
    const SpectralField& truth_next;
    const SpectralField& mean_prev;
    const SpectralField& forecast; // Psi(mean_prev)
    const SpectralField& mean_next;
    const Observation& obs;
};

struct DiscreteRunConfig {
    long steps = 400; // assimilation steps J
    double h = 0.5;   // observation interval
    std::uint64_t noise_seed = 202;
    std::vector<TrackedMode> tracked;
};

struct DiscreteRunResult {
    std::vector<StepRecord> records; // steps 0..J inclusive
    SpectralField truth_final;
    SpectralField mean_final;
};

// Truth states u_0..u_J at the observation interval h.
std::vector<SpectralField> generate_truth_states(const SpectralField& u0,
                                                 const SolverParams& solver_params,
                                                 long steps, double h);

// Observations y_1..y_J of the given truth states, one seeded noise stream.
std::vector<Observation> generate_observation_seq(
    const std::vector<SpectralField>& truth, const NoiseModel& noise,
    std::uint64_t seed);

// Filter run against prerecorded truth/observations (what the CLI replays
// from files).  truth holds steps 0..J, observations steps 1..J.  The
// optional hook fires after every cycle.
DiscreteRunResult run_filter_replay(
    const std::vector<SpectralField>& truth,
    const std::vector<Observation>& observations, const SpectralField& m0,
    const SolverParams& solver_params, const GainOperator& gain,
    const NoiseModel& noise, double h, const std::vector<TrackedMode>& tracked,
    const std::function<void(const StepContext&)>& hook = {});

// Full filter run from initial states: generates truth and observations with
// run.noise_seed, then replays.  Identical output to the file-driven path.
DiscreteRunResult run_filter(const SpectralField& u0, const SpectralField& m0,
                             const SolverParams& solver_params,
                             const GainOperator& gain, const NoiseModel& noise,
                             const DiscreteRunConfig& run,
                             const std::function<void(const StepContext&)>& hook = {});

} // namespace nsfilter
