#pragma once

#include "nsfilter/filter_discrete.hpp"

namespace nsfilter {

// Continuous-observation filters obtained as small-h limits of the discrete
// update: the mean relaxes toward the truth mode-by-mode at rate
// r_k = omega mu_k^{-2 alpha}, driven (spde regime) by noise of amplitude
// s_k = omega sigma0 mu_k^{-2 alpha - beta}, or undriven (pde regime).
enum class RelaxationMode { spde, pde };

struct ContinuousFilterParams {
    double omega = 100.0;
    double sigma0 = 0.005;
    double beta = 0.0;
    double alpha = 0.5;
    RelaxationMode mode = RelaxationMode::spde;
    double ell = 0.0; // grid default when <= 0

    double resolved_ell(const WavenumberGrid& grid) const {
        return ell > 0.0 ? ell : grid.default_ell();
    }
    // sigma0 as it enters the dynamics; the pde regime turns the noise off.
    double effective_sigma0() const {
        return mode == RelaxationMode::pde ? 0.0 : sigma0;
    }
};

// Exact per-mode integration tables of the relaxation over one dt:
//   m_k <- u_k + e^{-r_k dt} (m_k - u_k) + noise(increment_std).
class OuTable {
public:
    static OuTable build(const WavenumberGrid& grid,
                         const ContinuousFilterParams& params, double dt);

    double decay(std::size_t flat) const { return decay_[flat]; }
    double increment_std(std::size_t flat) const { return increment_std_[flat]; }
    // sqrt(s_k^2 / (2 r_k)), the stationary std of |m_k - u_k| per mode.
    double stationary_std(std::size_t flat) const { return stationary_std_[flat]; }

private:
    std::vector<double> decay_, increment_std_, stationary_std_;
};

// One exact relaxation substep with the truth frozen; preserves reality and
// mean-zero invariants.
SpectralField ou_step(const SpectralField& m, const SpectralField& u,
                      const OuTable& table, GaussianRng& rng);

struct ContinuousRunConfig {
    double t_final = 100.0;
    std::uint64_t noise_seed = 202;
    long record_every = 1; // record each k-th substep (step 0 always recorded)
    std::vector<TrackedMode> tracked;
};

struct ContinuousRunResult {
    std::vector<StepRecord> records;
    SpectralField truth_final;
    SpectralField mean_final;
};

// Lie split-step run: per dt, advance truth and mean with the NSE solver,
// then relax the mean toward the new truth.  Records relative l2 error.
ContinuousRunResult split_step_run(const SpectralField& u0, const SpectralField& m0,
                                   const SolverParams& solver_params,
                                   const ContinuousFilterParams& params,
                                   const ContinuousRunConfig& run);

} // namespace nsfilter
