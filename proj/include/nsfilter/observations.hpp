#pragma once

#include <cstdint>
#include <random>

#include "nsfilter/dynamics.hpp"
#include "nsfilter/field.hpp"

namespace nsfilter {

// Seeded Gaussian stream.  Box-Muller on top of mt19937_64 with explicit
// 53-bit uniforms, rather than std::normal_distribution, because the latter's
// algorithm is implementation-defined and output files must be byte-stable
// across toolchains.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal; draws come in Box-Muller pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0,1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Observation noise law.  The covariance lives on the velocity (flow) space:
// an observed mode's velocity coefficient has variance g_k = sigma^2
// mu_k^{-2 beta}; modes outside the observed band (a_k >= lambda) get zero.
struct NoiseModel {
    GridPtr grid;
    double sigma = 0.04;
    double beta = 0.0;
    double ell = 0.0; // normalization in mu_k = ell a_k; grid default if <= 0
    Cutoff cutoff = Cutoff::infinite();

    double resolved_ell() const { return ell > 0.0 ? ell : grid->default_ell(); }
    bool observes(std::size_t flat) const {
        return grid->in_state(flat) && cutoff.contains(grid->ksq(flat));
    }
    // Velocity-coefficient variance g_k for an observed mode, 0 otherwise.
    // The vorticity coefficient of the same draw has variance a_k g_k.
    double mode_variance(std::size_t flat) const;
    // Total expected squared flow norm of a draw, summed over the full
    // lattice (each conjugate pair counted twice), directly comparable to
    // the squared flow distance between estimate and truth.
    double trace_gamma() const;
};

// Reality-symmetric Gaussian draw, stored as vorticity coefficients, whose
// velocity field has the model's per-mode variances: real and imaginary
// parts of each pair representative get a_k g_k / 2 each; the conjugate
// partner is mirrored.  Pure zero field when sigma = 0.
SpectralField draw_noise(const NoiseModel& model, GaussianRng& rng);

// One noisy projected observation y = P_lambda(u) + xi; the realization xi
// is kept so error-propagation identities can be recomputed exactly.
struct Observation {
    long step = 0;
    SpectralField y;
    SpectralField xi;
};

Observation observe(const SpectralField& u, long step, const NoiseModel& model,
                    GaussianRng& rng);

// Band-limited random field (modes |k|^2 <= 8), used as integration seed.
SpectralField random_smooth_state(GridPtr grid, GaussianRng& rng,
                                  double amplitude = 1.0);

// Truth-generation protocol: integrate a seeded random smooth state for
// t_spin time units and return the end state (t_spin = 0 returns the seed
// state itself).
SpectralField spin_up(GridPtr grid, const SolverParams& params,
                      std::uint64_t seed, double t_spin);

} // namespace nsfilter
