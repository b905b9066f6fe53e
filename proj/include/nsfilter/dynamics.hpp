#pragma once

#include <memory>
#include <vector>

#include "nsfilter/field.hpp"
#include "nsfilter/transforms.hpp"

namespace nsfilter {

// Parameters of the forced viscous vorticity equation
//   dw/dt = -nu A w + N(w) + g,   N(w) = -(u . grad) w,  u = grad-perp(psi).
struct SolverParams {
    double nu = 0.01;
    double dt = 0.005;
    int forcing_k1 = 5;
    int forcing_k2 = 5;
    double forcing_amplitude = 1.0; // scales g; 0 turns forcing off
};

// Coefficient evaluation for the exponential integrator.  Each coefficient is
// an entire function of z = -nu a_k dt with removable singularity at z = 0;
// the analytic expression cancels catastrophically for small |z|, so a Taylor
// series takes over below the threshold.
namespace etdcoef {

inline constexpr double kSeriesThreshold = 1e-2;

double q_coef(double z);  // (e^{z/2} - 1) / z
double f1_coef(double z); // (-4 - z + e^z (4 - 3z + z^2)) / z^3
double f2_coef(double z); // (2 + z + e^z (-2 + z)) / z^3
double f3_coef(double z); // (-4 - 3z - z^2 + e^z (4 - z)) / z^3

} // namespace etdcoef

// Precomputed per-mode coefficient tables for one (grid, nu, dt) triple:
// one fourth-order exponential Runge-Kutta step reads only these arrays.
class EtdTableau {
public:
    static EtdTableau build(const WavenumberGrid& grid, double nu, double dt);

    // e^{z}, e^{z/2}, dt q(z), dt f1(z), dt f2(z), dt f3(z), indexed by flat.
    const std::vector<double>& e_full() const { return e_full_; }
    const std::vector<double>& e_half() const { return e_half_; }
    const std::vector<double>& q() const { return q_; }
    const std::vector<double>& w1() const { return w1_; }
    const std::vector<double>& w2() const { return w2_; }
    const std::vector<double>& w3() const { return w3_; }

private:
    std::vector<double> e_full_, e_half_, q_, w1_, w2_, w3_;
};

// Forcing g = -Laplacian(psi) for psi(x) = amplitude * cos(2 pi k_f . x / L):
// coefficients a_{k_f} * amplitude / 2 on the modes +-k_f, zero elsewhere.
SpectralField curl_forcing(GridPtr grid, int k1, int k2, double amplitude);

// Pseudo-spectral solver with dealiased nonlinear term (zero-padded products
// on the doubled lattice) and exact integration of the Stokes part.
// Owns an FFT engine, so instances are not shareable across threads.
class NseSolver {
public:
    NseSolver(GridPtr grid, const SolverParams& params);

    const WavenumberGrid& grid() const { return *grid_; }
    const SolverParams& params() const { return params_; }
    const EtdTableau& tableau() const { return tableau_; }
    const SpectralField& forcing() const { return forcing_; }

    // Dealiased advection term N(w) alone.
    SpectralField nonlinear(const SpectralField& w);
    // Advance one dt; throws BlowupError if the state goes non-finite.
    SpectralField step(const SpectralField& w);
    // Advance by t (must be an integer number of dt up to rounding slack).
    SpectralField flow(SpectralField w, double t);

private:
    SpectralField nonlinear_plus_forcing(const SpectralField& w);

    GridPtr grid_;
    SolverParams params_;
    EtdTableau tableau_;
    SpectralField forcing_;
    SpectralTransform engine_;
    std::vector<double> ph_u1_, ph_u2_, ph_w1_, ph_w2_;
};

// Convenience forms matching the solver methods; each builds a transient
// solver, so prefer an NseSolver instance inside loops.
SpectralField nonlinear_term(const SpectralField& w);
SpectralField etd4rk_step(const SpectralField& w, const SolverParams& params);
SpectralField psi_flow(const SpectralField& w0, double t, const SolverParams& params);

// Number of dt steps in a duration t; throws ConfigError unless t is an
// integer multiple of dt within relative slack 1e-9.
long steps_in_duration(double t, double dt);

} // namespace nsfilter
