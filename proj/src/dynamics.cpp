#include "nsfilter/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nsfilter/errors.hpp"

namespace nsfilter {

namespace etdcoef {

namespace {
// Horner evaluation of the leading Taylor terms; truncation error at the
// threshold |z| = 1e-2 is below 1e-15 relative for every coefficient.
double horner(double z, const double* c, int count) {
    double acc = c[count - 1];
    for (int i = count - 2; i >= 0; --i) acc = acc * z + c[i];
    return acc;
}
} // namespace

double q_coef(double z) {
    if (std::abs(z) >= kSeriesThreshold) return (std::exp(0.5 * z) - 1.0) / z;
    static const double c[] = {1.0 / 2,    1.0 / 8,     1.0 / 48,
                               1.0 / 384,  1.0 / 3840,  1.0 / 46080,
                               1.0 / 645120};
    return horner(z, c, 7);
}

double f1_coef(double z) {
    if (std::abs(z) >= kSeriesThreshold)
        return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z);
    static const double c[] = {1.0 / 6,    1.0 / 6,    3.0 / 40,
                               1.0 / 45,   5.0 / 1008, 1.0 / 1120,
                               7.0 / 51840};
    return horner(z, c, 7);
}

double f2_coef(double z) {
    if (std::abs(z) >= kSeriesThreshold)
        return (2.0 + z + std::exp(z) * (-2.0 + z)) / (z * z * z);
    static const double c[] = {1.0 / 6,    1.0 / 12,   1.0 / 40,
                               1.0 / 180,  1.0 / 1008, 1.0 / 6720,
                               1.0 / 51840};
    return horner(z, c, 7);
}

double f3_coef(double z) {
    if (std::abs(z) >= kSeriesThreshold)
        return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
    static const double c[] = {1.0 / 6,     0.0,          -1.0 / 120,
                               -1.0 / 360,  -1.0 / 1680,  -1.0 / 10080,
                               -1.0 / 72576};
    return horner(z, c, 7);
}

} // namespace etdcoef

EtdTableau EtdTableau::build(const WavenumberGrid& grid, double nu, double dt) {
    if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    EtdTableau t;
    const std::size_t total = grid.size();
    t.e_full_.resize(total);
    t.e_half_.resize(total);
    t.q_.resize(total);
    t.w1_.resize(total);
    t.w2_.resize(total);
    t.w3_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double z = -nu * grid.stokes_eig(i) * dt;
        t.e_full_[i] = std::exp(z);
        t.e_half_[i] = std::exp(0.5 * z);
        t.q_[i] = dt * etdcoef::q_coef(z);
        t.w1_[i] = dt * etdcoef::f1_coef(z);
        t.w2_[i] = dt * etdcoef::f2_coef(z);
        t.w3_[i] = dt * etdcoef::f3_coef(z);
    }
    return t;
}

SpectralField curl_forcing(GridPtr grid, int k1, int k2, double amplitude) {
    SpectralField g(std::move(grid), FieldKind::vorticity);
    if (amplitude == 0.0) return g;
    const auto& gr = g.grid();
    const int limit = gr.n() / 2 - 1;
    if (std::abs(k1) > limit || std::abs(k2) > limit)
        throw std::invalid_argument("forcing wavenumber is outside the state lattice");
    const std::size_t plus = gr.flat(k1, k2);
    const std::size_t minus = gr.flat(-k1, -k2);
    if (!gr.in_state(plus) || !gr.in_state(minus))
        throw std::invalid_argument("forcing wavenumber is outside the state lattice");
    const double coef = 0.5 * amplitude * gr.stokes_eig(plus);
    g[plus] = Complex{coef, 0.0};
    g[minus] = Complex{coef, 0.0};
    return g;
}

NseSolver::NseSolver(GridPtr grid, const SolverParams& params)
    : grid_(grid),
      params_(params),
      tableau_(EtdTableau::build(*grid, params.nu, params.dt)),
      // Amplitude zero means no forcing, so the forcing mode is not required
      // to fit inside the lattice in that case.
      forcing_(params.forcing_amplitude == 0.0
                   ? SpectralField(grid, FieldKind::vorticity)
                   : curl_forcing(grid, params.forcing_k1, params.forcing_k2,
                                  params.forcing_amplitude)),
      engine_(grid) {}

SpectralField NseSolver::nonlinear(const SpectralField& w) {
    const auto& g = *grid_;
    const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
    SpectralField u1(grid_), u2(grid_), dw1(grid_), dw2(grid_);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!g.in_state(i)) continue;
        const double k1 = g.k1_at(i), k2 = g.k2_at(i);
        const Complex psi = -w[i] / g.stokes_eig(i);
        u1[i] = Complex{0.0, two_pi_over_l * k2} * psi;
        u2[i] = Complex{0.0, -two_pi_over_l * k1} * psi;
        dw1[i] = Complex{0.0, two_pi_over_l * k1} * w[i];
        dw2[i] = Complex{0.0, two_pi_over_l * k2} * w[i];
    }
    engine_.to_physical_padded(u1, ph_u1_);
    engine_.to_physical_padded(u2, ph_u2_);
    engine_.to_physical_padded(dw1, ph_w1_);
    engine_.to_physical_padded(dw2, ph_w2_);
    for (std::size_t i = 0; i < ph_u1_.size(); ++i)
        ph_u1_[i] = -(ph_u1_[i] * ph_w1_[i] + ph_u2_[i] * ph_w2_[i]);
    return engine_.from_physical_padded(ph_u1_);
}

SpectralField NseSolver::nonlinear_plus_forcing(const SpectralField& w) {
    SpectralField f = nonlinear(w);
    if (params_.forcing_amplitude != 0.0) f += forcing_;
    return f;
}

SpectralField NseSolver::step(const SpectralField& w) {
    const auto& e = tableau_.e_full();
    const auto& e2 = tableau_.e_half();
    const auto& q = tableau_.q();
    const auto& w1 = tableau_.w1();
    const auto& w2 = tableau_.w2();
    const auto& w3 = tableau_.w3();

    const SpectralField f1 = nonlinear_plus_forcing(w);
    SpectralField a(grid_);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = e2[i] * w[i] + q[i] * f1[i];
    const SpectralField f2 = nonlinear_plus_forcing(a);
    SpectralField b(grid_);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = e2[i] * w[i] + q[i] * f2[i];
    const SpectralField f3 = nonlinear_plus_forcing(b);
    SpectralField c(grid_);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = e2[i] * a[i] + q[i] * (2.0 * f3[i] - f1[i]);
    const SpectralField f4 = nonlinear_plus_forcing(c);

    SpectralField next(grid_);
    for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = e[i] * w[i] + w1[i] * f1[i] + w2[i] * (f2[i] + f3[i]) * 2.0 +
                  w3[i] * f4[i];
    return next;
}

SpectralField NseSolver::flow(SpectralField w, double t) {
    const long steps = steps_in_duration(t, params_.dt);
    for (long j = 0; j < steps; ++j) {
        w = step(w);
        if (!w.is_finite())
            throw BlowupError("vorticity state became non-finite during integration",
                              j + 1);
    }
    return w;
}

SpectralField nonlinear_term(const SpectralField& w) {
    SolverParams params;
    params.forcing_amplitude = 0.0; // only the advection term is needed
    NseSolver solver(w.grid_ptr(), params);
    return solver.nonlinear(w);
}

SpectralField etd4rk_step(const SpectralField& w, const SolverParams& params) {
    NseSolver solver(w.grid_ptr(), params);
    return solver.step(w);
}

SpectralField psi_flow(const SpectralField& w0, double t, const SolverParams& params) {
    NseSolver solver(w0.grid_ptr(), params);
    return solver.flow(w0, t);
}

long steps_in_duration(double t, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (!(t >= 0.0)) throw ConfigError("duration must be nonnegative");
    const double ratio = t / dt;
    const long steps = std::lround(ratio);
    if (std::abs(t - static_cast<double>(steps) * dt) > 1e-9 * std::max(1.0, t))
        throw ConfigError("duration is not an integer multiple of the time step");
    return steps;
}

} // namespace nsfilter
