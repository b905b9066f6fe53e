#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nsfilter/dynamics.hpp"
#include "nsfilter/errors.hpp"
#include "nsfilter/observations.hpp"

using namespace nsfilter;

namespace {

SolverParams unforced(double dt = 0.005) {
    SolverParams p;
    p.dt = dt;
    p.forcing_amplitude = 0.0;
    return p;
}

// O(n^4) convolution oracle for the advection term, derived from
// u = grad-perp(psi), psi_k = -w_k / a_k:
//   N(w)_k = - sum_{p+q=k} [(p2 q1 - p1 q2) / |p|^2] w_p w_q.
// The box size cancels, so the sum is over integer wavenumbers only.
SpectralField convolution_oracle(const SpectralField& w) {
    const auto& g = w.grid();
    SpectralField out(w.grid_ptr());
    const int limit = g.n() / 2 - 1;
    for (std::size_t ip = 0; ip < g.size(); ++ip) {
        if (!g.in_state(ip)) continue;
        const int p1 = g.k1_at(ip), p2 = g.k2_at(ip);
        for (std::size_t iq = 0; iq < g.size(); ++iq) {
            if (!g.in_state(iq)) continue;
            const int q1 = g.k1_at(iq), q2 = g.k2_at(iq);
            const int k1 = p1 + q1, k2 = p2 + q2;
            if (std::abs(k1) > limit || std::abs(k2) > limit) continue;
            if (k1 == 0 && k2 == 0) continue;
            const double det = static_cast<double>(p2) * q1 - static_cast<double>(p1) * q2;
            out.at(k1, k2) -= det / g.ksq(ip) * w[ip] * w[iq];
        }
    }
    return out;
}

double max_abs(const SpectralField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

Complex inner(const SpectralField& a, const SpectralField& b) {
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
    return sum;
}

} // namespace

namespace {

// High-precision Taylor references for the integrator coefficients around
// z = 0, summed in long double with enough terms for ~1e-18 truncation over
// |z| <= 0.02.  Coefficient formulas follow from expanding e^z in
//   q  = (e^{z/2} - 1) / z
//   f1 = (-4 - z + e^z (4 - 3z + z^2)) / z^3
//   f2 = (2 + z + e^z (-2 + z)) / z^3
//   f3 = (-4 - 3z - z^2 + e^z (4 - z)) / z^3.
long double fact(int m) {
    long double f = 1.0L;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

double coef_reference(int which, double z) {
    long double sum = 0.0L, zp = 1.0L;
    for (int m = 0; m < 18; ++m) {
        long double c = 0.0L;
        switch (which) {
        case 0: c = 1.0L / ((1ULL << (m + 1)) * fact(m + 1)); break;
        case 1: c = 4.0L / fact(m + 3) - 3.0L / fact(m + 2) + 1.0L / fact(m + 1); break;
        case 2: c = -2.0L / fact(m + 3) + 1.0L / fact(m + 2); break;
        case 3: c = 4.0L / fact(m + 3) - 1.0L / fact(m + 2); break;
        }
        sum += c * zp;
        zp *= z;
    }
    return static_cast<double>(sum);
}

} // namespace

TEST_CASE("phi coefficients match a high-precision reference on both branches") {
    CHECK(etdcoef::q_coef(0.0) == 0.5);
    CHECK(etdcoef::f1_coef(0.0) == 1.0 / 6.0);
    CHECK(etdcoef::f2_coef(0.0) == 1.0 / 6.0);
    CHECK(etdcoef::f3_coef(0.0) == 1.0 / 6.0);

    using CoefFn = double (*)(double);
    const CoefFn fns[] = {etdcoef::q_coef, etdcoef::f1_coef, etdcoef::f2_coef,
                          etdcoef::f3_coef};
    for (int which = 0; which < 4; ++which) {
        for (double mag : {1e-4, 1e-3, 5e-3, 0.99e-2, 1e-2, 1.3e-2, 2e-2}) {
            for (double sign : {1.0, -1.0}) {
                const double z = sign * mag;
                const double got = fns[which](z);
                const double want = coef_reference(which, z);
                // The analytic branch loses ~8 digits to cancellation near
                // the threshold; the series branch is exact to rounding.
                const double tol = mag < etdcoef::kSeriesThreshold ? 1e-12 : 5e-8;
                CHECK(std::abs(got - want) <= tol * std::abs(want));
            }
        }
    }

    // Far from zero the closed forms are stable; check one directly.
    const double z = -1.0;
    CHECK(etdcoef::q_coef(z) ==
          doctest::Approx((std::exp(-0.5) - 1.0) / z).epsilon(1e-14));
    CHECK(etdcoef::f3_coef(z) ==
          doctest::Approx((-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) /
                          (z * z * z))
              .epsilon(1e-14));
}

TEST_CASE("tableau tables are finite and exact on the linear part") {
    GridPtr grid = make_grid(32, 2.0);
    const double nu = 0.01, dt = 0.005;
    const EtdTableau t = EtdTableau::build(*grid, nu, dt);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        CHECK(std::isfinite(t.q()[i]));
        CHECK(std::isfinite(t.w1()[i]));
        CHECK(std::isfinite(t.w2()[i]));
        CHECK(std::isfinite(t.w3()[i]));
        CHECK(t.e_full()[i] ==
              doctest::Approx(std::exp(-nu * grid->stokes_eig(i) * dt)).epsilon(1e-15));
        CHECK(t.e_half()[i] ==
              doctest::Approx(std::exp(-0.5 * nu * grid->stokes_eig(i) * dt))
                  .epsilon(1e-15));
    }
    // Zero mode carries the z = 0 limits.
    const std::size_t zero = grid->flat(0, 0);
    CHECK(t.q()[zero] == 0.5 * dt);
    CHECK(t.w1()[zero] == doctest::Approx(dt / 6.0).epsilon(1e-15));
}

TEST_CASE("curl forcing: amplitude, support, band check") {
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField g = curl_forcing(grid, 5, 5, 1.0);
    const double expected = 0.5 * grid->stokes_eig(grid->flat(5, 5));
    CHECK(grid->ksq(grid->flat(5, 5)) == 50.0);
    CHECK(g.at(5, 5) == Complex{expected, 0.0});
    CHECK(g.at(-5, -5) == Complex{expected, 0.0});
    // -Laplacian(cos) carries a_k = 4 pi^2 |k_f|^2 / L^2; amplitude splits
    // over the two exponentials.
    CHECK(2.0 * expected ==
          doctest::Approx(50.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(g.at(0, 0) == Complex{0.0, 0.0});
    std::size_t support = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] != Complex{0.0, 0.0}) ++support;
    CHECK(support == 2);

    CHECK(max_abs(curl_forcing(grid, 1, 1, 0.0)) == 0.0);
    CHECK_THROWS_AS(curl_forcing(grid, 16, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(curl_forcing(grid, 0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(curl_forcing(grid, 40, 2, 1.0), std::invalid_argument);
}

TEST_CASE("advection term: steady single modes and the convolution oracle") {
    GridPtr grid = make_grid(8, 2.0);

    SpectralField single(grid, FieldKind::vorticity);
    single.at(2, 1) = Complex{0.9, -0.4};
    single.at(-2, -1) = std::conj(single.at(2, 1));
    CHECK(max_abs(nonlinear_term(single)) <= 1e-13);

    SpectralField two(grid, FieldKind::vorticity);
    two.at(1, 0) = Complex{0.7, 0.2};
    two.at(-1, 0) = std::conj(two.at(1, 0));
    two.at(1, 2) = Complex{-0.3, 0.5};
    two.at(-1, -2) = std::conj(two.at(1, 2));
    const SpectralField got2 = nonlinear_term(two);
    const SpectralField want2 = convolution_oracle(two);
    const double scale2 = std::max(max_abs(want2), 1.0);
    for (std::size_t i = 0; i < got2.size(); ++i)
        CHECK(std::abs(got2[i] - want2[i]) <= 1e-12 * scale2);

    GaussianRng rng(5);
    SpectralField w(grid, FieldKind::vorticity);
    grid->for_each_pair([&](std::size_t i, std::size_t j) {
        w[i] = Complex{rng.normal(), rng.normal()};
        w[j] = std::conj(w[i]);
    });
    const SpectralField got = nonlinear_term(w);
    const SpectralField want = convolution_oracle(w);
    const double scale = max_abs(want);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) <= 1e-12 * scale);
}

TEST_CASE("advection conserves energy and enstrophy in the truncation") {
    GridPtr grid = make_grid(32, 2.0);
    GaussianRng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        SpectralField w(grid, FieldKind::vorticity);
        grid->for_each_pair([&](std::size_t i, std::size_t j) {
            w[i] = Complex{rng.normal(), rng.normal()};
            w[j] = std::conj(w[i]);
        });
        const SpectralField n = nonlinear_term(w);
        const SpectralField zeta = stream_from_vorticity(w);
        const double scale_w = sobolev_norm(n, 0.0) * sobolev_norm(w, 0.0);
        const double scale_z = sobolev_norm(n, 0.0) * sobolev_norm(zeta, 0.0);
        CHECK(std::abs(inner(n, w)) <= 1e-10 * scale_w);    // enstrophy
        CHECK(std::abs(inner(n, zeta)) <= 1e-10 * scale_z); // energy
    }
}

TEST_CASE("one step reduces to the exact semigroup on single modes") {
    GridPtr grid = make_grid(32, 2.0);
    NseSolver solver(grid, unforced());
    const auto& e = solver.tableau().e_full();
    double worst_self = 0.0, worst_leak = 0.0;
    grid->for_each_pair([&](std::size_t i, std::size_t j) {
        SpectralField w(grid, FieldKind::vorticity);
        w[i] = Complex{0.8, 0.3};
        w[j] = std::conj(w[i]);
        const SpectralField next = solver.step(w);
        worst_self = std::max(worst_self, std::abs(next[i] - e[i] * w[i]) /
                                              std::abs(e[i] * w[i]));
        for (std::size_t k = 0; k < next.size(); ++k) {
            if (k == i || k == j) continue;
            worst_leak = std::max(worst_leak, std::abs(next[k]));
        }
    });
    CHECK(worst_self <= 1e-12);
    CHECK(worst_leak <= 1e-12);
}

TEST_CASE("zero field is a fixed point without forcing") {
    GridPtr grid = make_grid(32, 2.0);
    SpectralField zero(grid, FieldKind::vorticity);
    const SpectralField next = etd4rk_step(zero, unforced());
    for (std::size_t i = 0; i < next.size(); ++i) CHECK(next[i] == Complex{0.0, 0.0});
}

TEST_CASE("flow semantics: identity, composition, divisibility") {
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField w = spin_up(grid, SolverParams{}, 31, 0.0);

    const SpectralField same = psi_flow(w, 0.0, SolverParams{});
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(same[i] == w[i]);

    const SpectralField ab = psi_flow(psi_flow(w, 0.05, SolverParams{}), 0.05,
                                      SolverParams{});
    const SpectralField once = psi_flow(w, 0.1, SolverParams{});
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(ab[i] == once[i]);

    CHECK(steps_in_duration(0.5, 0.005) == 100);
    CHECK(steps_in_duration(0.3, 0.004) == 75);
    CHECK(steps_in_duration(0.0, 0.005) == 0);
    CHECK_THROWS_AS(steps_in_duration(0.3, 0.04), ConfigError);
    CHECK_THROWS_AS(steps_in_duration(0.013, 0.005), ConfigError);
    CHECK_THROWS_AS(psi_flow(w, 0.012, SolverParams{}), ConfigError);
}

TEST_CASE("Richardson self-convergence is at least third order") {
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField w0 = spin_up(grid, SolverParams{}, 99, 0.0);
    const double t = 0.04;
    SolverParams coarse = unforced(0.004), mid = unforced(0.002),
                 fine = unforced(0.001);
    coarse.forcing_amplitude = mid.forcing_amplitude = fine.forcing_amplitude = 1.0;
    const SpectralField a = psi_flow(w0, t, coarse);
    const SpectralField b = psi_flow(w0, t, mid);
    const SpectralField c = psi_flow(w0, t, fine);
    const double e1 = sobolev_norm(a - b, 0.0);
    const double e2 = sobolev_norm(b - c, 0.0);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.0);
    CHECK(order <= 5.0);
}

TEST_CASE("unforced energy is nonincreasing over a thousand steps") {
    GridPtr grid = make_grid(32, 2.0);
    NseSolver solver(grid, unforced());
    SpectralField w = spin_up(grid, SolverParams{}, 123, 0.0);
    auto energy = [](const SpectralField& f) {
        const VelocityField u = velocity_from_vorticity(f);
        const double a = sobolev_norm(u.u1, 0.0), b = sobolev_norm(u.u2, 0.0);
        return a * a + b * b;
    };
    double prev = energy(w);
    for (int j = 0; j < 1000; ++j) {
        w = solver.step(w);
        const double now = energy(w);
        CHECK(now <= prev * (1.0 + 1e-14));
        prev = now;
    }
}

TEST_CASE("forced dynamics stay bounded") {
    GridPtr grid = make_grid(32, 2.0);
    NseSolver solver(grid, SolverParams{});
    SpectralField w = spin_up(grid, SolverParams{}, 7, 0.0);
    // 10 time units is plenty to reach the attractor's neighborhood at
    // nu = 0.01; the norm threshold is ~20x the observed attractor size.
    for (int block = 0; block < 20; ++block) {
        w = solver.flow(w, 0.5);
        CHECK(w.is_finite());
        CHECK(sobolev_norm(w, 0.0) < 1000.0);
    }
}

TEST_CASE("blow-up raises a typed diagnostic with the failing step") {
    GridPtr grid = make_grid(32, 2.0);
    SpectralField w(grid, FieldKind::vorticity);
    w.at(1, 2) = Complex{1e160, 0.0};
    w.at(-1, -2) = Complex{1e160, 0.0};
    try {
        psi_flow(w, 0.05, SolverParams{});
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(e.step() >= 1);
    }
}
