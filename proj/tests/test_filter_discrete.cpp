#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nsfilter/errors.hpp"
#include "nsfilter/filter_discrete.hpp"

using namespace nsfilter;

namespace {

SpectralField smooth_state(GridPtr grid, std::uint64_t seed, double amplitude = 1.0) {
    GaussianRng rng(seed);
    return random_smooth_state(std::move(grid), rng, amplitude);
}

NoiseModel standard_noise(GridPtr grid, double sigma = 0.04) {
    NoiseModel m;
    m.grid = std::move(grid);
    m.sigma = sigma;
    return m;
}

} // namespace

TEST_CASE("gain weights follow the closed form and its exact limits") {
    GridPtr grid = make_grid(32, 2.0);
    const double eta = 0.04;

    SUBCASE("alpha one favors low modes") {
        const GainOperator gain = build_gain(eta, 1.0, Cutoff::infinite(), grid);
        const double x1 = eta * eta; // mu = 1 at |k|^2 = 1
        CHECK(gain.data_weight(grid->flat(1, 0)) ==
              doctest::Approx(1.0 / (1.0 + x1)).epsilon(1e-14));
        CHECK(gain.forecast_weight(grid->flat(1, 0)) ==
              doctest::Approx(x1 / (1.0 + x1)).epsilon(1e-12));
        const double x25 = eta * eta * 625.0;
        CHECK(gain.data_weight(grid->flat(3, 4)) ==
              doctest::Approx(1.0 / (1.0 + x25)).epsilon(1e-14));
    }
    SUBCASE("alpha minus one favors high modes") {
        const GainOperator gain = build_gain(eta, -1.0, Cutoff::infinite(), grid);
        const double x25 = eta * eta / 625.0;
        CHECK(gain.data_weight(grid->flat(3, 4)) ==
              doctest::Approx(1.0 / (1.0 + x25)).epsilon(1e-14));
        // More trust in the forecast at low modes than alpha = 1 gives.
        const GainOperator other = build_gain(eta, 1.0, Cutoff::infinite(), grid);
        CHECK(gain.forecast_weight(grid->flat(3, 4)) <
              other.forecast_weight(grid->flat(3, 4)));
    }
    SUBCASE("eta zero trusts the data completely") {
        const GainOperator gain = build_gain(0.0, 1.0, Cutoff::infinite(), grid);
        grid->for_each_pair([&](std::size_t i, std::size_t) {
            CHECK(gain.data_weight(i) == 1.0);
        });
    }
    SUBCASE("weights vanish identically off the observed band") {
        const GainOperator gain =
            build_gain(eta, 1.0, Cutoff::multiple_of_lambda1(4.0), grid);
        CHECK(gain.data_weight(grid->flat(0, 0)) == 0.0);
        CHECK(gain.data_weight(grid->flat(-16, 3)) == 0.0);
        CHECK(gain.data_weight(grid->flat(2, 0)) == 0.0); // above the cutoff
        CHECK(gain.forecast_weight(grid->flat(2, 0)) == 1.0);
        CHECK(gain.data_weight(grid->flat(1, 1)) > 0.0);
        CHECK_FALSE(gain.observes(grid->flat(2, 0)));
        CHECK(gain.observes(grid->flat(1, 0)));
    }
    SUBCASE("data weight decreases as eta grows") {
        double prev = 1.0;
        for (double e : {0.01, 0.1, 1.0, 10.0}) {
            const GainOperator gain = build_gain(e, 1.0, Cutoff::infinite(), grid);
            const double w = gain.data_weight(grid->flat(2, 2));
            CHECK(w < prev);
            prev = w;
        }
    }
}

TEST_CASE("blend passes forecast and data through bitwise at the weight limits") {
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField f = smooth_state(grid, 21, 0.8);
    const SpectralField y = smooth_state(grid, 22, 1.1);

    SUBCASE("eta zero returns the data") {
        const GainOperator gain = build_gain(0.0, 1.0, Cutoff::infinite(), grid);
        const SpectralField m = gain.blend(f, y);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (grid->in_state(i)) CHECK(m[i] == y[i]);
        }
    }
    SUBCASE("unobserved modes return the forecast") {
        const GainOperator gain =
            build_gain(0.04, 1.0, Cutoff::multiple_of_lambda1(4.0), grid);
        const SpectralField m = gain.blend(f, y);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!gain.observes(i)) CHECK(m[i] == f[i]);
        }
    }
    SUBCASE("generic weights match the scalar update") {
        const GainOperator gain = build_gain(0.2, 1.0, Cutoff::infinite(), grid);
        const SpectralField m = gain.blend(f, y);
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double c = gain.data_weight(i);
            const Complex want = f[i] + c * (y[i] - f[i]);
            CHECK(std::abs(m[i] - want) <= 1e-15);
        }
    }
}

TEST_CASE("stationary floor reduces to the noise trace when data wins") {
    GridPtr grid = make_grid(32, 2.0);
    const NoiseModel noise = standard_noise(grid);

    const GainOperator trusting = build_gain(0.0, 1.0, Cutoff::infinite(), grid);
    CHECK(lower_bound(trusting, noise) ==
          doctest::Approx(noise.trace_gamma()).epsilon(1e-12));

    const GainOperator generic = build_gain(0.04, 1.0, Cutoff::infinite(), grid);
    double manual = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double c = generic.data_weight(i);
        manual += c * c * noise.mode_variance(i);
    }
    CHECK(lower_bound(generic, noise) == doctest::Approx(manual).epsilon(1e-12));
    CHECK(lower_bound(generic, noise) < noise.trace_gamma());

    const NoiseModel silent = standard_noise(grid, 0.0);
    CHECK(lower_bound(generic, silent) == 0.0);
}

TEST_CASE("error ceiling adds the unobserved truth energy") {
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField u = smooth_state(grid, 31, 1.3);

    NoiseModel full = standard_noise(grid);
    CHECK(upper_bound(full, u) ==
          doctest::Approx(full.trace_gamma()).epsilon(1e-12));

    NoiseModel partial = standard_noise(grid);
    partial.cutoff = Cutoff::multiple_of_lambda1(4.0);
    const SpectralField tail = q_lambda(u, partial.cutoff);
    const double tail_sq = flow_l2_sq(tail);
    CHECK(upper_bound(partial, u) ==
          doctest::Approx(partial.trace_gamma() + tail_sq).epsilon(1e-12));
    CHECK(upper_bound(partial, u) > upper_bound(full, u) - full.trace_gamma());
}

TEST_CASE("assimilation cycles demand consecutive steps") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    NseSolver solver(grid, params);
    const NoiseModel noise = standard_noise(grid);
    const GainOperator gain = build_gain(0.04, 1.0, Cutoff::infinite(), grid);

    FilterState state{0, smooth_state(grid, 1)};
    GaussianRng rng(9);
    const Observation obs = observe(smooth_state(grid, 2), 2, noise, rng);
    CHECK_THROWS_AS(filter_step(state, obs, gain, solver, 0.05), std::invalid_argument);
}

TEST_CASE("one cycle equals forecast plus gain blend") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    NseSolver solver(grid, params);
    const NoiseModel noise = standard_noise(grid);
    const GainOperator gain = build_gain(0.04, 1.0, Cutoff::infinite(), grid);
    const double h = 0.05;

    const SpectralField u1 = smooth_state(grid, 14);
    GaussianRng rng(15);
    const Observation obs = observe(u1, 1, noise, rng);

    FilterState state{0, smooth_state(grid, 13)};
    SpectralField forecast(grid, FieldKind::vorticity);
    const FilterState next = filter_step(state, obs, gain, solver, h, &forecast);
    CHECK(next.step == 1);

    const SpectralField want_forecast = psi_flow(state.mean, h, params);
    const SpectralField want_mean = gain.blend(want_forecast, obs.y);
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        CHECK(forecast[i] == want_forecast[i]);
        CHECK(next.mean[i] == want_mean[i]);
    }
}

TEST_CASE("error propagation identity holds at every mode of a short run") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    const NoiseModel noise = standard_noise(grid);
    const GainOperator gain = build_gain(0.04, 1.0, Cutoff::infinite(), grid);
    const SpectralField u0 = spin_up(grid, params, 51, 0.2);
    const SpectralField m0 = smooth_state(grid, 52, 0.5);

    DiscreteRunConfig run;
    run.steps = 5;
    run.h = 0.05;
    run.noise_seed = 53;

    long cycles = 0;
    double worst = 0.0;
    auto hook = [&](const StepContext& ctx) {
        ++cycles;
        double scale = 0.0;
        for (std::size_t i = 0; i < ctx.mean_next.size(); ++i)
            scale += std::norm(ctx.mean_next[i] - ctx.truth_next[i]);
        scale = std::sqrt(scale);
        for (std::size_t i = 0; i < ctx.mean_next.size(); ++i) {
            const double b = gain.forecast_weight(i);
            const double c = gain.data_weight(i);
            const Complex lhs = ctx.mean_next[i] - ctx.truth_next[i];
            const Complex rhs = b * (ctx.forecast[i] - ctx.truth_next[i]) +
                                c * ctx.obs.xi[i];
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
    };
    run_filter(u0, m0, params, gain, noise, run, hook);
    CHECK(cycles == 5);
    CHECK(worst <= 1e-12);
}

TEST_CASE("diagnostics rows carry bounds, times, and tracked modes") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    NoiseModel noise = standard_noise(grid);
    noise.cutoff = Cutoff::multiple_of_lambda1(4.0);
    const GainOperator gain = build_gain(0.04, 1.0, noise.cutoff, grid);
    const SpectralField u0 = smooth_state(grid, 61);
    const SpectralField m0 = smooth_state(grid, 62, 0.5);

    DiscreteRunConfig run;
    run.steps = 4;
    run.h = 0.05;
    run.noise_seed = 63;
    run.tracked = {{1, 0}, {5, 5}};

    const DiscreteRunResult result = run_filter(u0, m0, params, gain, noise, run);
    REQUIRE(result.records.size() == 5);
    const double floor = lower_bound(gain, noise);
    for (std::size_t j = 0; j < result.records.size(); ++j) {
        const StepRecord& r = result.records[j];
        CHECK(r.step == static_cast<long>(j));
        CHECK(r.time == doctest::Approx(0.05 * j).epsilon(1e-14));
        CHECK(r.has_bounds);
        CHECK_FALSE(r.has_rel_err);
        CHECK(r.lower_bound == floor);
        CHECK(r.upper_bound >= noise.trace_gamma());
        REQUIRE(r.modes.size() == 2);
        CHECK(r.modes[0].k1 == 1);
        CHECK(r.modes[1].k2 == 5);
        // (1,0) sits inside the observed band, (5,5) outside it.
        CHECK(r.modes[0].has_observation == (j > 0));
        CHECK_FALSE(r.modes[1].has_observation);
    }
    const StepRecord& first = result.records[0];
    CHECK(first.err_sq_h0 ==
          doctest::Approx(flow_l2_distance_sq(m0, u0)).epsilon(1e-12));
    CHECK(first.err_h1 == doctest::Approx(flow_h1(m0 - u0)).epsilon(1e-12));
}

TEST_CASE("replaying generated inputs reproduces the integrated run bitwise") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    const NoiseModel noise = standard_noise(grid);
    const GainOperator gain = build_gain(0.04, 1.0, Cutoff::infinite(), grid);
    const SpectralField u0 = smooth_state(grid, 71);
    const SpectralField m0 = smooth_state(grid, 72, 0.5);

    DiscreteRunConfig run;
    run.steps = 3;
    run.h = 0.05;
    run.noise_seed = 73;

    const DiscreteRunResult direct = run_filter(u0, m0, params, gain, noise, run);

    const std::vector<SpectralField> truth =
        generate_truth_states(u0, params, run.steps, run.h);
    const std::vector<Observation> obs =
        generate_observation_seq(truth, noise, run.noise_seed);
    const DiscreteRunResult replay = run_filter_replay(
        truth, obs, m0, params, gain, noise, run.h, run.tracked);

    REQUIRE(direct.records.size() == replay.records.size());
    for (std::size_t j = 0; j < direct.records.size(); ++j) {
        CHECK(direct.records[j].err_sq_h0 == replay.records[j].err_sq_h0);
        CHECK(direct.records[j].err_h1 == replay.records[j].err_h1);
        CHECK(direct.records[j].upper_bound == replay.records[j].upper_bound);
    }
    for (std::size_t i = 0; i < direct.mean_final.size(); ++i) {
        CHECK(direct.mean_final[i] == replay.mean_final[i]);
        CHECK(direct.truth_final[i] == replay.truth_final[i]);
    }
}

TEST_CASE("an all-forecast gain turns the filter into the bare solver") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    const NoiseModel noise = standard_noise(grid);
    // Nothing falls below the cutoff, so every cycle keeps the forecast.
    const GainOperator gain =
        build_gain(0.04, 1.0, Cutoff::multiple_of_lambda1(0.0), grid);
    const SpectralField u0 = smooth_state(grid, 81);
    const SpectralField m0 = smooth_state(grid, 82, 0.7);

    DiscreteRunConfig run;
    run.steps = 4;
    run.h = 0.05;

    const DiscreteRunResult result = run_filter(u0, m0, params, gain, noise, run);
    const SpectralField want = psi_flow(m0, run.steps * run.h, params);
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(result.mean_final[i] == want[i]);
}

TEST_CASE("a diverging mean raises the blow-up diagnostic") {
    GridPtr grid = make_grid(32, 2.0);
    SolverParams params;
    const NoiseModel noise = standard_noise(grid);
    const GainOperator gain = build_gain(0.04, 1.0, Cutoff::infinite(), grid);
    const SpectralField u0 = smooth_state(grid, 91);
    SpectralField m0(grid, FieldKind::vorticity);
    m0.at(2, 3) = Complex{1e160, 0.0};
    m0.at(-2, -3) = Complex{1e160, 0.0};

    DiscreteRunConfig run;
    run.steps = 2;
    run.h = 0.05;
    CHECK_THROWS_AS(run_filter(u0, m0, params, gain, noise, run), BlowupError);
}
