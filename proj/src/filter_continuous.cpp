#include "nsfilter/filter_continuous.hpp"

#include <cmath>
#include <stdexcept>

#include "nsfilter/errors.hpp"

namespace nsfilter {

OuTable OuTable::build(const WavenumberGrid& grid,
                       const ContinuousFilterParams& params, double dt) {
    if (!(params.omega >= 0.0)) throw std::invalid_argument("omega must be >= 0");
    if (!(params.sigma0 >= 0.0)) throw std::invalid_argument("sigma0 must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double ell = params.resolved_ell(grid);
    const double sigma0 = params.effective_sigma0();
    OuTable t;
    t.decay_.assign(grid.size(), 1.0);
    t.increment_std_.assign(grid.size(), 0.0);
    t.stationary_std_.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.in_state(i)) continue;
        const double mu = grid.normalized_eig(i, ell);
        const double r = params.omega * std::pow(mu, -2.0 * params.alpha);
        const double s = params.omega * sigma0 * std::pow(mu, -2.0 * params.alpha - params.beta);
        t.decay_[i] = std::exp(-r * dt);
        if (r > 0.0) {
            t.increment_std_[i] = s * std::sqrt(-std::expm1(-2.0 * r * dt) / (2.0 * r));
            t.stationary_std_[i] = s / std::sqrt(2.0 * r);
        } else {
            // omega = 0 limit: free Brownian increment of variance s^2 dt,
            // which is itself zero because s = omega sigma0 ... = 0.
            t.increment_std_[i] = s * std::sqrt(dt);
        }
    }
    return t;
}

SpectralField ou_step(const SpectralField& m, const SpectralField& u,
                      const OuTable& table, GaussianRng& rng) {
    SpectralField next = u;
    const auto& g = m.grid();
    g.for_each_pair([&](std::size_t i, std::size_t j) {
        const double s = table.increment_std(i);
        // No relaxation and no noise leaves the mean untouched bitwise, so
        // the omega = 0 run reduces exactly to two uncoupled solver runs.
        if (table.decay(i) == 1.0 && s == 0.0) {
            next[i] = m[i];
            next[j] = std::conj(m[i]);
            return;
        }
        Complex value = table.decay(i) * (m[i] - u[i]);
        if (s > 0.0) {
            const double component_std = s * std::sqrt(0.5);
            value += Complex{component_std * rng.normal(), component_std * rng.normal()};
        }
        next[i] += value;
        next[j] += std::conj(value);
    });
    return next;
}

ContinuousRunResult split_step_run(const SpectralField& u0, const SpectralField& m0,
                                   const SolverParams& solver_params,
                                   const ContinuousFilterParams& params,
                                   const ContinuousRunConfig& run) {
    const long steps = steps_in_duration(run.t_final, solver_params.dt);
    if (run.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    NseSolver solver(u0.grid_ptr(), solver_params);
    const OuTable table = OuTable::build(u0.grid(), params, solver_params.dt);
    GaussianRng rng(run.noise_seed);

    SpectralField truth = u0;
    SpectralField mean = m0;
    ContinuousRunResult result{{}, u0, m0};
    result.records.reserve(steps / run.record_every + 2);

    auto record = [&](long j) {
        StepRecord rec;
        rec.step = j;
        rec.time = static_cast<double>(j) * solver_params.dt;
        const SpectralField diff = mean - truth;
        rec.err_sq_h0 = flow_l2_sq(diff);
        rec.err_h1 = flow_h1(diff);
        const double err = std::sqrt(rec.err_sq_h0);
        const double truth_norm = std::sqrt(flow_l2_sq(truth));
        rec.rel_err_l2 = truth_norm > 0.0 ? err / truth_norm : err;
        rec.has_rel_err = true;
        for (const TrackedMode& t : run.tracked) {
            ModeSample s;
            s.k1 = t.k1;
            s.k2 = t.k2;
            const std::size_t flat = truth.grid().flat(t.k1, t.k2);
            s.truth = truth[flat];
            s.estimate = mean[flat];
            rec.modes.push_back(s);
        }
        result.records.push_back(std::move(rec));
    };

    record(0);
    for (long j = 1; j <= steps; ++j) {
        truth = solver.step(truth);
        mean = solver.step(mean);
        if (!truth.is_finite() || !mean.is_finite())
            throw BlowupError("split-step state became non-finite", j);
        mean = ou_step(mean, truth, table, rng);
        if (j % run.record_every == 0 || j == steps) record(j);
    }
    result.truth_final = std::move(truth);
    result.mean_final = std::move(mean);
    return result;
}

} // namespace nsfilter
