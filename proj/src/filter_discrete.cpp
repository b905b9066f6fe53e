#include "nsfilter/filter_discrete.hpp"

#include <stdexcept>

#include "nsfilter/errors.hpp"

namespace nsfilter {

namespace {

ModeSample sample_mode(const TrackedMode& t, const SpectralField& truth,
                       const SpectralField& mean, const Observation* obs,
                       const NoiseModel& noise) {
    ModeSample s;
    s.k1 = t.k1;
    s.k2 = t.k2;
    const std::size_t flat = truth.grid().flat(t.k1, t.k2);
    s.truth = truth[flat];
    s.estimate = mean[flat];
    if (obs != nullptr && noise.observes(flat)) {
        s.observation = obs->y[flat];
        s.has_observation = true;
    }
    return s;
}

} // namespace

FilterState filter_step(const FilterState& state, const Observation& obs,
                        const GainOperator& gain, NseSolver& solver, double h,
                        SpectralField* forecast_out) {
    if (obs.step != state.step + 1)
        throw std::invalid_argument("observation step does not follow the filter state");
    SpectralField forecast = solver.flow(state.mean, h);
    if (!forecast.is_finite())
        throw BlowupError("filter forecast became non-finite", obs.step);
    FilterState next{obs.step, gain.blend(forecast, obs.y)};
    if (forecast_out != nullptr) *forecast_out = std::move(forecast);
    return next;
}

double lower_bound(const GainOperator& gain, const NoiseModel& noise) {
    double sum = 0.0;
    for (std::size_t i = 0; i < gain.grid().size(); ++i) {
        const double c = gain.data_weight(i);
        sum += c * c * noise.mode_variance(i);
    }
    return sum;
}

double upper_bound(const NoiseModel& noise, const SpectralField& u) {
    double bound = noise.trace_gamma();
    if (!noise.cutoff.is_infinite())
        bound += flow_l2_sq(q_lambda(u, noise.cutoff));
    return bound;
}

std::vector<SpectralField> generate_truth_states(const SpectralField& u0,
                                                 const SolverParams& solver_params,
                                                 long steps, double h) {
    if (steps < 0) throw std::invalid_argument("step count must be >= 0");
    NseSolver solver(u0.grid_ptr(), solver_params);
    std::vector<SpectralField> states;
    states.reserve(steps + 1);
    states.push_back(u0);
    for (long j = 1; j <= steps; ++j) {
        states.push_back(solver.flow(states.back(), h));
        if (!states.back().is_finite())
            throw BlowupError("truth trajectory became non-finite", j);
    }
    return states;
}

std::vector<Observation> generate_observation_seq(
    const std::vector<SpectralField>& truth, const NoiseModel& noise,
    std::uint64_t seed) {
    GaussianRng rng(seed);
    std::vector<Observation> observations;
    if (truth.empty()) return observations;
    observations.reserve(truth.size() - 1);
    for (std::size_t j = 1; j < truth.size(); ++j)
        observations.push_back(observe(truth[j], static_cast<long>(j), noise, rng));
    return observations;
}

DiscreteRunResult run_filter_replay(
    const std::vector<SpectralField>& truth,
    const std::vector<Observation>& observations, const SpectralField& m0,
    const SolverParams& solver_params, const GainOperator& gain,
    const NoiseModel& noise, double h, const std::vector<TrackedMode>& tracked,
    const std::function<void(const StepContext&)>& hook) {
    if (truth.empty()) throw std::invalid_argument("truth trajectory is empty");
    if (observations.size() + 1 != truth.size())
        throw SchemaError("observation count does not match the truth trajectory");
    const long steps = static_cast<long>(observations.size());
    NseSolver solver(m0.grid_ptr(), solver_params);
    const double floor = lower_bound(gain, noise);

    FilterState state{0, m0};
    DiscreteRunResult result{{}, truth.back(), m0};
    result.records.reserve(steps + 1);

    auto record = [&](const Observation* obs) {
        StepRecord rec;
        rec.step = state.step;
        rec.time = static_cast<double>(state.step) * h;
        const SpectralField& u = truth[state.step];
        const SpectralField diff = state.mean - u;
        rec.err_sq_h0 = flow_l2_sq(diff);
        rec.err_h1 = flow_h1(diff);
        rec.lower_bound = floor;
        rec.upper_bound = upper_bound(noise, u);
        rec.has_bounds = true;
        for (const TrackedMode& t : tracked)
            rec.modes.push_back(sample_mode(t, u, state.mean, obs, noise));
        result.records.push_back(std::move(rec));
    };

    record(nullptr);
    for (long j = 1; j <= steps; ++j) {
        const Observation& obs = observations[j - 1];
        SpectralField forecast(m0.grid_ptr());
        FilterState next = filter_step(state, obs, gain, solver, h, &forecast);
        if (hook) {
            const StepContext ctx{j,        truth[j - 1], truth[j], state.mean,
                                  forecast, next.mean,    obs};
            hook(ctx);
        }
        state = std::move(next);
        record(&obs);
    }
    result.mean_final = std::move(state.mean);
    return result;
}

DiscreteRunResult run_filter(const SpectralField& u0, const SpectralField& m0,
                             const SolverParams& solver_params,
                             const GainOperator& gain, const NoiseModel& noise,
                             const DiscreteRunConfig& run,
                             const std::function<void(const StepContext&)>& hook) {
    const std::vector<SpectralField> truth =
        generate_truth_states(u0, solver_params, run.steps, run.h);
    const std::vector<Observation> observations =
        generate_observation_seq(truth, noise, run.noise_seed);
    return run_filter_replay(truth, observations, m0, solver_params, gain, noise,
                             run.h, run.tracked, hook);
}

} // namespace nsfilter
