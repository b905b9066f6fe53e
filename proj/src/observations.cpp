#include "nsfilter/observations.hpp"

#include <cmath>

namespace nsfilter {

double NoiseModel::mode_variance(std::size_t flat) const {
    if (sigma == 0.0 || !observes(flat)) return 0.0;
    const double mu = grid->normalized_eig(flat, resolved_ell());
    return sigma * sigma * std::pow(mu, -2.0 * beta);
}

double NoiseModel::trace_gamma() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) sum += mode_variance(i);
    return sum;
}

SpectralField draw_noise(const NoiseModel& model, GaussianRng& rng) {
    SpectralField xi(model.grid);
    if (model.sigma == 0.0) return xi;
    model.grid->for_each_pair([&](std::size_t i, std::size_t j) {
        if (!model.observes(i)) return;
        const double std_part =
            std::sqrt(0.5 * model.mode_variance(i) * model.grid->stokes_eig(i));
        const Complex value{std_part * rng.normal(), std_part * rng.normal()};
        xi[i] = value;
        xi[j] = std::conj(value);
    });
    return xi;
}

Observation observe(const SpectralField& u, long step, const NoiseModel& model,
                    GaussianRng& rng) {
    Observation obs{step, p_lambda(u, model.cutoff), draw_noise(model, rng)};
    obs.y += obs.xi;
    return obs;
}

SpectralField random_smooth_state(GridPtr grid, GaussianRng& rng, double amplitude) {
    SpectralField w(std::move(grid), FieldKind::vorticity);
    const auto& g = w.grid();
    g.for_each_pair([&](std::size_t i, std::size_t j) {
        const double ksq = g.ksq(i);
        if (ksq > 8.0) return;
        const double scale = amplitude / (1.0 + ksq);
        const Complex value{scale * rng.normal(), scale * rng.normal()};
        w[i] = value;
        w[j] = std::conj(value);
    });
    return w;
}

SpectralField spin_up(GridPtr grid, const SolverParams& params, std::uint64_t seed,
                      double t_spin) {
    GaussianRng rng(seed);
    SpectralField w0 = random_smooth_state(grid, rng);
    if (t_spin == 0.0) return w0;
    NseSolver solver(std::move(grid), params);
    return solver.flow(std::move(w0), t_spin);
}

} // namespace nsfilter
