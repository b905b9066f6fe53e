#include "nsfilter/gain.hpp"

#include <cmath>
#include <stdexcept>

namespace nsfilter {

GainOperator::GainOperator(GridPtr grid, double eta, double alpha, Cutoff cutoff,
                           double ell)
    : grid_(std::move(grid)), eta_(eta), alpha_(alpha), ell_(ell), cutoff_(cutoff) {
    if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
    if (ell_ <= 0.0) ell_ = grid_->default_ell();
    data_weight_.assign(grid_->size(), 0.0);
    for (std::size_t i = 0; i < grid_->size(); ++i) {
        if (!observes(i)) continue; // b_k = 1 off the observed band
        const double mu = grid_->normalized_eig(i, ell_);
        const double t = eta_ * eta_ * std::pow(mu, 2.0 * alpha_);
        data_weight_[i] = 1.0 / (1.0 + t);
    }
}

GainOperator GainOperator::build(GridPtr grid, double eta, double alpha,
                                 Cutoff cutoff, double ell) {
    return GainOperator(std::move(grid), eta, alpha, cutoff, ell);
}

SpectralField GainOperator::blend(const SpectralField& forecast,
                                  const SpectralField& y) const {
    SpectralField m = forecast;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double c = data_weight_[i];
        // c = 0 and c = 1 pass the forecast respectively the data through
        // bitwise, so the eta -> infinity and eta -> 0 limits are exact.
        if (c == 1.0) m[i] = y[i];
        else if (c != 0.0) m[i] += c * (y[i] - forecast[i]);
    }
    return m;
}

GainOperator build_gain(double eta, double alpha, Cutoff cutoff, GridPtr grid,
                        double ell) {
    return GainOperator::build(std::move(grid), eta, alpha, cutoff, ell);
}

} // namespace nsfilter
