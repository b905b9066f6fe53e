#pragma once

#include <vector>

#include "nsfilter/field.hpp"

namespace nsfilter {

// Diagonal 3DVAR gain.  Observed modes (a_k < lambda) carry
//   b_k = eta^2 mu_k^{2 alpha} / (1 + eta^2 mu_k^{2 alpha}),
// unobserved state modes carry b_k = 1, so the data weight 1 - b_k vanishes
// off the observed band.  The data weight is what is stored: the mean update
//   m = forecast + (1-b_k) (y - forecast)
// then passes the forecast through bitwise wherever 1 - b_k = 0.
class GainOperator {
public:
    static GainOperator build(GridPtr grid, double eta, double alpha,
                              Cutoff cutoff, double ell = 0.0);

    const WavenumberGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    double eta() const { return eta_; }
    double alpha() const { return alpha_; }
    double ell() const { return ell_; }
    const Cutoff& cutoff() const { return cutoff_; }

    bool observes(std::size_t flat) const {
        return grid_->in_state(flat) && cutoff_.contains(grid_->ksq(flat));
    }
    // 1 - b_k; exact zero on unobserved modes.
    double data_weight(std::size_t flat) const { return data_weight_[flat]; }
    // b_k, for reporting.
    double forecast_weight(std::size_t flat) const { return 1.0 - data_weight_[flat]; }

    // m = B forecast + (I-B) y, computed as forecast + (1-b)(y - forecast).
    SpectralField blend(const SpectralField& forecast, const SpectralField& y) const;

private:
    GainOperator(GridPtr grid, double eta, double alpha, Cutoff cutoff, double ell);

    GridPtr grid_;
    double eta_, alpha_, ell_;
    Cutoff cutoff_;
    std::vector<double> data_weight_;
};

// Free-function form of GainOperator::build.
GainOperator build_gain(double eta, double alpha, Cutoff cutoff, GridPtr grid,
                        double ell = 0.0);

} // namespace nsfilter
