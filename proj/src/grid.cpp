#include "nsfilter/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsfilter {

WavenumberGrid::WavenumberGrid(int n, double length) : n_(n), length_(length) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 4");
    if (!(length > 0.0)) throw std::invalid_argument("box length must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    lambda1_ = (two_pi / length) * (two_pi / length);

    const std::size_t total = size();
    k1_.resize(total);
    k2_.resize(total);
    ksq_.resize(total);
    in_state_.resize(total);
    for (int i1 = 0; i1 < n_; ++i1) {
        for (int i2 = 0; i2 < n_; ++i2) {
            const std::size_t idx = static_cast<std::size_t>(i1) * n_ + i2;
            const int k1 = freq(i1), k2 = freq(i2);
            k1_[idx] = k1;
            k2_[idx] = k2;
            ksq_[idx] = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
            const bool nyquist = (k1 == -n_ / 2) || (k2 == -n_ / 2);
            const bool zero = (k1 == 0 && k2 == 0);
            in_state_[idx] = !nyquist && !zero;
            if (in_state_[idx]) ++state_mode_count_;
        }
    }
}

GridPtr make_grid(int n, double length) {
    return std::make_shared<const WavenumberGrid>(n, length);
}

Cutoff Cutoff::multiple_of_lambda1(double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("cutoff multiple must be >= 0");
    return Cutoff(m);
}

Cutoff Cutoff::absolute(double lambda, const WavenumberGrid& grid) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("cutoff must be >= 0");
    return Cutoff(lambda / grid.lambda1());
}

Cutoff Cutoff::infinite() {
    return Cutoff(std::numeric_limits<double>::infinity());
}

} // namespace nsfilter
