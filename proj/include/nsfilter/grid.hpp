#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

namespace nsfilter {

// Square wavenumber lattice for an n x n Fourier truncation on the periodic
// box [0,L)^2.  Frequencies run over {-n/2, ..., n/2-1} per axis and are
// stored in FFT order (k mod n).  The state space excludes the zero mode
// (mean-free fields) and the Nyquist rows k_i = -n/2, which have no conjugate
// partner on the lattice and are kept identically zero.
class WavenumberGrid {
public:
    WavenumberGrid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    // Smallest Stokes eigenvalue, lambda_1 = 4 pi^2 / L^2.
    double lambda1() const { return lambda1_; }
    // Default normalization length scale ell = 1 / lambda_1.
    double default_ell() const { return 1.0 / lambda1_; }

    // Frequency of storage index i along one axis, in {-n/2, ..., n/2-1}.
    int freq(int index) const { return index <= n_ / 2 - 1 ? index : index - n_; }
    // Storage index of frequency k along one axis.
    int index_of(int k) const { return k >= 0 ? k : k + n_; }

    std::size_t flat(int k1, int k2) const {
        return static_cast<std::size_t>(index_of(k1)) * n_ + index_of(k2);
    }
    std::size_t conj_flat(int k1, int k2) const { return flat(-k1, -k2); }

    int k1_at(std::size_t flat) const { return k1_[flat]; }
    int k2_at(std::size_t flat) const { return k2_[flat]; }
    // |k|^2 as a double (exact for the integer lattice).
    double ksq(std::size_t flat) const { return ksq_[flat]; }
    // Stokes eigenvalue a_k = 4 pi^2 |k|^2 / L^2.
    double stokes_eig(std::size_t flat) const { return lambda1_ * ksq_[flat]; }
    // Normalized eigenvalue mu_k = ell * a_k of A0 = ell A.
    double normalized_eig(std::size_t flat, double ell) const {
        return ell * stokes_eig(flat);
    }

    // True for modes that belong to the state space (zero mode and Nyquist
    // rows excluded).
    bool in_state(std::size_t flat) const { return in_state_[flat]; }
    // Number of state modes (960 for n=32).
    std::size_t state_mode_count() const { return state_mode_count_; }

    // Representatives of the conjugate pairs: k2 > 0, or k2 == 0 and k1 > 0.
    // Every state mode is either a representative or the conjugate of one.
    bool is_pair_representative(std::size_t flat) const {
        int k1 = k1_[flat], k2 = k2_[flat];
        return in_state_[flat] && (k2 > 0 || (k2 == 0 && k1 > 0));
    }

    // Visit each conjugate pair once: f(flat_of_k, flat_of_minus_k).
    template <class F>
    void for_each_pair(F&& f) const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (is_pair_representative(i)) f(i, flat(-k1_[i], -k2_[i]));
        }
    }

private:
    int n_;
    double length_;
    double lambda1_;
    std::size_t state_mode_count_ = 0;
    std::vector<int> k1_, k2_;
    std::vector<double> ksq_;
    std::vector<char> in_state_;
};

using GridPtr = std::shared_ptr<const WavenumberGrid>;

// Shared grid factory; fields and solvers hold the returned pointer.
GridPtr make_grid(int n, double length);

// Spectral cutoff for projections and observation operators, stored as a
// multiple of lambda_1 so that membership tests |k|^2 < lambda/lambda_1
// compare against the exact user-supplied multiple.  Infinite cutoff
// observes every state mode.
class Cutoff {
public:
    static Cutoff multiple_of_lambda1(double m);
    static Cutoff absolute(double lambda, const WavenumberGrid& grid);
    static Cutoff infinite();

    bool is_infinite() const { return std::isinf(multiple_); }
    double multiple() const { return multiple_; }
    double absolute_value(const WavenumberGrid& grid) const {
        return multiple_ * grid.lambda1();
    }
    // Low-mode membership: 4 pi^2 |k|^2 / L^2 < lambda, i.e. |k|^2 < multiple.
    bool contains(double ksq) const { return ksq < multiple_; }

private:
    explicit Cutoff(double m) : multiple_(m) {}
    double multiple_;
};

} // namespace nsfilter
