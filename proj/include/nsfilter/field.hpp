#pragma once

#include <complex>
#include <vector>

#include "nsfilter/grid.hpp"

namespace nsfilter {

using Complex = std::complex<double>;

// What a scalar field's coefficients represent; carried as metadata only.
enum class FieldKind { vorticity, stream, velocity_component, generic };

const char* field_kind_name(FieldKind kind);
FieldKind field_kind_from_name(const std::string& name);

// Scalar field on the torus stored as Fourier coefficients over the full
// n x n lattice in FFT order: w(x) = sum_k w_k exp(2 pi i k.x / L).
// State fields are mean-free and real-valued, so w_0 = 0 and w_{-k} is the
// conjugate of w_k; enforce_constraints() restores both after operations
// that can perturb them.
class SpectralField {
public:
    explicit SpectralField(GridPtr grid, FieldKind kind = FieldKind::generic);

    FieldKind kind() const { return kind_; }
    void set_kind(FieldKind kind) { kind_ = kind; }

    const WavenumberGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    Complex& operator[](std::size_t flat) { return coeffs_[flat]; }
    const Complex& operator[](std::size_t flat) const { return coeffs_[flat]; }
    Complex& at(int k1, int k2) { return coeffs_[grid_->flat(k1, k2)]; }
    const Complex& at(int k1, int k2) const { return coeffs_[grid_->flat(k1, k2)]; }

    std::size_t size() const { return coeffs_.size(); }
    Complex* data() { return coeffs_.data(); }
    const Complex* data() const { return coeffs_.data(); }

    void set_zero();
    // Projects onto the state space: zero mode and Nyquist rows zeroed,
    // conjugate pairs averaged to (w_k + conj(w_{-k}))/2.
    void enforce_constraints();

    bool is_finite() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double scale);

private:
    GridPtr grid_;
    std::vector<Complex> coeffs_;
    FieldKind kind_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double scale, SpectralField f);

// Two-component velocity field in the same spectral layout.
struct VelocityField {
    explicit VelocityField(GridPtr grid) : u1(grid), u2(grid) {}
    SpectralField u1, u2;
};

// Low-mode projection: retain modes with a_k < lambda, drop the rest.
SpectralField p_lambda(const SpectralField& f, const Cutoff& cutoff);
// Complement Q_lambda = I - P_lambda.
SpectralField q_lambda(const SpectralField& f, const Cutoff& cutoff);

// Sobolev H^s norm (sum_k (4 pi^2 |k|^2)^s |f_k|^2)^{1/2} over the full
// lattice; s = 0 is the plain l2 norm of the coefficients.
double sobolev_norm(const SpectralField& f, double s);
// Squared H^0 distance sum_k |f_k - g_k|^2.
double h0_distance_sq(const SpectralField& f, const SpectralField& g);

// Norms of the velocity field carried by a vorticity state.  A vorticity
// coefficient w_k corresponds to a velocity coefficient of squared magnitude
// |w_k|^2 / a_k (a_k the Stokes eigenvalue), so these weight each mode by
// 1 / a_k instead of converting to a VelocityField.
// Squared L^2 norm of the velocity: sum_k |w_k|^2 / a_k.
double flow_l2_sq(const SpectralField& w);
// Squared L^2 distance between the velocity fields of two vorticity states.
double flow_l2_distance_sq(const SpectralField& w, const SpectralField& v);
// H^1 norm of the velocity: (sum_k (4 pi^2 |k|^2) |w_k|^2 / a_k)^{1/2}.
double flow_h1(const SpectralField& w);

// Velocity u = grad-perp(psi) with psi the stream function solving
// Laplacian(psi) = w:  u1_k = (2 pi i k2 / L) psi_k, u2_k = -(2 pi i k1 / L) psi_k,
// psi_k = -w_k / a_k (zero mode stays zero).
VelocityField velocity_from_vorticity(const SpectralField& w);
// Inverse map w = grad-perp . u = d u1/dx2 - d u2/dx1 on the lattice.
SpectralField vorticity_from_velocity(const VelocityField& u);
// Stream function psi solving Laplacian(psi) = w.
SpectralField stream_from_vorticity(const SpectralField& w);

} // namespace nsfilter
