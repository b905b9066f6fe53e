#include "nsfilter/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsfilter {

namespace {

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (&a.grid() != &b.grid() &&
        (a.grid().n() != b.grid().n() || a.grid().length() != b.grid().length()))
        throw std::invalid_argument("fields live on different grids");
}

} // namespace

const char* field_kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::vorticity: return "vorticity";
        case FieldKind::stream: return "stream";
        case FieldKind::velocity_component: return "velocity-component";
        case FieldKind::generic: return "generic";
    }
    return "generic";
}

FieldKind field_kind_from_name(const std::string& name) {
    if (name == "vorticity") return FieldKind::vorticity;
    if (name == "stream") return FieldKind::stream;
    if (name == "velocity-component") return FieldKind::velocity_component;
    if (name == "generic") return FieldKind::generic;
    throw std::invalid_argument("unknown field kind: " + name);
}

SpectralField::SpectralField(GridPtr grid, FieldKind kind)
    : grid_(std::move(grid)), coeffs_(grid_->size(), Complex{0.0, 0.0}), kind_(kind) {}

void SpectralField::set_zero() {
    std::fill(coeffs_.begin(), coeffs_.end(), Complex{0.0, 0.0});
}

void SpectralField::enforce_constraints() {
    const auto& g = *grid_;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (!g.in_state(i)) coeffs_[i] = Complex{0.0, 0.0};
    g.for_each_pair([&](std::size_t i, std::size_t j) {
        const Complex mean = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
        coeffs_[i] = mean;
        coeffs_[j] = std::conj(mean);
    });
}

bool SpectralField::is_finite() const {
    for (const Complex& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
    for (Complex& c : coeffs_) c *= scale;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double scale, SpectralField f) { return f *= scale; }

SpectralField p_lambda(const SpectralField& f, const Cutoff& cutoff) {
    SpectralField out(f.grid_ptr());
    const auto& g = f.grid();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.in_state(i) && cutoff.contains(g.ksq(i))) out[i] = f[i];
    return out;
}

SpectralField q_lambda(const SpectralField& f, const Cutoff& cutoff) {
    SpectralField out(f.grid_ptr());
    const auto& g = f.grid();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.in_state(i) && !cutoff.contains(g.ksq(i))) out[i] = f[i];
    return out;
}

double sobolev_norm(const SpectralField& f, double s) {
    const auto& g = f.grid();
    const double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!g.in_state(i)) continue;
        const double mag_sq = std::norm(f[i]);
        if (s == 0.0) {
            sum += mag_sq;
        } else {
            sum += std::pow(four_pi_sq * g.ksq(i), s) * mag_sq;
        }
    }
    return std::sqrt(sum);
}

double h0_distance_sq(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    const auto& grid = f.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (grid.in_state(i)) sum += std::norm(f[i] - g[i]);
    return sum;
}

double flow_l2_sq(const SpectralField& w) {
    const auto& g = w.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (g.in_state(i)) sum += std::norm(w[i]) / g.stokes_eig(i);
    return sum;
}

double flow_l2_distance_sq(const SpectralField& w, const SpectralField& v) {
    require_same_grid(w, v);
    const auto& g = w.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (g.in_state(i)) sum += std::norm(w[i] - v[i]) / g.stokes_eig(i);
    return sum;
}

double flow_h1(const SpectralField& w) {
    const auto& g = w.grid();
    const double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (g.in_state(i))
            sum += four_pi_sq * g.ksq(i) * std::norm(w[i]) / g.stokes_eig(i);
    return std::sqrt(sum);
}

VelocityField velocity_from_vorticity(const SpectralField& w) {
    const auto& g = w.grid();
    VelocityField u(w.grid_ptr());
    u.u1.set_kind(FieldKind::velocity_component);
    u.u2.set_kind(FieldKind::velocity_component);
    const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!g.in_state(i)) continue;
        // psi_k = -w_k / a_k, u1 = d psi/dx2, u2 = -d psi/dx1.
        const Complex psi = -w[i] / g.stokes_eig(i);
        u.u1[i] = Complex{0.0, two_pi_over_l * g.k2_at(i)} * psi;
        u.u2[i] = Complex{0.0, -two_pi_over_l * g.k1_at(i)} * psi;
    }
    return u;
}

SpectralField vorticity_from_velocity(const VelocityField& u) {
    const auto& g = u.u1.grid();
    SpectralField w(u.u1.grid_ptr(), FieldKind::vorticity);
    const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!g.in_state(i)) continue;
        w[i] = Complex{0.0, two_pi_over_l} *
               (static_cast<double>(g.k2_at(i)) * u.u1[i] -
                static_cast<double>(g.k1_at(i)) * u.u2[i]);
    }
    return w;
}

SpectralField stream_from_vorticity(const SpectralField& w) {
    const auto& g = w.grid();
    SpectralField psi(w.grid_ptr(), FieldKind::stream);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (g.in_state(i)) psi[i] = -w[i] / g.stokes_eig(i);
    return psi;
}

} // namespace nsfilter
