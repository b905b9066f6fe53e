#pragma once

#include <vector>

#include "nsfilter/field.hpp"

namespace nsfilter {

// FFT engine bound to one grid.  Holds FFTW plans for the n x n lattice and
// for the zero-padded 2n x 2n lattice used to dealias quadratic products.
// Plan creation is serialized behind a global mutex (the FFTW planner is not
// thread-safe); a constructed engine must only be used from one thread at a
// time, so parallel runs each build their own.
class SpectralTransform {
public:
    explicit SpectralTransform(GridPtr grid);
    ~SpectralTransform();

    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    const WavenumberGrid& grid() const { return *grid_; }

    // Samples f(x_j) at x_j = (L j1 / n, L j2 / n), row-major in j1.
    std::vector<double> to_physical(const SpectralField& f);
    // Inverse of to_physical; result is constrained to the state space.
    SpectralField from_physical(const std::vector<double>& samples);

    // Same sampling on the doubled lattice (2n x 2n points).  Products of two
    // such sample sets contain no aliasing into the retained modes.
    void to_physical_padded(const SpectralField& f, std::vector<double>& out);
    // Transform padded samples back and truncate to the n x n lattice.
    SpectralField from_physical_padded(const std::vector<double>& samples);

private:
    GridPtr grid_;
    struct Impl;
    Impl* impl_;
};

// Convenience wrappers that build a transient engine; fine outside hot loops.
// from_physical accepts either n^2 or (2n)^2 samples and picks the matching
// inverse.
std::vector<double> to_physical(const SpectralField& f, bool padded = false);
SpectralField from_physical(const std::vector<double>& samples, GridPtr grid);

} // namespace nsfilter
