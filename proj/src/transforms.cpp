#include "nsfilter/transforms.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace nsfilter {

namespace {
// FFTW's planner mutates global state; executing existing plans is safe.
std::mutex planner_mutex;
} // namespace

struct SpectralTransform::Impl {
    int n = 0, m = 0; // m = 2n padded size
    fftw_complex* buf_n_in = nullptr;
    fftw_complex* buf_n_out = nullptr;
    fftw_complex* buf_m_in = nullptr;
    fftw_complex* buf_m_out = nullptr;
    fftw_plan fwd_n{}, bwd_n{}, fwd_m{}, bwd_m{};
};

SpectralTransform::SpectralTransform(GridPtr grid)
    : grid_(std::move(grid)), impl_(new Impl) {
    impl_->n = grid_->n();
    impl_->m = 2 * grid_->n();
    const std::size_t sn = static_cast<std::size_t>(impl_->n) * impl_->n;
    const std::size_t sm = static_cast<std::size_t>(impl_->m) * impl_->m;
    impl_->buf_n_in = fftw_alloc_complex(sn);
    impl_->buf_n_out = fftw_alloc_complex(sn);
    impl_->buf_m_in = fftw_alloc_complex(sm);
    impl_->buf_m_out = fftw_alloc_complex(sm);
    std::lock_guard<std::mutex> lock(planner_mutex);
    // FFTW_ESTIMATE keeps planning deterministic (no runtime measurements).
    impl_->bwd_n = fftw_plan_dft_2d(impl_->n, impl_->n, impl_->buf_n_in,
                                    impl_->buf_n_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    impl_->fwd_n = fftw_plan_dft_2d(impl_->n, impl_->n, impl_->buf_n_in,
                                    impl_->buf_n_out, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd_m = fftw_plan_dft_2d(impl_->m, impl_->m, impl_->buf_m_in,
                                    impl_->buf_m_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    impl_->fwd_m = fftw_plan_dft_2d(impl_->m, impl_->m, impl_->buf_m_in,
                                    impl_->buf_m_out, FFTW_FORWARD, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() {
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(impl_->fwd_n);
        fftw_destroy_plan(impl_->bwd_n);
        fftw_destroy_plan(impl_->fwd_m);
        fftw_destroy_plan(impl_->bwd_m);
    }
    fftw_free(impl_->buf_n_in);
    fftw_free(impl_->buf_n_out);
    fftw_free(impl_->buf_m_in);
    fftw_free(impl_->buf_m_out);
    delete impl_;
}

std::vector<double> SpectralTransform::to_physical(const SpectralField& f) {
    const int n = impl_->n;
    const std::size_t sn = static_cast<std::size_t>(n) * n;
    // Storage is already in FFT order, so the coefficients copy straight in.
    static_assert(sizeof(Complex) == sizeof(fftw_complex));
    std::memcpy(impl_->buf_n_in, f.data(), sn * sizeof(fftw_complex));
    fftw_execute(impl_->bwd_n);
    std::vector<double> out(sn);
    for (std::size_t i = 0; i < sn; ++i) out[i] = impl_->buf_n_out[i][0];
    return out;
}

SpectralField SpectralTransform::from_physical(const std::vector<double>& samples) {
    const int n = impl_->n;
    const std::size_t sn = static_cast<std::size_t>(n) * n;
    if (samples.size() != sn)
        throw std::invalid_argument("sample count does not match the grid");
    for (std::size_t i = 0; i < sn; ++i) {
        impl_->buf_n_in[i][0] = samples[i];
        impl_->buf_n_in[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd_n);
    SpectralField f(grid_);
    const double scale = 1.0 / static_cast<double>(sn);
    for (std::size_t i = 0; i < sn; ++i)
        f[i] = Complex{impl_->buf_n_out[i][0], impl_->buf_n_out[i][1]} * scale;
    f.enforce_constraints();
    return f;
}

void SpectralTransform::to_physical_padded(const SpectralField& f,
                                           std::vector<double>& out) {
    const int m = impl_->m;
    const std::size_t sm = static_cast<std::size_t>(m) * m;
    std::memset(impl_->buf_m_in, 0, sm * sizeof(fftw_complex));
    const auto& g = *grid_;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!g.in_state(i)) continue;
        const int k1 = g.k1_at(i), k2 = g.k2_at(i);
        const std::size_t j = static_cast<std::size_t>(k1 >= 0 ? k1 : k1 + m) * m +
                              (k2 >= 0 ? k2 : k2 + m);
        impl_->buf_m_in[j][0] = f[i].real();
        impl_->buf_m_in[j][1] = f[i].imag();
    }
    fftw_execute(impl_->bwd_m);
    out.resize(sm);
    for (std::size_t i = 0; i < sm; ++i) out[i] = impl_->buf_m_out[i][0];
}

SpectralField SpectralTransform::from_physical_padded(const std::vector<double>& samples) {
    const int m = impl_->m;
    const std::size_t sm = static_cast<std::size_t>(m) * m;
    if (samples.size() != sm)
        throw std::invalid_argument("sample count does not match the padded grid");
    for (std::size_t i = 0; i < sm; ++i) {
        impl_->buf_m_in[i][0] = samples[i];
        impl_->buf_m_in[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd_m);
    SpectralField f(grid_);
    const auto& g = *grid_;
    const double scale = 1.0 / static_cast<double>(sm);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!g.in_state(i)) continue;
        const int k1 = g.k1_at(i), k2 = g.k2_at(i);
        const std::size_t j = static_cast<std::size_t>(k1 >= 0 ? k1 : k1 + m) * m +
                              (k2 >= 0 ? k2 : k2 + m);
        f[i] = Complex{impl_->buf_m_out[j][0], impl_->buf_m_out[j][1]} * scale;
    }
    f.enforce_constraints();
    return f;
}

std::vector<double> to_physical(const SpectralField& f, bool padded) {
    SpectralTransform engine(f.grid_ptr());
    if (!padded) return engine.to_physical(f);
    std::vector<double> out;
    engine.to_physical_padded(f, out);
    return out;
}

SpectralField from_physical(const std::vector<double>& samples, GridPtr grid) {
    SpectralTransform engine(grid);
    const std::size_t n = static_cast<std::size_t>(grid->n());
    if (samples.size() == 4 * n * n) return engine.from_physical_padded(samples);
    return engine.from_physical(samples);
}

} // namespace nsfilter
