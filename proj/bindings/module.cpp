#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "nsfilter/errors.hpp"
#include "nsfilter/harness.hpp"

namespace py = pybind11;

namespace nsfilter {
namespace {

// Python-side handle; every bound function goes through the shared pointer.
struct Grid {
    GridPtr ptr;
};

SolverParams make_params(double nu, double dt, int forcing_k1, int forcing_k2,
                         double forcing_amplitude) {
    SolverParams p;
    p.nu = nu;
    p.dt = dt;
    p.forcing_k1 = forcing_k1;
    p.forcing_k2 = forcing_k2;
    p.forcing_amplitude = forcing_amplitude;
    return p;
}

Cutoff make_cutoff(double lambda_multiple) {
    return std::isinf(lambda_multiple) ? Cutoff::infinite()
                                       : Cutoff::multiple_of_lambda1(lambda_multiple);
}

// Coefficients cross the boundary as (n, n) complex arrays in FFT order,
// matching the library's flat storage exactly.
py::array_t<Complex> to_numpy(const SpectralField& f) {
    const py::ssize_t n = f.grid().n();
    py::array_t<Complex> out(std::vector<py::ssize_t>{n, n});
    std::memcpy(out.mutable_data(), f.data(), sizeof(Complex) * f.size());
    return out;
}

SpectralField from_numpy(const Grid& g, const py::array& arr,
                         FieldKind kind = FieldKind::vorticity) {
    py::array_t<Complex, py::array::c_style | py::array::forcecast> a(arr);
    const py::ssize_t n = g.ptr->n();
    if (a.ndim() != 2 || a.shape(0) != n || a.shape(1) != n)
        throw py::value_error("expected a complex (n, n) coefficient array in FFT order");
    SpectralField f(g.ptr, kind);
    std::memcpy(f.data(), a.data(), sizeof(Complex) * f.size());
    f.enforce_constraints();
    return f;
}

py::array_t<double> samples_to_numpy(const std::vector<double>& samples,
                                     py::ssize_t side) {
    py::array_t<double> out(std::vector<py::ssize_t>{side, side});
    std::memcpy(out.mutable_data(), samples.data(), sizeof(double) * samples.size());
    return out;
}

py::dict records_to_dict(const std::vector<StepRecord>& records, bool continuous) {
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(records.size())};
    py::array_t<std::int64_t> step(shape);
    py::array_t<double> time(shape), err_sq_h0(shape), err_h1(shape), lo(shape),
        hi(shape), rel(shape);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const StepRecord& r = records[i];
        step.mutable_data()[i] = r.step;
        time.mutable_data()[i] = r.time;
        err_sq_h0.mutable_data()[i] = r.err_sq_h0;
        err_h1.mutable_data()[i] = r.err_h1;
        lo.mutable_data()[i] = r.lower_bound;
        hi.mutable_data()[i] = r.upper_bound;
        rel.mutable_data()[i] = r.rel_err_l2;
    }
    py::dict d;
    d["step"] = step;
    d["time"] = time;
    d["err_sq_H0"] = err_sq_h0;
    d["err_H1"] = err_h1;
    if (continuous) {
        d["rel_err_l2"] = rel;
    } else {
        d["lower_bound"] = lo;
        d["upper_bound"] = hi;
    }
    return d;
}

py::dict run_from_config(const std::string& config_text) {
    const ExperimentConfig config = parse_config(config_text);
    GridPtr grid = config.build_grid();
    const SpectralField u0 =
        spin_up(grid, config.solver_params(), config.seed_truth, config.t_spin);
    const SpectralField m0 = initial_mean(config, grid);
    py::dict d;
    if (config.mode == FilterMode::discrete) {
        const DiscreteRunResult result =
            run_filter(u0, m0, config.solver_params(), config.gain(grid),
                       config.noise_model(grid), config.discrete_run());
        d = records_to_dict(result.records, false);
        d["mode"] = "discrete";
        d["classification"] = classify_discrete(result.records, config);
        d["truth_final"] = to_numpy(result.truth_final);
        d["mean_final"] = to_numpy(result.mean_final);
    } else {
        const ContinuousRunResult result =
            split_step_run(u0, m0, config.solver_params(), config.continuous_params(),
                           config.continuous_run());
        d = records_to_dict(result.records, true);
        d["mode"] = "continuous";
        d["classification"] = classify_continuous(result.records);
        d["truth_final"] = to_numpy(result.truth_final);
        d["mean_final"] = to_numpy(result.mean_final);
    }
    return d;
}

} // namespace
} // namespace nsfilter

PYBIND11_MODULE(_core, m) {
    using namespace nsfilter;

    m.doc() = "Dealiased spectral 2D Navier-Stokes solver with 3DVAR filtering";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<BlowupError>(m, "BlowupError", PyExc_RuntimeError);

    py::class_<Grid>(m, "Grid", "Wavenumber lattice of an n x n truncation on [0,L)^2")
        .def(py::init([](int n, double length) { return Grid{make_grid(n, length)}; }),
             py::arg("n") = 32, py::arg("length") = 2.0)
        .def_property_readonly("n", [](const Grid& g) { return g.ptr->n(); })
        .def_property_readonly("length", [](const Grid& g) { return g.ptr->length(); })
        .def_property_readonly("lambda1", [](const Grid& g) { return g.ptr->lambda1(); })
        .def_property_readonly("default_ell",
                               [](const Grid& g) { return g.ptr->default_ell(); })
        .def_property_readonly(
            "state_mode_count",
            [](const Grid& g) { return g.ptr->state_mode_count(); })
        .def("__repr__", [](const Grid& g) {
            return "Grid(n=" + std::to_string(g.ptr->n()) +
                   ", length=" + format_double(g.ptr->length()) + ")";
        });

    m.def(
        "spin_up",
        [](const Grid& g, std::uint64_t seed, double t_spin, double nu, double dt,
           int forcing_k1, int forcing_k2, double forcing_amplitude) {
            return to_numpy(spin_up(
                g.ptr, make_params(nu, dt, forcing_k1, forcing_k2, forcing_amplitude),
                seed, t_spin));
        },
        py::arg("grid"), py::arg("seed"), py::arg("t_spin"), py::arg("nu") = 0.01,
        py::arg("dt") = 0.005, py::arg("forcing_k1") = 5, py::arg("forcing_k2") = 5,
        py::arg("forcing_amplitude") = 1.0,
        "Integrate a seeded band-limited random state for t_spin time units");

    m.def(
        "flow",
        [](const Grid& g, const py::array& w, double t, double nu, double dt,
           int forcing_k1, int forcing_k2, double forcing_amplitude) {
            return to_numpy(psi_flow(
                from_numpy(g, w), t,
                make_params(nu, dt, forcing_k1, forcing_k2, forcing_amplitude)));
        },
        py::arg("grid"), py::arg("w"), py::arg("t"), py::arg("nu") = 0.01,
        py::arg("dt") = 0.005, py::arg("forcing_k1") = 5, py::arg("forcing_k2") = 5,
        py::arg("forcing_amplitude") = 1.0,
        "Advance vorticity coefficients by time t (an integer multiple of dt)");

    m.def(
        "nonlinear",
        [](const Grid& g, const py::array& w) {
            return to_numpy(nonlinear_term(from_numpy(g, w)));
        },
        py::arg("grid"), py::arg("w"), "Dealiased advection term N(w) = -(u . grad) w");

    m.def(
        "velocity",
        [](const Grid& g, const py::array& w) {
            const VelocityField u = velocity_from_vorticity(from_numpy(g, w));
            return py::make_tuple(to_numpy(u.u1), to_numpy(u.u2));
        },
        py::arg("grid"), py::arg("w"), "Velocity components (u1, u2) of a vorticity field");

    m.def(
        "stream",
        [](const Grid& g, const py::array& w) {
            return to_numpy(stream_from_vorticity(from_numpy(g, w)));
        },
        py::arg("grid"), py::arg("w"), "Stream function solving Laplacian(psi) = w");

    m.def(
        "to_physical",
        [](const Grid& g, const py::array& w) {
            return samples_to_numpy(to_physical(from_numpy(g, w, FieldKind::generic)),
                                    g.ptr->n());
        },
        py::arg("grid"), py::arg("w"),
        "Sample a coefficient array on the n x n physical lattice");

    m.def(
        "from_physical",
        [](const Grid& g, const py::array& samples) {
            py::array_t<double, py::array::c_style | py::array::forcecast> a(samples);
            const py::ssize_t n = g.ptr->n();
            if (a.ndim() != 2 || a.shape(0) != a.shape(1) ||
                (a.shape(0) != n && a.shape(0) != 2 * n))
                throw py::value_error("expected (n, n) or (2n, 2n) physical samples");
            std::vector<double> buf(a.data(), a.data() + a.size());
            return to_numpy(from_physical(buf, g.ptr));
        },
        py::arg("grid"), py::arg("samples"),
        "Coefficients of physical samples on the plain or doubled lattice");

    m.def(
        "sobolev_norm",
        [](const Grid& g, const py::array& w, double s) {
            return sobolev_norm(from_numpy(g, w, FieldKind::generic), s);
        },
        py::arg("grid"), py::arg("w"), py::arg("s") = 0.0,
        "H^s norm (sum_k (4 pi^2 |k|^2)^s |w_k|^2)^{1/2}");

    m.def(
        "flow_norm",
        [](const Grid& g, const py::array& w) {
            return std::sqrt(
                flow_l2_sq(from_numpy(g, w, FieldKind::vorticity)));
        },
        py::arg("grid"), py::arg("w"),
        "L^2 norm of the velocity field carried by vorticity coefficients w");

    m.def(
        "project_low",
        [](const Grid& g, const py::array& w, double lambda_multiple) {
            return to_numpy(p_lambda(from_numpy(g, w, FieldKind::generic),
                                     make_cutoff(lambda_multiple)));
        },
        py::arg("grid"), py::arg("w"), py::arg("lambda_multiple"),
        "P_lambda: retain modes with |k|^2 < lambda_multiple");

    m.def(
        "project_high",
        [](const Grid& g, const py::array& w, double lambda_multiple) {
            return to_numpy(q_lambda(from_numpy(g, w, FieldKind::generic),
                                     make_cutoff(lambda_multiple)));
        },
        py::arg("grid"), py::arg("w"), py::arg("lambda_multiple"),
        "Q_lambda = I - P_lambda");

    m.def(
        "noise_trace",
        [](const Grid& g, double sigma, double beta, double ell,
           double lambda_multiple) {
            const NoiseModel model{g.ptr, sigma, beta, ell, make_cutoff(lambda_multiple)};
            return model.trace_gamma();
        },
        py::arg("grid"), py::arg("sigma") = 0.04, py::arg("beta") = 0.0,
        py::arg("ell") = 0.0, py::arg("lambda_multiple") = INFINITY,
        "tr(Gamma) of the observation noise over the full lattice");

    m.def(
        "draw_noise",
        [](const Grid& g, std::uint64_t seed, double sigma, double beta, double ell,
           double lambda_multiple) {
            const NoiseModel model{g.ptr, sigma, beta, ell, make_cutoff(lambda_multiple)};
            GaussianRng rng(seed);
            return to_numpy(draw_noise(model, rng));
        },
        py::arg("grid"), py::arg("seed"), py::arg("sigma") = 0.04,
        py::arg("beta") = 0.0, py::arg("ell") = 0.0,
        py::arg("lambda_multiple") = INFINITY,
        "One reality-symmetric Gaussian observation-noise draw");

    m.def(
        "forecast_weights",
        [](const Grid& g, double eta, double alpha, double lambda_multiple, double ell) {
            const GainOperator gain =
                build_gain(eta, alpha, make_cutoff(lambda_multiple), g.ptr, ell);
            const py::ssize_t n = g.ptr->n();
            py::array_t<double> out(std::vector<py::ssize_t>{n, n});
            double* p = out.mutable_data();
            for (std::size_t i = 0; i < g.ptr->size(); ++i) p[i] = gain.forecast_weight(i);
            return out;
        },
        py::arg("grid"), py::arg("eta"), py::arg("alpha"),
        py::arg("lambda_multiple") = INFINITY, py::arg("ell") = 0.0,
        "Per-mode forecast weights b_k of the diagonal 3DVAR gain");

    m.def(
        "error_bounds",
        [](const Grid& g, const py::array& u, double eta, double alpha, double sigma,
           double beta, double lambda_multiple, double ell) {
            const Cutoff cutoff = make_cutoff(lambda_multiple);
            const GainOperator gain = build_gain(eta, alpha, cutoff, g.ptr, ell);
            const NoiseModel noise{g.ptr, sigma, beta, ell, cutoff};
            const SpectralField truth = from_numpy(g, u);
            return py::make_tuple(lower_bound(gain, noise), upper_bound(noise, truth));
        },
        py::arg("grid"), py::arg("u"), py::arg("eta"), py::arg("alpha"),
        py::arg("sigma") = 0.04, py::arg("beta") = 0.0,
        py::arg("lambda_multiple") = INFINITY, py::arg("ell") = 0.0,
        "(lower, upper) asymptotic error bounds at the given truth state");

    m.def("default_config", [] {
        const ExperimentConfig config;
        std::string text;
        for (const std::string& line : config.resolved_lines()) {
            text += line;
            text += '\n';
        }
        return text;
    });

    m.def("run", &run_from_config, py::arg("config_text"),
          "Run the configured filter in memory; returns diagnostics arrays, the "
          "final truth/mean coefficients, and a regime classification");
}
