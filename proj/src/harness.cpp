#include "nsfilter/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "nsfilter/errors.hpp"

namespace nsfilter {

namespace {

namespace fs = std::filesystem;

std::string prepare_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    return out_dir;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void note(bool quiet, const std::string& line) {
    if (!quiet) std::cout << line << "\n";
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

std::vector<SpectralField> states_of(const std::vector<TrajectoryEntry>& entries) {
    std::vector<SpectralField> states;
    states.reserve(entries.size());
    for (const TrajectoryEntry& e : entries) states.push_back(e.state);
    return states;
}

std::vector<TrajectoryEntry> load_truth(const ExperimentConfig& config,
                                        const std::string& out_dir, GridPtr grid) {
    const std::string path = join(out_dir, "truth.csv");
    std::vector<TrajectoryEntry> entries = read_trajectory_csv(path, std::move(grid));
    if (entries.empty() || entries.front().step != 0)
        throw SchemaError(path + ": truth trajectory must start at step 0");
    (void)config;
    return entries;
}

} // namespace

SpectralField initial_mean(const ExperimentConfig& config, GridPtr grid) {
    if (config.init == MeanInit::zero)
        return SpectralField(std::move(grid), FieldKind::vorticity);
    return spin_up(std::move(grid), config.solver_params(), config.seed_init,
                   config.t_spin);
}

void cmd_truth(const ExperimentConfig& config, const std::string& out_dir, bool quiet) {
    prepare_out_dir(out_dir);
    GridPtr grid = config.build_grid();
    const SpectralField u0 =
        spin_up(grid, config.solver_params(), config.seed_truth, config.t_spin);
    const std::vector<SpectralField> states =
        generate_truth_states(u0, config.solver_params(), config.steps, config.h);
    std::vector<TrajectoryEntry> entries;
    entries.reserve(states.size());
    for (std::size_t j = 0; j < states.size(); ++j)
        entries.push_back(TrajectoryEntry{static_cast<long>(j),
                                          static_cast<double>(j) * config.h, states[j]});
    const std::string path = join(out_dir, "truth.csv");
    write_trajectory_csv(path, entries, config);
    note(quiet, "wrote " + path + " (" + std::to_string(entries.size()) + " states)");
}

void cmd_observe(const ExperimentConfig& config, const std::string& out_dir, bool quiet) {
    prepare_out_dir(out_dir);
    GridPtr grid = config.build_grid();
    const std::vector<TrajectoryEntry> entries = load_truth(config, out_dir, grid);
    const NoiseModel noise = config.noise_model(grid);
    const std::vector<Observation> observations =
        generate_observation_seq(states_of(entries), noise, config.seed_noise);
    const std::string path = join(out_dir, "observations.csv");
    write_observations_csv(path, observations, config.h, config);
    note(quiet, "wrote " + path + " (" + std::to_string(observations.size()) +
                    " observations)");
}

void cmd_filter(const ExperimentConfig& config, const std::string& out_dir, bool quiet) {
    prepare_out_dir(out_dir);
    GridPtr grid = config.build_grid();
    const std::string path = join(out_dir, "filter.csv");
    if (config.mode == FilterMode::discrete) {
        const std::vector<TrajectoryEntry> entries = load_truth(config, out_dir, grid);
        const std::vector<Observation> observations =
            read_observations_csv(join(out_dir, "observations.csv"), grid);
        const SpectralField m0 = initial_mean(config, grid);
        const DiscreteRunResult result = run_filter_replay(
            states_of(entries), observations, m0, config.solver_params(),
            config.gain(grid), config.noise_model(grid), config.h, config.tracked);
        write_step_records_csv(path, result.records, false, config);
        note(quiet, "wrote " + path + " (" + std::to_string(result.records.size()) +
                        " records, " + classify_discrete(result.records, config) + ")");
    } else {
        const SpectralField u0 =
            spin_up(grid, config.solver_params(), config.seed_truth, config.t_spin);
        const SpectralField m0 = initial_mean(config, grid);
        const ContinuousRunResult result =
            split_step_run(u0, m0, config.solver_params(), config.continuous_params(),
                           config.continuous_run());
        write_step_records_csv(path, result.records, true, config);
        note(quiet, "wrote " + path + " (" + std::to_string(result.records.size()) +
                        " records, " + classify_continuous(result.records) + ")");
    }
}

void cmd_bounds(const ExperimentConfig& config, const std::string& out_dir, bool quiet) {
    prepare_out_dir(out_dir);
    GridPtr grid = config.build_grid();
    const std::vector<TrajectoryEntry> entries = load_truth(config, out_dir, grid);
    const GainOperator gain = config.gain(grid);
    const NoiseModel noise = config.noise_model(grid);
    const double floor = lower_bound(gain, noise);
    const std::string path = join(out_dir, "bounds.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    write_output_header(out, config, "bounds");
    out << "step,time,lower_bound,upper_bound\n";
    for (const TrajectoryEntry& e : entries)
        out << e.step << ',' << format_double(e.time) << ',' << format_double(floor)
            << ',' << format_double(upper_bound(noise, e.state)) << "\n";
    if (!out) throw IoError("failed writing " + path);
    note(quiet, "wrote " + path + " (" + std::to_string(entries.size()) + " rows)");
}

std::string classify_discrete(const std::vector<StepRecord>& records,
                              const ExperimentConfig& config) {
    if (records.empty()) return "marginal";
    const long last = records.back().step;
    long entry = -1;
    long tail_total = 0, tail_below = 0;
    std::vector<double> window_err, window_upper;
    for (const StepRecord& r : records) {
        const bool below = r.err_sq_h0 < r.upper_bound;
        if (below && entry < 0) entry = r.step;
        if (r.step >= config.classify_entry_step) {
            ++tail_total;
            if (below) ++tail_below;
        }
        if (r.step >= std::min(config.classify_median_start, last)) {
            window_err.push_back(r.err_sq_h0);
            window_upper.push_back(r.upper_bound);
        }
    }
    const bool stable = entry >= 0 && entry <= config.classify_entry_step &&
                        tail_total > 0 &&
                        static_cast<double>(tail_below) >=
                            config.classify_stable_frac * static_cast<double>(tail_total);
    if (stable) return "stable";
    if (median(window_err) > config.classify_diverged_factor * median(window_upper))
        return "diverged";
    return "marginal";
}

std::string classify_continuous(const std::vector<StepRecord>& records) {
    if (records.empty()) return "marginal";
    std::vector<double> tail;
    for (std::size_t i = records.size() / 2; i < records.size(); ++i)
        tail.push_back(records[i].rel_err_l2);
    const double m = median(std::move(tail));
    if (m < 0.1) return "stable";
    if (m > 1.0) return "diverged";
    return "marginal";
}

namespace {

ExperimentConfig apply_sweep_value(const ExperimentConfig& base,
                                   const std::string& parameter, double value) {
    ExperimentConfig c = base;
    if (parameter == "eta") {
        c.eta = value;
    } else if (parameter == "alpha") {
        if (c.mode == FilterMode::continuous) c.cont_alpha = value;
        else c.alpha = value;
    } else if (parameter == "lambda") {
        c.lambda_multiple = value;
    } else if (parameter == "omega") {
        c.omega = value;
    } else if (parameter == "sigma0") {
        c.sigma0 = value;
    } else {
        throw ConfigError("sweep parameter must be one of eta, alpha, lambda, omega, sigma0");
    }
    c.validate();
    return c;
}

struct SweepRow {
    double value = 0.0;
    bool completed = false;
    bool has_bounds = false;
    double median_err = 0.0, final_mean_err = 0.0, floor = 0.0, upper_median = 0.0;
    std::string classification;
    std::string error; // non-empty on run failure other than blow-up
};

SweepRow run_sweep_case(const ExperimentConfig& config, double value) {
    SweepRow row;
    row.value = value;
    try {
        GridPtr grid = config.build_grid();
        const SpectralField u0 =
            spin_up(grid, config.solver_params(), config.seed_truth, config.t_spin);
        const SpectralField m0 = initial_mean(config, grid);
        std::vector<StepRecord> records;
        if (config.mode == FilterMode::discrete) {
            const DiscreteRunResult result =
                run_filter(u0, m0, config.solver_params(), config.gain(grid),
                           config.noise_model(grid), config.discrete_run());
            records = result.records;
            row.has_bounds = true;
            row.classification = classify_discrete(records, config);
        } else {
            const ContinuousRunResult result =
                split_step_run(u0, m0, config.solver_params(),
                               config.continuous_params(), config.continuous_run());
            records = result.records;
            row.classification = classify_continuous(records);
        }
        const long last = records.back().step;
        std::vector<double> window_err, window_upper, final_err;
        const std::size_t final_begin = records.size() - (records.size() + 3) / 4;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const StepRecord& r = records[i];
            const long start = config.mode == FilterMode::discrete
                                   ? std::min(config.classify_median_start, last)
                                   : records[records.size() / 2].step;
            if (r.step >= start) {
                window_err.push_back(r.err_sq_h0);
                window_upper.push_back(r.upper_bound);
            }
            if (i >= final_begin) final_err.push_back(r.err_sq_h0);
        }
        row.median_err = median(std::move(window_err));
        row.final_mean_err = mean(final_err);
        if (row.has_bounds) {
            row.floor = records.front().lower_bound;
            row.upper_median = median(std::move(window_upper));
        }
        row.completed = true;
    } catch (const BlowupError& e) {
        row.classification = "blowup";
        row.error = e.what();
    }
    return row;
}

} // namespace

void cmd_sweep(const ExperimentConfig& config, const std::string& parameter,
               const std::vector<double>& values, const std::string& out_dir,
               bool quiet) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    prepare_out_dir(out_dir);
    std::vector<ExperimentConfig> cases;
    cases.reserve(values.size());
    for (double v : values) cases.push_back(apply_sweep_value(config, parameter, v));

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cases.size()) return;
            try {
                rows[i] = run_sweep_case(cases[i], values[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const std::size_t worker_count =
        std::max<std::size_t>(1, std::min<std::size_t>(values.size(),
                                                       std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    const std::string path = join(out_dir, "sweep.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    write_output_header(out, config, "sweep");
    out << "param,value,median_err_sq_H0,final_window_mean_err_sq_H0,lower_bound,"
           "upper_bound_median,classification\n";
    for (const SweepRow& row : rows) {
        out << parameter << ',' << format_double(row.value) << ',';
        if (row.completed)
            out << format_double(row.median_err) << ',' << format_double(row.final_mean_err);
        else
            out << ',';
        out << ',';
        if (row.completed && row.has_bounds)
            out << format_double(row.floor) << ',' << format_double(row.upper_median);
        else
            out << ',';
        out << ',' << row.classification << "\n";
    }
    if (!out) throw IoError("failed writing " + path);
    note(quiet, "wrote " + path + " (" + std::to_string(rows.size()) + " rows)");
}

namespace {

// Filter CSV layout: 6 fixed columns, optional rel_err_l2, then 8-column
// groups per tracked mode.
struct PlotShape {
    bool continuous = false;
    int mode_count = 0;
};

PlotShape validate_plot_schema(const std::string& path) {
    const CsvTable table = read_csv_table(path);
    const std::vector<std::string> base = {"step",   "time",        "err_sq_H0",
                                           "err_H1", "lower_bound", "upper_bound"};
    if (table.columns.size() < base.size())
        throw SchemaError(path + ": too few columns for a filter CSV");
    for (std::size_t i = 0; i < base.size(); ++i)
        if (table.columns[i] != base[i])
            throw SchemaError(path + ": unexpected column '" + table.columns[i] +
                              "' (wanted '" + base[i] + "')");
    PlotShape shape;
    std::size_t at = base.size();
    if (at < table.columns.size() && table.columns[at] == "rel_err_l2") {
        shape.continuous = true;
        ++at;
    }
    const std::vector<std::string> group = {"k1",     "k2",     "truth_re", "truth_im",
                                            "est_re", "est_im", "obs_re",   "obs_im"};
    while (at < table.columns.size()) {
        for (const std::string& name : group) {
            if (at >= table.columns.size() || table.columns[at] != name)
                throw SchemaError(path + ": malformed tracked-mode column group");
            ++at;
        }
        ++shape.mode_count;
    }
    if (table.rows.empty()) throw SchemaError(path + ": no data rows");
    for (const auto& row : table.rows)
        if (row.size() != table.columns.size())
            throw SchemaError(path + ": row width does not match the header");
    return shape;
}

std::string python_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_dir,
              bool quiet, bool render) {
    if (csv_paths.empty()) throw ConfigError("plot: no CSV paths given");
    prepare_out_dir(out_dir);
    for (const std::string& p : csv_paths) validate_plot_schema(p);

    const std::string script_path = join(out_dir, "plot.py");
    std::ofstream out(script_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + script_path);
    out << "#!/usr/bin/env python3\n";
    out << "# Renders nsfilter filter CSVs: one figure per file with an error\n";
    out << "# panel plus one panel per tracked mode.\n";
    out << "import csv\n";
    out << "import os\n\n";
    out << "import matplotlib\n";
    out << "matplotlib.use(\"Agg\")\n";
    out << "import matplotlib.pyplot as plt\n\n";
    out << "INPUTS = [\n";
    for (const std::string& p : csv_paths)
        out << "    " << python_quote(fs::absolute(p).string()) << ",\n";
    out << "]\n";
    out << "OUT_DIR = " << python_quote(fs::absolute(out_dir).string()) << "\n\n";
    out << R"PY(
def load(path):
    cols, rows = None, []
    with open(path, newline="") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if cols is None:
                cols = cells
            else:
                rows.append(cells)
    return cols, rows


def fnum(cell):
    return float(cell) if cell else None


for path in INPUTS:
    cols, rows = load(path)
    stem = os.path.splitext(os.path.basename(path))[0]
    has_rel = len(cols) > 6 and cols[6] == "rel_err_l2"
    base = 7 if has_rel else 6
    n_modes = (len(cols) - base) // 8
    time = [float(r[1]) for r in rows]
    fig, axes = plt.subplots(1 + n_modes, 1, figsize=(8, 3 * (1 + n_modes)),
                             squeeze=False)
    ax = axes[0][0]
    if has_rel:
        ax.semilogy(time, [fnum(r[6]) for r in rows], label="rel err l2")
        ax.set_ylabel("relative l2 error")
    else:
        ax.semilogy(time, [fnum(r[2]) for r in rows], label="|m-u|^2")
        lower = [fnum(r[4]) for r in rows]
        upper = [fnum(r[5]) for r in rows]
        if lower[0] is not None and lower[0] > 0:
            ax.semilogy(time, lower, "k:", label="lower bound")
        if upper[0] is not None:
            ax.semilogy(time, upper, "k--", label="upper bound")
        ax.set_ylabel("squared H0 error")
    ax.set_xlabel("time")
    ax.legend(loc="best", fontsize=8)
    for m in range(n_modes):
        c = base + 8 * m
        ax = axes[1 + m][0]
        k1, k2 = rows[0][c], rows[0][c + 1]
        ax.plot(time, [fnum(r[c + 2]) for r in rows], label="truth")
        ax.plot(time, [fnum(r[c + 4]) for r in rows], "--", label="estimate")
        obs_t = [t for t, r in zip(time, rows) if r[c + 6]]
        obs_v = [fnum(r[c + 6]) for r in rows if r[c + 6]]
        if obs_v:
            ax.plot(obs_t, obs_v, ".", markersize=3, label="observation")
        ax.set_ylabel(f"Re w({k1},{k2})")
        ax.set_xlabel("time")
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    target = os.path.join(OUT_DIR, stem + ".png")
    fig.savefig(target, dpi=110)
    plt.close(fig)
    print("wrote", target)
)PY";
    if (!out) throw IoError("failed writing " + script_path);
    out.close();
    note(quiet, "wrote " + script_path);

    if (render) {
        const std::string command = "python3 " + python_quote(script_path) +
                                    (quiet ? " > /dev/null" : "");
        const int rc = std::system(command.c_str());
        if (rc != 0)
            throw IoError("plot rendering failed (python3 exit status " +
                          std::to_string(rc) + ")");
    }
}

} // namespace nsfilter
