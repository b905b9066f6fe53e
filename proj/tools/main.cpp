#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsfilter/errors.hpp"
#include "nsfilter/harness.hpp"

namespace {

// Comma-separated doubles; strtod also accepts "inf" for the lambda sweep.
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = text.find(',', pos);
        const std::string cell =
            comma == std::string::npos ? text.substr(pos) : text.substr(pos, comma - pos);
        const char* begin = cell.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw nsfilter::ConfigError("sweep values: cannot parse '" + cell +
                                        "' as a number");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3DVAR filtering for the 2D incompressible Navier-Stokes equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "Config file (key=value lines)");
    app.add_option("--out", out_override, "Output directory (overrides output.dir)");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "Replace seeds.{truth,noise,init} by N, N+1, N+2");
    app.add_flag("--quiet", quiet, "Suppress per-file summary lines");

    CLI::App* truth =
        app.add_subcommand("truth", "Integrate the reference trajectory into truth.csv");
    CLI::App* observe =
        app.add_subcommand("observe", "Sample noisy observations of an existing truth.csv");
    CLI::App* filter =
        app.add_subcommand("filter", "Run the filter and write filter.csv diagnostics");
    CLI::App* bounds =
        app.add_subcommand("bounds", "Write per-step error bounds along truth.csv");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Re-run the filter across values of one parameter");
    std::string sweep_param;
    std::string sweep_values;
    sweep->add_option("--param", sweep_param, "One of eta, alpha, lambda, omega, sigma0")
        ->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

    CLI::App* plot =
        app.add_subcommand("plot", "Emit plot.py for filter CSVs and render images");
    std::vector<std::string> plot_inputs;
    plot->add_option("csv", plot_inputs, "Filter diagnostics CSV files")->required();
    bool script_only = false;
    plot->add_flag("--script-only", script_only, "Write plot.py without invoking python3");

    for (CLI::App* sc : {truth, observe, filter, bounds, sweep, plot}) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        nsfilter::ExperimentConfig config;
        if (!config_path.empty()) config = nsfilter::load_config(config_path);
        if (seed_opt->count() > 0) nsfilter::apply_seed_override(config, seed);
        const std::string out_dir = out_override.empty() ? config.out_dir : out_override;

        if (truth->parsed()) {
            nsfilter::cmd_truth(config, out_dir, quiet);
        } else if (observe->parsed()) {
            nsfilter::cmd_observe(config, out_dir, quiet);
        } else if (filter->parsed()) {
            nsfilter::cmd_filter(config, out_dir, quiet);
        } else if (bounds->parsed()) {
            nsfilter::cmd_bounds(config, out_dir, quiet);
        } else if (sweep->parsed()) {
            nsfilter::cmd_sweep(config, sweep_param, parse_values(sweep_values), out_dir,
                                quiet);
        } else if (plot->parsed()) {
            nsfilter::cmd_plot(plot_inputs, out_dir, quiet, !script_only);
        }
    } catch (const nsfilter::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nsfilter::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const nsfilter::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 4;
    } catch (const nsfilter::BlowupError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
