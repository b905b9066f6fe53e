#include "nsfilter/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nsfilter/errors.hpp"

namespace nsfilter {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a seed value: '" + value + "'");
    }
}

std::vector<TrackedMode> parse_tracked(const std::string& key, const std::string& value) {
    std::vector<TrackedMode> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const auto comma = pair.find(',');
        if (comma == std::string::npos)
            throw ConfigError("config key '" + key + "': expected k1,k2 pairs separated by ';'");
        TrackedMode m;
        m.k1 = static_cast<int>(parse_long(key, trim(pair.substr(0, comma))));
        m.k2 = static_cast<int>(parse_long(key, trim(pair.substr(comma + 1))));
        out.push_back(m);
    }
    return out;
}

std::string tracked_to_string(const std::vector<TrackedMode>& tracked) {
    std::string s;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(tracked[i].k1) + ',' + std::to_string(tracked[i].k2);
    }
    return s;
}

void check_in_band(const ExperimentConfig& c, const std::string& key, int k1, int k2) {
    const int limit = c.grid_n / 2 - 1;
    if (std::abs(k1) > limit || std::abs(k2) > limit || (k1 == 0 && k2 == 0))
        throw ConfigError("config key '" + key + "': mode (" + std::to_string(k1) +
                          "," + std::to_string(k2) + ") is outside the retained band");
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void ExperimentConfig::validate() const {
    if (grid_n < 4 || grid_n % 2 != 0)
        throw ConfigError("config key 'grid.n': must be even and >= 4");
    if (!(grid_length > 0.0)) throw ConfigError("config key 'grid.length': must be > 0");
    if (!(nu > 0.0)) throw ConfigError("config key 'solver.nu': must be > 0");
    if (!(dt > 0.0)) throw ConfigError("config key 'solver.dt': must be > 0");
    if (!std::isfinite(forcing_amplitude))
        throw ConfigError("config key 'solver.forcing_amplitude': must be finite");
    check_in_band(*this, "solver.forcing_k1/k2", forcing_k1, forcing_k2);
    if (!(t_spin >= 0.0)) throw ConfigError("config key 'solver.t_spin': must be >= 0");
    try {
        steps_in_duration(t_spin, dt);
    } catch (const ConfigError&) {
        throw ConfigError("config key 'solver.t_spin': not an integer multiple of solver.dt");
    }
    if (!(sigma >= 0.0)) throw ConfigError("config key 'obs.sigma': must be >= 0");
    if (!(lambda_multiple > 0.0))
        throw ConfigError("config key 'obs.lambda': must be > 0 (or inf)");
    if (!(h > 0.0)) throw ConfigError("config key 'obs.h': must be > 0");
    try {
        if (steps_in_duration(h, dt) == 0)
            throw ConfigError("config key 'obs.h': shorter than solver.dt");
    } catch (const ConfigError&) {
        throw ConfigError("config key 'obs.h': not an integer multiple of solver.dt");
    }
    if (steps < 0) throw ConfigError("config key 'obs.steps': must be >= 0");
    if (!(eta >= 0.0)) throw ConfigError("config key 'filter.eta': must be >= 0");
    if (!(ell >= 0.0)) throw ConfigError("config key 'filter.ell': must be >= 0 (0 = auto)");
    if (!(omega >= 0.0)) throw ConfigError("config key 'continuous.omega': must be >= 0");
    if (!(sigma0 >= 0.0)) throw ConfigError("config key 'continuous.sigma0': must be >= 0");
    if (!(t_final >= 0.0)) throw ConfigError("config key 'continuous.t_final': must be >= 0");
    try {
        steps_in_duration(t_final, dt);
    } catch (const ConfigError&) {
        throw ConfigError("config key 'continuous.t_final': not an integer multiple of solver.dt");
    }
    if (record_every < 1)
        throw ConfigError("config key 'continuous.record_every': must be >= 1");
    for (const TrackedMode& m : tracked) check_in_band(*this, "tracked.modes", m.k1, m.k2);
    if (classify_entry_step < 0)
        throw ConfigError("config key 'classify.entry_step': must be >= 0");
    if (!(classify_stable_frac > 0.0 && classify_stable_frac <= 1.0))
        throw ConfigError("config key 'classify.stable_frac': must be in (0,1]");
    if (classify_median_start < 0)
        throw ConfigError("config key 'classify.median_start': must be >= 0");
    if (!(classify_diverged_factor >= 1.0))
        throw ConfigError("config key 'classify.diverged_factor': must be >= 1");
    if (!(classify_bounded_factor >= 1.0))
        throw ConfigError("config key 'classify.bounded_factor': must be >= 1");
    if (out_dir.empty()) throw ConfigError("config key 'output.dir': must not be empty");
}

GridPtr ExperimentConfig::build_grid() const { return make_grid(grid_n, grid_length); }

SolverParams ExperimentConfig::solver_params() const {
    return SolverParams{nu, dt, forcing_k1, forcing_k2, forcing_amplitude};
}

Cutoff ExperimentConfig::cutoff() const {
    return std::isinf(lambda_multiple) ? Cutoff::infinite()
                                       : Cutoff::multiple_of_lambda1(lambda_multiple);
}

NoiseModel ExperimentConfig::noise_model(GridPtr grid) const {
    return NoiseModel{std::move(grid), sigma, obs_beta, ell, cutoff()};
}

GainOperator ExperimentConfig::gain(GridPtr grid) const {
    return GainOperator::build(std::move(grid), eta, alpha, cutoff(), ell);
}

ContinuousFilterParams ExperimentConfig::continuous_params() const {
    return ContinuousFilterParams{omega, sigma0, cont_beta, cont_alpha, r_mode, ell};
}

DiscreteRunConfig ExperimentConfig::discrete_run() const {
    return DiscreteRunConfig{steps, h, seed_noise, tracked};
}

ContinuousRunConfig ExperimentConfig::continuous_run() const {
    return ContinuousRunConfig{t_final, seed_noise, record_every, tracked};
}

std::vector<std::string> ExperimentConfig::resolved_lines() const {
    std::vector<std::string> lines;
    auto add = [&](const std::string& k, const std::string& v) { lines.push_back(k + "=" + v); };
    add("grid.n", std::to_string(grid_n));
    add("grid.length", format_double(grid_length));
    add("solver.nu", format_double(nu));
    add("solver.dt", format_double(dt));
    add("solver.forcing_k1", std::to_string(forcing_k1));
    add("solver.forcing_k2", std::to_string(forcing_k2));
    add("solver.forcing_amplitude", format_double(forcing_amplitude));
    add("solver.t_spin", format_double(t_spin));
    add("obs.sigma", format_double(sigma));
    add("obs.beta", format_double(obs_beta));
    add("obs.lambda", format_double(lambda_multiple));
    add("obs.h", format_double(h));
    add("obs.steps", std::to_string(steps));
    add("filter.mode", mode == FilterMode::discrete ? "discrete" : "continuous");
    add("filter.eta", format_double(eta));
    add("filter.alpha", format_double(alpha));
    add("filter.ell", ell > 0.0 ? format_double(ell) : "auto");
    add("filter.init", init == MeanInit::attractor ? "attractor" : "zero");
    add("continuous.omega", format_double(omega));
    add("continuous.sigma0", format_double(sigma0));
    add("continuous.beta", format_double(cont_beta));
    add("continuous.alpha", format_double(cont_alpha));
    add("continuous.r_mode", r_mode == RelaxationMode::spde ? "spde" : "pde");
    add("continuous.t_final", format_double(t_final));
    add("continuous.record_every", std::to_string(record_every));
    add("seeds.truth", std::to_string(seed_truth));
    add("seeds.noise", std::to_string(seed_noise));
    add("seeds.init", std::to_string(seed_init));
    add("tracked.modes", tracked_to_string(tracked));
    add("classify.entry_step", std::to_string(classify_entry_step));
    add("classify.stable_frac", format_double(classify_stable_frac));
    add("classify.median_start", std::to_string(classify_median_start));
    add("classify.diverged_factor", format_double(classify_diverged_factor));
    add("classify.bounded_factor", format_double(classify_bounded_factor));
    add("output.dir", out_dir);
    return lines;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"grid.n", [](auto& c, auto& k, auto& v) { c.grid_n = static_cast<int>(parse_long(k, v)); }},
        {"grid.length", [](auto& c, auto& k, auto& v) { c.grid_length = parse_double(k, v); }},
        {"solver.nu", [](auto& c, auto& k, auto& v) { c.nu = parse_double(k, v); }},
        {"solver.dt", [](auto& c, auto& k, auto& v) { c.dt = parse_double(k, v); }},
        {"solver.forcing_k1", [](auto& c, auto& k, auto& v) { c.forcing_k1 = static_cast<int>(parse_long(k, v)); }},
        {"solver.forcing_k2", [](auto& c, auto& k, auto& v) { c.forcing_k2 = static_cast<int>(parse_long(k, v)); }},
        {"solver.forcing_amplitude", [](auto& c, auto& k, auto& v) { c.forcing_amplitude = parse_double(k, v); }},
        {"solver.t_spin", [](auto& c, auto& k, auto& v) { c.t_spin = parse_double(k, v); }},
        {"obs.sigma", [](auto& c, auto& k, auto& v) { c.sigma = parse_double(k, v); }},
        {"obs.beta", [](auto& c, auto& k, auto& v) { c.obs_beta = parse_double(k, v); }},
        {"obs.lambda", [](auto& c, auto& k, auto& v) { c.lambda_multiple = parse_double(k, v); }},
        {"obs.h", [](auto& c, auto& k, auto& v) { c.h = parse_double(k, v); }},
        {"obs.steps", [](auto& c, auto& k, auto& v) { c.steps = parse_long(k, v); }},
        {"filter.mode", [](auto& c, auto& k, auto& v) {
             if (v == "discrete") c.mode = FilterMode::discrete;
             else if (v == "continuous") c.mode = FilterMode::continuous;
             else throw ConfigError("config key '" + k + "': expected discrete or continuous");
         }},
        {"filter.eta", [](auto& c, auto& k, auto& v) { c.eta = parse_double(k, v); }},
        {"filter.alpha", [](auto& c, auto& k, auto& v) { c.alpha = parse_double(k, v); }},
        {"filter.ell", [](auto& c, auto& k, auto& v) {
             c.ell = (v == "auto") ? 0.0 : parse_double(k, v);
         }},
        {"filter.init", [](auto& c, auto& k, auto& v) {
             if (v == "attractor") c.init = MeanInit::attractor;
             else if (v == "zero") c.init = MeanInit::zero;
             else throw ConfigError("config key '" + k + "': expected attractor or zero");
         }},
        {"continuous.omega", [](auto& c, auto& k, auto& v) { c.omega = parse_double(k, v); }},
        {"continuous.sigma0", [](auto& c, auto& k, auto& v) { c.sigma0 = parse_double(k, v); }},
        {"continuous.beta", [](auto& c, auto& k, auto& v) { c.cont_beta = parse_double(k, v); }},
        {"continuous.alpha", [](auto& c, auto& k, auto& v) { c.cont_alpha = parse_double(k, v); }},
        {"continuous.r_mode", [](auto& c, auto& k, auto& v) {
             if (v == "spde") c.r_mode = RelaxationMode::spde;
             else if (v == "pde") c.r_mode = RelaxationMode::pde;
             else throw ConfigError("config key '" + k + "': expected spde or pde");
         }},
        {"continuous.t_final", [](auto& c, auto& k, auto& v) { c.t_final = parse_double(k, v); }},
        {"continuous.record_every", [](auto& c, auto& k, auto& v) { c.record_every = parse_long(k, v); }},
        {"seeds.truth", [](auto& c, auto& k, auto& v) { c.seed_truth = parse_u64(k, v); }},
        {"seeds.noise", [](auto& c, auto& k, auto& v) { c.seed_noise = parse_u64(k, v); }},
        {"seeds.init", [](auto& c, auto& k, auto& v) { c.seed_init = parse_u64(k, v); }},
        {"tracked.modes", [](auto& c, auto& k, auto& v) { c.tracked = parse_tracked(k, v); }},
        {"classify.entry_step", [](auto& c, auto& k, auto& v) { c.classify_entry_step = parse_long(k, v); }},
        {"classify.stable_frac", [](auto& c, auto& k, auto& v) { c.classify_stable_frac = parse_double(k, v); }},
        {"classify.median_start", [](auto& c, auto& k, auto& v) { c.classify_median_start = parse_long(k, v); }},
        {"classify.diverged_factor", [](auto& c, auto& k, auto& v) { c.classify_diverged_factor = parse_double(k, v); }},
        {"classify.bounded_factor", [](auto& c, auto& k, auto& v) { c.classify_bounded_factor = parse_double(k, v); }},
        {"output.dir", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
    };

    std::stringstream ss(text);
    std::string line;
    long line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        it->second(c, key, value);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_seed_override(ExperimentConfig& config, std::uint64_t seed) {
    config.seed_truth = seed;
    config.seed_noise = seed + 1;
    config.seed_init = seed + 2;
}

} // namespace nsfilter
