#include "nsfilter/serialize.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nsfilter/errors.hpp"

namespace nsfilter {

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

double cell_to_double(const std::string& cell, const std::string& path) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + cell.size() || cell.empty())
        throw SchemaError(path + ": malformed numeric cell '" + cell + "'");
    return v;
}

long cell_to_long(const std::string& cell, const std::string& path) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + cell.size() || cell.empty())
        throw SchemaError(path + ": malformed integer cell '" + cell + "'");
    return v;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

void expect_columns(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& path) {
    if (table.columns != expected) {
        std::string want, got;
        for (const auto& c : expected) want += c + ",";
        for (const auto& c : table.columns) got += c + ",";
        throw SchemaError(path + ": expected columns [" + want + "] got [" + got + "]");
    }
}

// Set a conjugate pair from one half-lattice row; the representative row is
// the stored one, the partner is implied.
void set_pair(SpectralField& f, int k1, int k2, const Complex& value,
              const std::string& path) {
    const auto& g = f.grid();
    const int limit = g.n() / 2 - 1;
    if (std::abs(k1) > limit || std::abs(k2) > limit)
        throw SchemaError(path + ": mode outside the retained band");
    f.at(k1, k2) = value;
    f.at(-k1, -k2) = std::conj(value);
}

} // namespace

void write_output_header(std::ostream& out, const ExperimentConfig& config,
                         const std::string& file_kind) {
    out << "# nsfilter " << kVersion << "\n";
    out << "# file=" << file_kind << "\n";
    for (const std::string& line : config.resolved_lines()) out << "# " << line << "\n";
}

void write_field_csv(const std::string& path, const SpectralField& f,
                     const ExperimentConfig& config) {
    std::ofstream out = open_output(path);
    write_output_header(out, config, "field");
    out << "# field.n=" << f.grid().n() << "\n";
    out << "# field.length=" << format_double(f.grid().length()) << "\n";
    out << "# field.kind=" << field_kind_name(f.kind()) << "\n";
    out << "k1,k2,re,im\n";
    f.grid().for_each_pair([&](std::size_t i, std::size_t) {
        out << f.grid().k1_at(i) << ',' << f.grid().k2_at(i) << ','
            << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << "\n";
    });
    if (!out) throw IoError("failed writing " + path);
}

SpectralField read_field_csv(const std::string& path, GridPtr grid) {
    const CsvTable table = read_csv_table(path);
    expect_columns(table, {"k1", "k2", "re", "im"}, path);
    SpectralField f(std::move(grid));
    for (const auto& row : table.rows) {
        if (row.size() != 4) throw SchemaError(path + ": expected 4 cells per row");
        set_pair(f, static_cast<int>(cell_to_long(row[0], path)),
                 static_cast<int>(cell_to_long(row[1], path)),
                 Complex{cell_to_double(row[2], path), cell_to_double(row[3], path)},
                 path);
    }
    return f;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryEntry>& entries,
                          const ExperimentConfig& config) {
    std::ofstream out = open_output(path);
    write_output_header(out, config, "truth");
    out << "step,time,k1,k2,re,im\n";
    for (const TrajectoryEntry& e : entries) {
        const auto& g = e.state.grid();
        g.for_each_pair([&](std::size_t i, std::size_t) {
            out << e.step << ',' << format_double(e.time) << ',' << g.k1_at(i) << ','
                << g.k2_at(i) << ',' << format_double(e.state[i].real()) << ','
                << format_double(e.state[i].imag()) << "\n";
        });
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<TrajectoryEntry> read_trajectory_csv(const std::string& path, GridPtr grid) {
    const CsvTable table = read_csv_table(path);
    expect_columns(table, {"step", "time", "k1", "k2", "re", "im"}, path);
    std::vector<TrajectoryEntry> entries;
    for (const auto& row : table.rows) {
        if (row.size() != 6) throw SchemaError(path + ": expected 6 cells per row");
        const long step = cell_to_long(row[0], path);
        if (entries.empty() || entries.back().step != step) {
            if (!entries.empty() && step != entries.back().step + 1)
                throw SchemaError(path + ": non-contiguous step sequence");
            entries.push_back(TrajectoryEntry{
                step, cell_to_double(row[1], path),
                SpectralField(grid, FieldKind::vorticity)});
        }
        set_pair(entries.back().state, static_cast<int>(cell_to_long(row[2], path)),
                 static_cast<int>(cell_to_long(row[3], path)),
                 Complex{cell_to_double(row[4], path), cell_to_double(row[5], path)},
                 path);
    }
    return entries;
}

void write_observations_csv(const std::string& path,
                            const std::vector<Observation>& observations, double h,
                            const ExperimentConfig& config) {
    std::ofstream out = open_output(path);
    write_output_header(out, config, "observations");
    out << "step,time,k1,k2,y_re,y_im,xi_re,xi_im\n";
    for (const Observation& obs : observations) {
        const auto& g = obs.y.grid();
        const Cutoff cutoff = config.cutoff();
        g.for_each_pair([&](std::size_t i, std::size_t) {
            if (!cutoff.contains(g.ksq(i))) return;
            out << obs.step << ',' << format_double(static_cast<double>(obs.step) * h)
                << ',' << g.k1_at(i) << ',' << g.k2_at(i) << ','
                << format_double(obs.y[i].real()) << ','
                << format_double(obs.y[i].imag()) << ','
                << format_double(obs.xi[i].real()) << ','
                << format_double(obs.xi[i].imag()) << "\n";
        });
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<Observation> read_observations_csv(const std::string& path, GridPtr grid) {
    const CsvTable table = read_csv_table(path);
    expect_columns(table, {"step", "time", "k1", "k2", "y_re", "y_im", "xi_re", "xi_im"},
                   path);
    std::vector<Observation> observations;
    for (const auto& row : table.rows) {
        if (row.size() != 8) throw SchemaError(path + ": expected 8 cells per row");
        const long step = cell_to_long(row[0], path);
        if (observations.empty() || observations.back().step != step) {
            if (!observations.empty() && step != observations.back().step + 1)
                throw SchemaError(path + ": non-contiguous step sequence");
            observations.push_back(
                Observation{step, SpectralField(grid), SpectralField(grid)});
        }
        Observation& obs = observations.back();
        const int k1 = static_cast<int>(cell_to_long(row[2], path));
        const int k2 = static_cast<int>(cell_to_long(row[3], path));
        set_pair(obs.y, k1, k2,
                 Complex{cell_to_double(row[4], path), cell_to_double(row[5], path)},
                 path);
        set_pair(obs.xi, k1, k2,
                 Complex{cell_to_double(row[6], path), cell_to_double(row[7], path)},
                 path);
    }
    return observations;
}

void write_step_records_csv(const std::string& path,
                            const std::vector<StepRecord>& records,
                            bool continuous_schema, const ExperimentConfig& config) {
    std::ofstream out = open_output(path);
    write_output_header(out, config, continuous_schema ? "filter-continuous"
                                                       : "filter-discrete");
    out << "step,time,err_sq_H0,err_H1,lower_bound,upper_bound";
    if (continuous_schema) out << ",rel_err_l2";
    const std::size_t mode_count = records.empty() ? 0 : records.front().modes.size();
    for (std::size_t m = 0; m < mode_count; ++m)
        out << ",k1,k2,truth_re,truth_im,est_re,est_im,obs_re,obs_im";
    out << "\n";
    for (const StepRecord& rec : records) {
        out << rec.step << ',' << format_double(rec.time) << ','
            << format_double(rec.err_sq_h0) << ',' << format_double(rec.err_h1) << ',';
        if (rec.has_bounds)
            out << format_double(rec.lower_bound) << ',' << format_double(rec.upper_bound);
        else
            out << ',';
        if (continuous_schema)
            out << ',' << (rec.has_rel_err ? format_double(rec.rel_err_l2) : "");
        for (const ModeSample& m : rec.modes) {
            out << ',' << m.k1 << ',' << m.k2 << ',' << format_double(m.truth.real())
                << ',' << format_double(m.truth.imag()) << ','
                << format_double(m.estimate.real()) << ','
                << format_double(m.estimate.imag()) << ',';
            if (m.has_observation)
                out << format_double(m.observation.real()) << ','
                    << format_double(m.observation.imag());
            else
                out << ',';
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + path);
}

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in = open_input(path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            table.columns = split_cells(line);
            have_header = true;
        } else {
            table.rows.push_back(split_cells(line));
        }
    }
    if (!have_header) throw SchemaError(path + ": no header row found");
    return table;
}

} // namespace nsfilter
