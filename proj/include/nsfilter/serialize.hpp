#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsfilter/config.hpp"

namespace nsfilter {

// Every output file starts with '#' comment lines embedding the library
// version and the full resolved config, then a CSV header row.  Numeric
// cells use shortest round-trip formatting, so written doubles read back
// bit-exactly.

void write_output_header(std::ostream& out, const ExperimentConfig& config,
                         const std::string& file_kind);

// Single field: rows k1,k2,re,im over the independent half-lattice.
void write_field_csv(const std::string& path, const SpectralField& f,
                     const ExperimentConfig& config);
SpectralField read_field_csv(const std::string& path, GridPtr grid);

struct TrajectoryEntry {
    long step = 0;
    double time = 0.0;
    SpectralField state;
};

// Trajectory: rows step,time,k1,k2,re,im (half-lattice per step).
void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryEntry>& entries,
                          const ExperimentConfig& config);
std::vector<TrajectoryEntry> read_trajectory_csv(const std::string& path, GridPtr grid);

// Observations: rows step,time,k1,k2,y_re,y_im,xi_re,xi_im over the observed
// half-lattice per step.
void write_observations_csv(const std::string& path,
                            const std::vector<Observation>& observations, double h,
                            const ExperimentConfig& config);
std::vector<Observation> read_observations_csv(const std::string& path, GridPtr grid);

// Diagnostics rows.  Discrete schema:
//   step,time,err_sq_H0,err_H1,lower_bound,upper_bound[,mode group...]
// Continuous schema inserts rel_err_l2 after upper_bound and leaves the bound
// cells empty.  Each tracked mode appends the group
//   k1,k2,truth_re,truth_im,est_re,est_im,obs_re,obs_im.
void write_step_records_csv(const std::string& path,
                            const std::vector<StepRecord>& records,
                            bool continuous_schema, const ExperimentConfig& config);

// Generic reader for the CSV files above: comment lines skipped, header row
// split into columns, every data row split into raw string cells.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv_table(const std::string& path);

} // namespace nsfilter
