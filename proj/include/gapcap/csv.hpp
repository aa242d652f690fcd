#pragma once

#include <string>
#include <vector>

#include "gapcap/trace.hpp"

namespace gapcap {

// Shortest exact decimal representation of a double (round-trips bit-for-bit,
// same text on every platform).
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Comma-separated numeric table. '#' lines are comments; the first
// non-comment line is the mandatory header.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& comments = {});

// Schema-checked loaders. Columns are fixed per kind:
//   ringdown:    time_s,power_linear
//   spectrum:    detuning_hz,mag        (axis converted to rad/s)
//   power sweep: power_w,gamma_tot_hz
//   radii:       radius_m,freq_hz
//   batch:       value
Trace load_ringdown_csv(const std::string& path);
Trace load_spectrum_csv(const std::string& path);
Trace load_power_csv(const std::string& path);
Trace load_radii_csv(const std::string& path);
std::vector<double> load_batch_csv(const std::string& path);

// Writers emitting the same schemas (spectrum axis converted back to Hz).
void write_trace_csv(const std::string& path, const Trace& trace,
                     const std::vector<std::string>& comments = {});
void write_batch_csv(const std::string& path,
                     const std::vector<double>& values,
                     const std::vector<std::string>& comments = {});

}  // namespace gapcap
