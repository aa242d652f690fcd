#include "gapcap/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gapcap/constants.hpp"

namespace gapcap {

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

void check_header(const CsvTable& table, const std::string& path,
                  const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      want += (i ? "," : "") + expected[i];
    }
    throw std::invalid_argument(path + ": expected header '" + want + "'");
  }
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::vector<std::string> fields = split_csv_line(stripped);
    if (!header_seen) {
      table.header = fields;
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& field : fields) {
      const char* c_str = field.c_str();
      char* end = nullptr;
      double value = std::strtod(c_str, &end);
      if (end == c_str || *end != '\0') {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": not a number: '" + field + "'");
      }
      row.push_back(value);
    }
    if (row.size() != table.header.size()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": column count does not match header");
    }
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw std::invalid_argument(path + ": missing header row");
  }
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + path);
  }
  for (const std::string& comment : comments) {
    out << "# " << comment << "\n";
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << "\n";
  }
}

namespace {

Trace two_column_trace(const std::string& path,
                       const std::vector<std::string>& expected,
                       TraceKind kind, AxisUnit unit, double x_scale,
                       bool sort_rows) {
  CsvTable table = read_csv(path);
  check_header(table, path, expected);
  if (sort_rows) {
    std::sort(table.rows.begin(), table.rows.end(),
              [](const std::vector<double>& a, const std::vector<double>& b) {
                return a[0] < b[0];
              });
  }
  Trace trace;
  trace.kind = kind;
  trace.x_unit = unit;
  trace.x.reserve(table.rows.size());
  trace.y.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    trace.x.push_back(row[0] * x_scale);
    trace.y.push_back(row[1]);
  }
  trace.validate();
  return trace;
}

}  // namespace

Trace load_ringdown_csv(const std::string& path) {
  return two_column_trace(path, {"time_s", "power_linear"},
                          TraceKind::kRingdown, AxisUnit::kSeconds, 1.0,
                          false);
}

Trace load_spectrum_csv(const std::string& path) {
  return two_column_trace(path, {"detuning_hz", "mag"}, TraceKind::kOmit,
                          AxisUnit::kRadPerSec, kTwoPi, false);
}

Trace load_power_csv(const std::string& path) {
  return two_column_trace(path, {"power_w", "gamma_tot_hz"},
                          TraceKind::kDampingVsPower, AxisUnit::kSeconds, 1.0,
                          true);
}

Trace load_radii_csv(const std::string& path) {
  return two_column_trace(path, {"radius_m", "freq_hz"},
                          TraceKind::kFreqVsRadius, AxisUnit::kSeconds, 1.0,
                          true);
}

std::vector<double> load_batch_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  check_header(table, path, {"value"});
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    values.push_back(row[0]);
  }
  return values;
}

void write_trace_csv(const std::string& path, const Trace& trace,
                     const std::vector<std::string>& comments) {
  trace.validate();
  std::vector<std::string> header;
  double x_scale = 1.0;
  switch (trace.kind) {
    case TraceKind::kRingdown:
      header = {"time_s", "power_linear"};
      break;
    case TraceKind::kOmit:
      header = {"detuning_hz", "mag"};
      x_scale = 1.0 / kTwoPi;
      break;
    case TraceKind::kDampingVsPower:
      header = {"power_w", "gamma_tot_hz"};
      break;
    case TraceKind::kFreqVsRadius:
      header = {"radius_m", "freq_hz"};
      break;
    default:
      throw std::invalid_argument("trace kind has no two-column CSV schema");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    rows.push_back({trace.x[i] * x_scale, trace.y[i]});
  }
  write_csv(path, header, rows, comments);
}

void write_batch_csv(const std::string& path,
                     const std::vector<double>& values,
                     const std::vector<std::string>& comments) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (double value : values) {
    rows.push_back({value});
  }
  write_csv(path, {"value"}, rows, comments);
}

}  // namespace gapcap
