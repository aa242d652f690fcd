#include <cmath>
#include <cstdlib>
#include <doctest.h>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapcap/constants.hpp"
#include "gapcap/csv.hpp"
#include "gapcap/project.hpp"
#include "gapcap/trace.hpp"
#include "gapcap/units.hpp"

using namespace gapcap;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("unit suffixes map to SI base values") {
  struct Row {
    const char* text;
    double value;
    UnitFamily family;
  };
  const Row rows[] = {
      {"70um", 70e-6, UnitFamily::kLength},
      {"150nm", 150e-9, UnitFamily::kLength},
      {"2fm", 2e-15, UnitFamily::kLength},
      {"0.5mm", 0.5e-3, UnitFamily::kLength},
      {"6GHz", 6e9, UnitFamily::kFrequency},
      {"50MHz", 50e6, UnitFamily::kFrequency},
      {"2kHz", 2e3, UnitFamily::kFrequency},
      {"350MPa", 350e6, UnitFamily::kPressure},
      {"1GPa", 1e9, UnitFamily::kPressure},
      {"10mK", 1e-2, UnitFamily::kTemperature},
      {"40uK", 4e-5, UnitFamily::kTemperature},
      {"293K", 293.0, UnitFamily::kTemperature},
      {"2ng", 2e-12, UnitFamily::kMass},
      {"3pg", 3e-15, UnitFamily::kMass},
      {"1g", 1e-3, UnitFamily::kMass},
      {"5us", 5e-6, UnitFamily::kTime},
      {"20ns", 2e-8, UnitFamily::kTime},
      {"2fF", 2e-15, UnitFamily::kCapacitance},
      {"350aF", 3.5e-16, UnitFamily::kCapacitance},
      {"10nH", 1e-8, UnitFamily::kInductance},
      {"2uH", 2e-6, UnitFamily::kInductance},
      {"1uW", 1e-6, UnitFamily::kPower},
      {"0.5nm/mm", 0.5e-6, UnitFamily::kGradient},
      {"2um/mm", 2e-3, UnitFamily::kGradient},
      {"1e-6m/m", 1e-6, UnitFamily::kGradient},
      {"-150nm", -150e-9, UnitFamily::kLength},
      {"2.5e8Pa", 2.5e8, UnitFamily::kPressure},
  };
  for (const Row& row : rows) {
    CAPTURE(row.text);
    Quantity q = parse_quantity(row.text);
    CHECK(q.value == doctest::Approx(row.value).epsilon(1e-15));
    CHECK(q.family == row.family);
  }
}

TEST_CASE("bare numbers and padding are tolerated, junk is not") {
  Quantity bare = parse_quantity("42");
  CHECK(bare.value == 42.0);
  CHECK(bare.family == UnitFamily::kNone);
  CHECK(parse_quantity("  150 nm  ").value ==
        doctest::Approx(150e-9).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(parse_quantity("   "), "empty quantity",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_quantity("abc"),
                       "quantity 'abc' does not start with a number",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_quantity("12parsec"),
                       "unknown unit 'parsec' in '12parsec'",
                       std::invalid_argument);
}

TEST_CASE("field-checked parsing names the field and both families") {
  CHECK(parse_unit("70um", UnitFamily::kLength, "gap") ==
        doctest::Approx(70e-6).epsilon(1e-15));
  // A bare number is taken as already being in SI base units.
  CHECK(parse_unit("1.5e-7", UnitFamily::kLength, "gap") == 1.5e-7);
  CHECK_THROWS_WITH_AS(parse_unit("6GHz", UnitFamily::kLength, "gap"),
                       "gap: expected a length unit, got frequency",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_unit("oops", UnitFamily::kLength, "gap"),
                       "gap: quantity 'oops' does not start with a number",
                       std::invalid_argument);
}

TEST_CASE("family names read naturally in error messages") {
  CHECK(std::string(family_name(UnitFamily::kLength)) == "length");
  CHECK(std::string(family_name(UnitFamily::kFrequency)) == "frequency");
  CHECK(std::string(family_name(UnitFamily::kPressure)) == "pressure");
  CHECK(std::string(family_name(UnitFamily::kTemperature)) == "temperature");
  CHECK(std::string(family_name(UnitFamily::kMass)) == "mass");
  CHECK(std::string(family_name(UnitFamily::kTime)) == "time");
  CHECK(std::string(family_name(UnitFamily::kCapacitance)) == "capacitance");
  CHECK(std::string(family_name(UnitFamily::kInductance)) == "inductance");
  CHECK(std::string(family_name(UnitFamily::kPower)) == "power");
  CHECK(std::string(family_name(UnitFamily::kGradient)) == "gap gradient");
  CHECK(std::string(family_name(UnitFamily::kNone)) == "dimensionless");
}

TEST_CASE("doubles survive the text round trip bit for bit") {
  const double values[] = {0.1,
                           1.0 / 3.0,
                           1e300,
                           1e-300,
                           -2.5e-7,
                           6.62607015e-34,
                           0.0,
                           1.9686e6,
                           3.141592653589793,
                           123456789.123456789};
  for (double v : values) {
    CAPTURE(v);
    std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("numeric tables survive the CSV round trip bit for bit") {
  std::string path = "/tmp/gapcap_test_table.csv";
  std::vector<std::string> header = {"a", "b"};
  std::vector<std::vector<double>> rows = {
      {0.1, 1.0 / 3.0},
      {1e-300, 12345.678901234567},
      {-2.5e-7, 42.0}};
  write_csv(path, header, rows, {"generated for a round-trip check"});
  CsvTable table = read_csv(path);
  CHECK(table.header == header);
  REQUIRE(table.rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(table.rows[i][0] == rows[i][0]);
    CHECK(table.rows[i][1] == rows[i][1]);
  }
  // The comment line is present and ignored by the reader.
  CHECK(slurp(path).find("# generated") != std::string::npos);
}

TEST_CASE("malformed CSV input fails with the offending location") {
  CHECK_THROWS_WITH_AS(read_csv("/tmp/gapcap_test_absent.csv"),
                       "cannot open file: /tmp/gapcap_test_absent.csv",
                       std::invalid_argument);

  std::string path = "/tmp/gapcap_test_bad.csv";
  write_file(path, "a,b\n1.0,frog\n");
  CHECK_THROWS_WITH_AS(read_csv(path),
                       "/tmp/gapcap_test_bad.csv:2: not a number: 'frog'",
                       std::invalid_argument);

  write_file(path, "a,b\n# fine\n1.0,2.0,3.0\n");
  CHECK_THROWS_WITH_AS(
      read_csv(path),
      "/tmp/gapcap_test_bad.csv:3: column count does not match header",
      std::invalid_argument);

  write_file(path, "# only comments\n\n");
  CHECK_THROWS_WITH_AS(read_csv(path),
                       "/tmp/gapcap_test_bad.csv: missing header row",
                       std::invalid_argument);
}

TEST_CASE("ringdown traces round trip exactly through their CSV schema") {
  Trace trace;
  trace.kind = TraceKind::kRingdown;
  for (int i = 0; i < 40; ++i) {
    trace.x.push_back(1e-6 * i / 3.0);
    trace.y.push_back(std::exp(-0.1 * i) + 0.01);
  }
  std::string path = "/tmp/gapcap_test_ringdown.csv";
  write_trace_csv(path, trace);
  Trace back = load_ringdown_csv(path);
  CHECK(back.kind == TraceKind::kRingdown);
  CHECK(back.x == trace.x);
  CHECK(back.y == trace.y);
}

TEST_CASE("spectrum CSV conversion is idempotent after the first pass") {
  // The file stores cyclic Hz while the trace carries rad/s, so the first
  // write/load pair may move each abscissa by an ulp. After that the text
  // form is a fixed point: successive write/load cycles reproduce the same
  // bytes.
  Trace trace;
  trace.kind = TraceKind::kOmit;
  trace.x_unit = AxisUnit::kRadPerSec;
  for (int i = 0; i < 50; ++i) {
    trace.x.push_back(kTwoPi * (997.0 * i + 13.0) / 7.0);
    trace.y.push_back(1.0 / (1.0 + i));
  }
  std::string first = "/tmp/gapcap_test_spec1.csv";
  std::string second = "/tmp/gapcap_test_spec2.csv";
  std::string third = "/tmp/gapcap_test_spec3.csv";
  write_trace_csv(first, trace);
  Trace t1 = load_spectrum_csv(first);
  CHECK(t1.x_unit == AxisUnit::kRadPerSec);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1.x[i] == doctest::Approx(trace.x[i]).epsilon(1e-14));
    CHECK(t1.y[i] == trace.y[i]);
  }
  write_trace_csv(second, t1);
  Trace t2 = load_spectrum_csv(second);
  write_trace_csv(third, t2);
  CHECK(slurp(second) == slurp(third));
}

TEST_CASE("power sweeps are sorted by power on load") {
  std::string path = "/tmp/gapcap_test_power.csv";
  write_file(path, "power_w,gamma_tot_hz\n3e-7,4.0\n1e-7,2.0\n2e-7,3.0\n");
  Trace trace = load_power_csv(path);
  CHECK(trace.kind == TraceKind::kDampingVsPower);
  CHECK(trace.x == std::vector<double>{1e-7, 2e-7, 3e-7});
  CHECK(trace.y == std::vector<double>{2.0, 3.0, 4.0});
}

TEST_CASE("spectrum abscissae load as angular frequency") {
  std::string path = "/tmp/gapcap_test_spec_unit.csv";
  write_file(path, "detuning_hz,mag\n-1,0.5\n0,0.5\n1,0.5\n");
  Trace trace = load_spectrum_csv(path);
  CHECK(trace.x[0] == -kTwoPi);
  CHECK(trace.x[1] == 0.0);
  CHECK(trace.x[2] == kTwoPi);
}

TEST_CASE("schema mismatches name the expected header") {
  std::string path = "/tmp/gapcap_test_schema.csv";
  write_file(path, "detuning_hz,mag\n0,1\n1,1\n");
  CHECK_THROWS_WITH_AS(
      load_ringdown_csv(path),
      "/tmp/gapcap_test_schema.csv: expected header 'time_s,power_linear'",
      std::invalid_argument);
  write_file(path, "value\n1\n2\n");
  CHECK_THROWS_WITH_AS(
      load_radii_csv(path),
      "/tmp/gapcap_test_schema.csv: expected header 'radius_m,freq_hz'",
      std::invalid_argument);
}

TEST_CASE("batch values use the single-column schema") {
  std::string path = "/tmp/gapcap_test_batch.csv";
  write_batch_csv(path, {1.5, 2.5, 3.5}, {"three samples"});
  std::vector<double> values = load_batch_csv(path);
  CHECK(values == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("only two-column trace kinds have a CSV schema") {
  Trace trace;
  trace.kind = TraceKind::kQBatch;
  trace.x = {0.0, 1.0};
  trace.y = {1.0, 2.0};
  CHECK_THROWS_WITH_AS(write_trace_csv("/tmp/gapcap_test_nokind.csv", trace),
                       "trace kind has no two-column CSV schema",
                       std::invalid_argument);
}

TEST_CASE("a minimal project fills in calibrated defaults and reports them") {
  std::string path = "/tmp/gapcap_test_minimal.json";
  write_file(path, R"({"lc": {"a": {"plate_radius": "70um"}}})");
  std::ostringstream echo;
  ProjectConfig config = load_project(path, &echo);
  REQUIRE(config.lc.count("a") == 1);
  const LcDesign& lc = config.lc.at("a");
  CHECK(lc.plate_radius == doctest::Approx(70e-6).epsilon(1e-15));
  CHECK(lc.gap == 150e-9);
  CHECK(lc.hole_fill == 0.0);
  CHECK(lc.inductance == 10e-9);
  CHECK(lc.stray_capacitance == 0.0);
  CHECK(lc.participation == 1.0);
  std::string log = echo.str();
  CHECK(log.find("lc.a.gap: default") != std::string::npos);
  CHECK(log.find("calibrated device-class value") != std::string::npos);
  CHECK(log.find("lc.a.participation: default") != std::string::npos);
  CHECK(log.find("galvanically connected capacitor") != std::string::npos);
  // Explicit values are not echoed as defaults.
  CHECK(log.find("plate_radius") == std::string::npos);
}

TEST_CASE("a full project survives load, serialize, and reload byte for byte") {
  std::string path = "/tmp/gapcap_test_full.json";
  write_file(path, R"({
  "materials": {
    "film": {
      "rho": 2700,
      "nu": 0.33,
      "table": [[0.01, 70e9, 2e-6], [300, 69e9, 23.1e-6]]
    }
  },
  "drums": {
    "d1": {"trench_radius": "70um"},
    "d2": {"trench_radius": "80um", "top_thickness": "220nm"}
  },
  "lc": {
    "main": {"plate_radius": "70um", "gap": "150nm", "inductance": "10nH"}
  },
  "budget": {
    "steps": [
      {"name": "si-etch", "epsilon": "0.5nm/mm"},
      {"name": "evaporation", "epsilon": "0.1nm/mm"}
    ],
    "lateral_span": "2mm",
    "freq_tolerance": "50MHz"
  },
  "lattice": {
    "n_sites": 2,
    "omega_site": "6GHz",
    "j1": "100MHz",
    "j2": "200MHz",
    "boundary": "open",
    "drums": ["d1", "d2"]
  },
  "seeds": {"default": 5, "disorder": 9}
})");
  ProjectConfig config = load_project(path);
  CHECK(config.materials.at("film").density == 2700.0);
  CHECK(config.drums.at("d2").top_thickness ==
        doctest::Approx(220e-9).epsilon(1e-15));
  REQUIRE(config.budget.has_value());
  CHECK(config.budget->freq_tolerance ==
        doctest::Approx(kTwoPi * 50e6).epsilon(1e-15));
  CHECK(config.budget->steps[0].epsilon ==
        doctest::Approx(0.5e-6).epsilon(1e-15));

  std::string canon = serialize_project(config);
  std::string again = "/tmp/gapcap_test_full_rt.json";
  save_project(config, again);
  ProjectConfig reloaded = load_project(again);
  CHECK(serialize_project(reloaded) == canon);
}

TEST_CASE("project errors name the field that caused them") {
  std::string path = "/tmp/gapcap_test_bad.json";

  write_file(path, R"({"lc": {"a": {"plate_radius": "70um", "gap": "-150nm"}}})");
  CHECK_THROWS_AS(load_project(path), std::invalid_argument);
  try {
    load_project(path);
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    CHECK(what.find("lc.a") != std::string::npos);
    CHECK(what.find("gap") != std::string::npos);
  }

  write_file(path, R"({"lc": {"a": {"plate_radius": "70um", "frob": 1}}})");
  CHECK_THROWS_WITH_AS(load_project(path), "lc.a: unknown key 'frob'",
                       std::invalid_argument);

  write_file(path, R"({"lc": {"a": {"plate_radius": "70um", "gap": "6GHz"}}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "lc.a.gap: expected a length unit, got frequency",
                       std::invalid_argument);

  write_file(path, R"({"lattice": {"n_sites": 1, "drums": ["missing"]}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "lattice.drums: dangling reference to drum 'missing'",
                       std::invalid_argument);

  write_file(path,
             R"({"drums": {"d": {"trench_radius": "70um"}},
                 "lattice": {"n_sites": 2, "drums": ["d"]}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "lattice.drums: drum list length must equal n_sites",
                       std::invalid_argument);

  write_file(path, R"({"bogus": 1})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "/tmp/gapcap_test_bad.json: unknown key 'bogus'",
                       std::invalid_argument);

  write_file(path, R"({"seeds": {"x": -1}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "seeds.x: expected a nonnegative integer",
                       std::invalid_argument);

  write_file(path, R"({"lattice": {"n_sites": 2, "boundary": "twisted"}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "lattice.boundary: expected 'open' or 'periodic'",
                       std::invalid_argument);

  write_file(path, R"({"budget": {"steps": [], "lateral_span": "2mm"}})");
  CHECK_THROWS_WITH_AS(load_project(path),
                       "budget: missing key 'freq_tolerance'",
                       std::invalid_argument);

  CHECK_THROWS_AS(load_project("/tmp/gapcap_test_really_absent.json"),
                  std::invalid_argument);
}

TEST_CASE("syntax errors report the line and column") {
  std::string path = "/tmp/gapcap_test_syntax.json";
  write_file(path, "{\n  \"lc\": nope\n}\n");
  try {
    load_project(path);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    CHECK(what.find("/tmp/gapcap_test_syntax.json:2:") != std::string::npos);
  }
}

TEST_CASE("seed lookup falls through named, default, then fallback") {
  std::string path = "/tmp/gapcap_test_seeds.json";
  write_file(path, R"({"seeds": {"default": 5, "disorder": 9}})");
  ProjectConfig config = load_project(path);
  CHECK(project_seed(config, "disorder", 1) == 9);
  CHECK(project_seed(config, "ringdown", 1) == 5);
  ProjectConfig empty;
  CHECK(project_seed(empty, "disorder", 77) == 77);
}

TEST_CASE("the lattice section resolves drums into an angular-frequency spec") {
  std::string path = "/tmp/gapcap_test_lattice.json";
  write_file(path, R"({
  "drums": {
    "d1": {"trench_radius": "70um"},
    "d2": {"trench_radius": "80um"}
  },
  "lattice": {
    "n_sites": 2,
    "omega_site": "6GHz",
    "j1": "100MHz",
    "j2": "200MHz",
    "boundary": "periodic",
    "drums": ["d1", "d2"]
  }
})");
  ProjectConfig config = load_project(path);
  LatticeSpec spec = to_lattice_spec(config);
  CHECK(spec.n_sites == 2);
  REQUIRE(spec.omega_site.size() == 2);
  CHECK(spec.omega_site[0] == doctest::Approx(kTwoPi * 6e9).epsilon(1e-15));
  CHECK(spec.omega_site[1] == doctest::Approx(kTwoPi * 6e9).epsilon(1e-15));
  CHECK(spec.j1 == doctest::Approx(kTwoPi * 100e6).epsilon(1e-15));
  CHECK(spec.j2 == doctest::Approx(kTwoPi * 200e6).epsilon(1e-15));
  CHECK(spec.boundary == Boundary::kPeriodic);
  REQUIRE(spec.site_drums.size() == 2);
  CHECK(spec.site_drums[0].trench_radius ==
        doctest::Approx(70e-6).epsilon(1e-15));
  CHECK(spec.site_drums[1].trench_radius ==
        doctest::Approx(80e-6).epsilon(1e-15));

  ProjectConfig bare;
  CHECK_THROWS_WITH_AS(to_lattice_spec(bare), "project has no lattice section",
                       std::invalid_argument);
}
