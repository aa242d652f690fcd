// gapcap command-line front end: design, budgeting, simulation, fitting,
// and batch statistics for vacuum-gap electromechanical circuits.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapcap/circuit.hpp"
#include "gapcap/constants.hpp"
#include "gapcap/csv.hpp"
#include "gapcap/drum.hpp"
#include "gapcap/dynamics.hpp"
#include "gapcap/errors.hpp"
#include "gapcap/estimate.hpp"
#include "gapcap/lattice.hpp"
#include "gapcap/materials.hpp"
#include "gapcap/project.hpp"
#include "gapcap/trace.hpp"
#include "gapcap/units.hpp"
#include "gapcap/version.hpp"

namespace {

using nlohmann::json;
using namespace gapcap;

constexpr std::uint64_t kDefaultSeed = 1;

// Files read and written by the running command, for the run report.
struct RunContext {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool report = false;
  std::chrono::steady_clock::time_point start;
  std::string command_line;
};

RunContext g_ctx;

void note_input(const std::string& path) { g_ctx.inputs.push_back(path); }
void note_output(const std::string& path) { g_ctx.outputs.push_back(path); }

std::string fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void emit_run_report() {
  json report;
  report["command"] = g_ctx.command_line;
  json inputs = json::object();
  for (const auto& path : g_ctx.inputs) {
    inputs[path] = fnv1a_digest(path);
  }
  report["inputs"] = inputs;
  report["outputs"] = g_ctx.outputs;
  report["version"] = kVersion;
  double wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - g_ctx.start)
                       .count();
  report["wall_ms"] = wall_ms;
  std::cout << report.dump(2) << "\n";
}

// Human-readable value with an auto-picked decimal prefix, 6 significant
// digits. File output uses format_double instead; this is for terminal lines.
std::string fmt6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string human_scaled(double value, const double* scales,
                         const char* const* units, int n) {
  double a = std::fabs(value);
  for (int i = 0; i < n; ++i) {
    if (a >= scales[i]) {
      return fmt6(value / scales[i]) + std::string(" ") + units[i];
    }
  }
  return fmt6(value / scales[n - 1]) + std::string(" ") + units[n - 1];
}

std::string human_freq(double hz) {
  static const double s[] = {1e9, 1e6, 1e3, 1.0};
  static const char* const u[] = {"GHz", "MHz", "kHz", "Hz"};
  return human_scaled(hz, s, u, 4);
}

std::string human_length(double m) {
  static const double s[] = {1e-3, 1e-6, 1e-9, 1e-12, 1e-15};
  static const char* const u[] = {"mm", "um", "nm", "pm", "fm"};
  return human_scaled(m, s, u, 5);
}

std::string human_pressure(double pa) {
  static const double s[] = {1e9, 1e6, 1e3, 1.0};
  static const char* const u[] = {"GPa", "MPa", "kPa", "Pa"};
  return human_scaled(pa, s, u, 4);
}

std::string human_mass(double kg) {
  static const double s[] = {1e-3, 1e-6, 1e-9, 1e-12, 1e-15, 1e-18};
  static const char* const u[] = {"g", "mg", "ug", "ng", "pg", "fg"};
  return human_scaled(kg, s, u, 6);
}

std::string human_capacitance(double f) {
  static const double s[] = {1e-12, 1e-15, 1e-18};
  static const char* const u[] = {"pF", "fF", "aF"};
  return human_scaled(f, s, u, 3);
}

// Quantity flags arrive as text so unit suffixes work; bare numbers are the
// SI base unit of the expected family.
double parse_flag(const std::string& text, UnitFamily family,
                  const std::string& field) {
  return parse_unit(text, family, field);
}

// Budget epsilons read and print in nm/mm; a bare number means nm/mm here,
// not the SI base m/m, matching how the step table is quoted.
double parse_gradient_flag(const std::string& text, const std::string& field) {
  Quantity q = parse_quantity(text);
  if (q.family == UnitFamily::kNone) return q.value * 1e-6;
  if (q.family == UnitFamily::kGradient) return q.value;
  throw std::invalid_argument(field + ": expected a gap gradient (nm/mm)");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

Material resolve_material(const std::string& name_or_path) {
  if (name_or_path == "aluminum") return default_aluminum();
  if (name_or_path == "silicon") return default_silicon();
  Material m = load_material_table(name_or_path);
  note_input(name_or_path);
  return m;
}

void write_plot_sidecar(const std::string& csv_path, const std::string& kind,
                        const std::string& x_col, const std::string& x_label,
                        const std::string& x_scale, const std::string& y_col,
                        const std::string& y_label, const std::string& y_scale,
                        const std::string& title) {
  json plot;
  plot["data"] = csv_path;
  plot["kind"] = kind;
  plot["title"] = title;
  plot["x"] = {{"column", x_col}, {"label", x_label}, {"scale", x_scale}};
  plot["y"] = {{"column", y_col}, {"label", y_label}, {"scale", y_scale}};
  std::string path = csv_path + ".plot";
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write plot sidecar: " + path);
  }
  out << plot.dump(2) << "\n";
  note_output(path);
}

json fit_report_json(const FitReport& report) {
  json j;
  j["params"] = report.params;
  j["std_errors"] = report.std_errors;
  j["residual_rms"] = report.residual_rms;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["condition"] = report.condition;
  j["warnings"] = report.warnings;
  return j;
}

int finish_fit(const FitReport& report, const std::string& out_path) {
  json j = fit_report_json(report);
  std::cout << j.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw std::invalid_argument("cannot write fit report: " + out_path);
    }
    out << j.dump(2) << "\n";
    note_output(out_path);
  }
  return report.converged ? 0 : 3;
}

// Seed precedence: explicit flag, then GAPCAP_SEED, then the project's seed
// map, then a fixed default.
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value,
                           const std::optional<ProjectConfig>& project,
                           const std::string& name) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("GAPCAP_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw std::invalid_argument(
          "GAPCAP_SEED must be a nonnegative integer");
    }
    return v;
  }
  if (project) return project_seed(*project, name, kDefaultSeed);
  return kDefaultSeed;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) {
    throw std::invalid_argument("axis needs at least 2 points and hi > lo");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

// All option values, collected before dispatch. Quantity-valued options stay
// text until the command parses them with its unit family.
struct Options {
  // global
  std::string project_path;
  bool verbose = false;
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;

  // design drum / shared drum geometry
  std::string drum_name;
  std::string radius = "70um";
  std::string top = "200nm";
  std::string bottom = "150nm";
  std::string depth = "300nm";
  double clamp_ratio = 1.0;
  std::string hole_radius = "0";
  int hole_count = 0;
  std::string stress = "350MPa";
  double density = 2700.0;
  double q0 = 0.0;
  double dq = 1.0;
  std::string delta_d = "0";
  std::string temperature = "0";
  std::string yield_stress = "1GPa";

  // design lc
  std::string lc_name;
  std::string gap = "150nm";
  std::string plate_radius;
  double hole_fill = 0.0;
  std::string inductance = "10nH";
  std::string stray = "0";
  double participation = 1.0;
  std::string omega_m_text;
  std::string m_eff_text;

  // budget
  std::vector<std::string> budget_steps;
  std::string budget_total;
  std::string budget_solve;
  std::string budget_span = "2mm";
  std::string budget_freq_tol = "50MHz";
  std::string budget_omega_c;
  std::string budget_gap = "200nm";

  // stress
  std::string film = "aluminum";
  std::string substrate = "silicon";
  std::string sigma_rt = "0";
  std::string t_low = "0.01K";
  std::string t_high = "293K";
  int steps = 1024;
  std::string t_sub = "523um";
  std::string t_film;
  double kappa_before = 0.0;
  double kappa_after = 0.0;

  // simulate ringdown
  std::string rd_omega_m = "2MHz";
  double rd_q = 4e7;
  double rd_c_readout = 0.0;
  double rd_decay_constants = 3.0;
  int rd_points = 2001;
  double rd_amplitude = 1.0;
  double rd_noise_floor = 0.0;
  std::string rd_out = "ringdown.csv";
  double rd_gamma_nl = 0.0;
  double rd_e_sat = 1.0;
  double rd_threshold = 0.0;

  // simulate omit
  std::string om_omega_c = "6GHz";
  std::string om_kappa = "1MHz";
  std::string om_kappa_ext = "500kHz";
  double om_n_cav = 1e5;
  double om_n_th = 0.0;
  std::vector<std::string> om_modes;
  std::string om_omega_ref;
  std::string om_span;
  int om_points = 2001;
  int om_window_points = 401;
  std::string om_out = "omit.csv";

  // simulate lattice
  int lat_n_sites = 12;
  std::string lat_omega_site = "6GHz";
  std::string lat_j1 = "100MHz";
  std::string lat_j2 = "200MHz";
  std::string lat_boundary = "open";
  std::string lat_out = "lattice-modes.csv";
  std::string lat_json = "lattice-modes.json";
  std::string lat_mech;

  // simulate disorder
  int dis_n_sites = 12;
  std::string dis_radius = "50um";
  std::string dis_sigma_r = "0";
  std::string dis_sigma_gradient = "0";
  int dis_trials = 1000;
  std::string dis_span = "2mm";
  std::string dis_out_hist = "disorder-hist.csv";
  std::string dis_out_sites = "disorder-sites.csv";

  // fit
  std::string fit_input;
  std::string fit_out;
  double tail_fraction = 0.7;
  std::string fit_omega_m;
  int fit_modes = 1;
  double mix_w = 0.5;
  double mix_mu1 = 0.0;
  double mix_sigma1 = 0.0;
  double mix_mu2 = 0.0;
  double mix_sigma2 = 0.0;
  bool mix_init_given = false;

  // stats
  std::string stats_input;
  std::string stats_out;
};

DrumGeometry drum_from_options(const Options& o, CLI::App* cmd,
                               const std::optional<ProjectConfig>& project) {
  DrumGeometry geom;
  if (!o.drum_name.empty()) {
    if (!project) {
      throw std::invalid_argument("--drum needs --project");
    }
    auto it = project->drums.find(o.drum_name);
    if (it == project->drums.end()) {
      throw std::invalid_argument("project has no drum named '" +
                                  o.drum_name + "'");
    }
    geom = it->second;
  }
  auto given = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (o.drum_name.empty() || given("--radius")) {
    geom.trench_radius = parse_flag(o.radius, UnitFamily::kLength, "--radius");
  }
  if (o.drum_name.empty() || given("--top")) {
    geom.top_thickness = parse_flag(o.top, UnitFamily::kLength, "--top");
  }
  if (o.drum_name.empty() || given("--bottom")) {
    geom.bottom_thickness =
        parse_flag(o.bottom, UnitFamily::kLength, "--bottom");
  }
  if (o.drum_name.empty() || given("--depth")) {
    geom.trench_depth = parse_flag(o.depth, UnitFamily::kLength, "--depth");
  }
  if (o.drum_name.empty() || given("--clamp-ratio")) {
    geom.clamp_ratio = o.clamp_ratio;
  }
  if (o.drum_name.empty() || given("--hole-radius")) {
    geom.hole_radius =
        parse_flag(o.hole_radius, UnitFamily::kLength, "--hole-radius");
  }
  if (o.drum_name.empty() || given("--holes")) {
    geom.hole_count = o.hole_count;
  }
  geom.validate();
  return geom;
}

int cmd_design_drum(const Options& o, CLI::App* cmd,
                    const std::optional<ProjectConfig>& project) {
  DrumGeometry geom = drum_from_options(o, cmd, project);
  double stress_pa = parse_flag(o.stress, UnitFamily::kPressure, "--stress");
  double yield_pa =
      parse_flag(o.yield_stress, UnitFamily::kPressure, "--yield");

  double omega_m = fundamental_frequency(geom, stress_pa, o.density);
  double m_eff = effective_mass(geom, o.density);
  ClampStressResult clamp =
      clamp_stress(stress_pa, geom.clamp_ratio, yield_pa);

  std::cout << "drum radius " << human_length(geom.trench_radius) << ", gap "
            << human_length(geom.gap()) << "\n";
  std::cout << "Omega_m/2pi = " << human_freq(omega_m / kTwoPi) << "\n";
  std::cout << "effective mass = " << human_mass(m_eff) << "\n";
  std::cout << "clamp stress = " << human_pressure(clamp.local_stress) << " ("
            << (clamp.survives ? "survives" : "exceeds") << " yield "
            << human_pressure(yield_pa) << ")\n";

  double delta_d = parse_flag(o.delta_d, UnitFamily::kLength, "--delta-d");
  if (delta_d > 0.0) {
    std::cout << "lithography disorder = "
              << fmt6(lithography_disorder(geom.trench_radius, delta_d) * 100.0)
              << " % fractional frequency\n";
  }
  if (o.q0 > 0.0) {
    double q = quality_factor(o.q0, o.dq);
    MechanicalMode mode = MechanicalMode::from_q(omega_m, q, m_eff);
    std::cout << "Q_m = " << fmt6(q) << ", Gamma_m/2pi = "
              << human_freq(mode.gamma_m / kTwoPi) << ", 1/e decay time = "
              << fmt6(1.0 / mode.gamma_m) << " s\n";
    double temp_k =
        parse_flag(o.temperature, UnitFamily::kTemperature, "--temperature");
    if (temp_k > 0.0) {
      std::cout << "thermal force noise = "
                << fmt6(force_sensitivity(mode, temp_k)) << " N/sqrt(Hz) at "
                << fmt6(temp_k) << " K\n";
    }
  }
  return 0;
}

LcDesign lc_from_options(const Options& o, CLI::App* cmd,
                         const std::optional<ProjectConfig>& project) {
  LcDesign lc;
  if (!o.lc_name.empty()) {
    if (!project) {
      throw std::invalid_argument("--lc needs --project");
    }
    auto it = project->lc.find(o.lc_name);
    if (it == project->lc.end()) {
      throw std::invalid_argument("project has no lc circuit named '" +
                                  o.lc_name + "'");
    }
    lc = it->second;
  }
  auto given = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (o.lc_name.empty() || given("--gap")) {
    lc.gap = parse_flag(o.gap, UnitFamily::kLength, "--gap");
  }
  if (o.lc_name.empty() || given("--plate-radius")) {
    if (o.plate_radius.empty()) {
      throw std::invalid_argument("--plate-radius is required");
    }
    lc.plate_radius =
        parse_flag(o.plate_radius, UnitFamily::kLength, "--plate-radius");
  }
  if (o.lc_name.empty() || given("--hole-fill")) {
    lc.hole_fill = o.hole_fill;
  }
  if (o.lc_name.empty() || given("--inductance")) {
    lc.inductance =
        parse_flag(o.inductance, UnitFamily::kInductance, "--inductance");
  }
  if (o.lc_name.empty() || given("--stray")) {
    lc.stray_capacitance =
        parse_flag(o.stray, UnitFamily::kCapacitance, "--stray");
  }
  if (o.lc_name.empty() || given("--participation")) {
    lc.participation = o.participation;
  }
  lc.validate();
  return lc;
}

int cmd_design_lc(const Options& o, CLI::App* cmd,
                  const std::optional<ProjectConfig>& project) {
  LcDesign lc = lc_from_options(o, cmd, project);
  CapacitanceResult cap = capacitance(lc);
  double omega_c = resonance(lc);
  GapSensitivity sens = gap_sensitivity(lc);

  std::cout << "gap " << human_length(lc.gap) << ", plate radius "
            << human_length(lc.plate_radius) << "\n";
  std::cout << "C_gap = " << human_capacitance(cap.c_gap) << ", C_total = "
            << human_capacitance(cap.c_total) << "\n";
  std::cout << "omega_c/2pi = " << human_freq(omega_c / kTwoPi) << "\n";
  // rad/s per meter -> MHz of cyclic shift per nanometer of gap change.
  double mhz_per_nm = sens.absolute / kTwoPi * 1e-9 / 1e6;
  std::cout << "gap sensitivity = " << fmt6(mhz_per_nm) << " MHz/nm\n";

  if (!o.omega_m_text.empty() && !o.m_eff_text.empty()) {
    double omega_m_hz =
        parse_flag(o.omega_m_text, UnitFamily::kFrequency, "--omega-m");
    double m_eff = parse_flag(o.m_eff_text, UnitFamily::kMass, "--m-eff");
    MechanicalMode mode;
    mode.omega_m = omega_m_hz * kTwoPi;
    mode.m_eff = m_eff;
    std::cout << "x_zpf = " << fmt6(zero_point_motion(mode) * 1e15)
              << " fm\n";
    std::cout << "g0/2pi = " << human_freq(coupling_g0(lc, mode) / kTwoPi)
              << "\n";
  }
  return 0;
}

// Known fabrication steps and their lateral gap non-uniformity, nm/mm. The
// planarization allocation is the one normally solved for.
ToleranceBudget default_budget() {
  ToleranceBudget budget;
  budget.steps = {{"si-etch", 0.5e-6},
                  {"evaporation", 0.1e-6},
                  {"lto", 0.2e-6},
                  {"ibe", 0.1e-6},
                  {"cmp", 0.0}};
  budget.lateral_span = 2e-3;
  budget.freq_tolerance = 50e6 * kTwoPi;
  return budget;
}

int cmd_budget(const Options& o, CLI::App* cmd,
               const std::optional<ProjectConfig>& project) {
  ToleranceBudget budget;
  if (project && project->budget) {
    budget = *project->budget;
  } else if (!o.budget_steps.empty()) {
    for (const std::string& text : o.budget_steps) {
      auto eq = text.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("--step expects name=epsilon, got '" +
                                    text + "'");
      }
      BudgetStep step;
      step.name = text.substr(0, eq);
      step.epsilon = parse_gradient_flag(text.substr(eq + 1), "--step");
      budget.steps.push_back(step);
    }
    budget.lateral_span =
        parse_flag(o.budget_span, UnitFamily::kLength, "--span");
    budget.freq_tolerance =
        parse_flag(o.budget_freq_tol, UnitFamily::kFrequency,
                   "--freq-tolerance") *
        kTwoPi;
  } else {
    budget = default_budget();
  }
  if (cmd->count("--span") > 0) {
    budget.lateral_span =
        parse_flag(o.budget_span, UnitFamily::kLength, "--span");
  }
  if (cmd->count("--freq-tolerance") > 0) {
    budget.freq_tolerance =
        parse_flag(o.budget_freq_tol, UnitFamily::kFrequency,
                   "--freq-tolerance") *
        kTwoPi;
  }

  std::printf("%-14s %12s\n", "step", "eps (nm/mm)");
  for (const auto& step : budget.steps) {
    std::printf("%-14s %12s\n", step.name.c_str(),
                fmt6(step.epsilon * 1e6).c_str());
  }
  std::cout << "rss total = " << fmt6(budget_rss(budget) * 1e6)
            << " nm/mm\n";

  if (!o.budget_omega_c.empty()) {
    double omega_c = parse_flag(o.budget_omega_c, UnitFamily::kFrequency,
                                "--omega-c") *
                     kTwoPi;
    double gap = parse_flag(o.budget_gap, UnitFamily::kLength, "--gap");
    double limit = tolerance_limit(budget, omega_c, gap);
    std::cout << "tolerance limit = " << fmt6(limit * 1e6)
              << " nm/mm (gap " << human_length(gap) << ", span "
              << human_length(budget.lateral_span) << ", freq tolerance "
              << human_freq(budget.freq_tolerance / kTwoPi) << ")\n";
    if (!o.budget_solve.empty() && o.budget_total.empty()) {
      double headroom = budget_rss(budget, limit, o.budget_solve);
      std::cout << "solved " << o.budget_solve << " = "
                << fmt6(headroom * 1e6) << " nm/mm at total "
                << fmt6(limit * 1e6) << " nm/mm\n";
    }
  }
  if (!o.budget_total.empty()) {
    double total = parse_gradient_flag(o.budget_total, "--total");
    if (o.budget_solve.empty()) {
      throw std::invalid_argument("--total needs --solve <step>");
    }
    double headroom = budget_rss(budget, total, o.budget_solve);
    std::cout << "solved " << o.budget_solve << " = " << fmt6(headroom * 1e6)
              << " nm/mm at total " << fmt6(total * 1e6) << " nm/mm\n";
  }
  return 0;
}

int cmd_stress_thermal(const Options& o) {
  Material film = resolve_material(o.film);
  Material substrate = resolve_material(o.substrate);
  double sigma_rt =
      parse_flag(o.sigma_rt, UnitFamily::kPressure, "--sigma-rt");
  double t_low = parse_flag(o.t_low, UnitFamily::kTemperature, "--t-low");
  double t_high = parse_flag(o.t_high, UnitFamily::kTemperature, "--t-high");
  FilmStressState state =
      thermal_stress(film, substrate, sigma_rt, t_low, t_high, o.steps);
  std::cout << "film " << film.name << " on " << substrate.name << ", "
            << fmt6(t_low) << " K to " << fmt6(t_high) << " K\n";
  std::cout << "sigma_rt = " << human_pressure(state.sigma_rt) << "\n";
  std::cout << "sigma_cryo = " << human_pressure(state.sigma_cryo) << " ("
            << to_string(state.provenance) << ")\n";
  return 0;
}

int cmd_stress_stoney(const Options& o) {
  Material substrate = resolve_material(o.substrate);
  WaferGeometry wafer;
  wafer.substrate_thickness =
      parse_flag(o.t_sub, UnitFamily::kLength, "--t-sub");
  if (o.t_film.empty()) {
    throw std::invalid_argument("--t-film is required");
  }
  wafer.film_thickness = parse_flag(o.t_film, UnitFamily::kLength, "--t-film");
  wafer.curvature_before = o.kappa_before;
  wafer.curvature_after = o.kappa_after;
  FilmStressState state = stoney_stress(substrate, wafer);
  std::cout << "substrate " << substrate.name << ", thickness "
            << human_length(wafer.substrate_thickness) << ", film "
            << human_length(wafer.film_thickness) << "\n";
  std::cout << "curvature change = " << fmt6(wafer.curvature_after -
                                             wafer.curvature_before)
            << " 1/m\n";
  std::cout << "film stress = " << human_pressure(state.sigma_cryo) << " ("
            << to_string(state.provenance) << ")\n";
  return 0;
}

int cmd_simulate_ringdown(const Options& o, bool seed_given,
                          const std::optional<ProjectConfig>& project) {
  double omega_m =
      parse_flag(o.rd_omega_m, UnitFamily::kFrequency, "--omega-m") * kTwoPi;
  if (!(o.rd_q > 0.0)) {
    throw std::invalid_argument("--q must be positive");
  }
  MechanicalMode mode = MechanicalMode::from_q(omega_m, o.rd_q, 0.0);
  double gamma_tot = effective_damping(mode.gamma_m, o.rd_c_readout);
  if (!(o.rd_decay_constants > 0.0)) {
    throw std::invalid_argument("--decay-constants must be positive");
  }
  double duration = o.rd_decay_constants / gamma_tot;
  std::vector<double> t_axis = linspace(0.0, duration, o.rd_points);
  std::uint64_t seed = resolve_seed(seed_given, o.seed, project, "ringdown");

  RingdownNonlinearity nl;
  if (o.rd_gamma_nl > 0.0) {
    nl.enabled = true;
    nl.gamma_nl = o.rd_gamma_nl;
    nl.e_sat = o.rd_e_sat;
    nl.threshold = o.rd_threshold;
  }
  Trace trace = ringdown_trace(mode, o.rd_c_readout, t_axis, o.rd_amplitude,
                               o.rd_noise_floor, seed, nl);
  write_trace_csv(o.rd_out, trace);
  note_output(o.rd_out);
  write_plot_sidecar(o.rd_out, "ringdown", "time_s", "time (s)", "linear",
                     "power_linear", "mechanical energy (arb.)", "log",
                     "mechanical ringdown");
  std::cout << "wrote " << o.rd_out << " (" << trace.size() << " points, "
            << fmt6(duration) << " s span)\n";
  std::cout << "Gamma_tot/2pi = " << human_freq(gamma_tot / kTwoPi)
            << ", 1/e time = " << fmt6(1.0 / gamma_tot) << " s, seed = "
            << seed << "\n";
  return 0;
}

int cmd_simulate_omit(const Options& o) {
  OptomechParams p;
  p.omega_c =
      parse_flag(o.om_omega_c, UnitFamily::kFrequency, "--omega-c") * kTwoPi;
  p.kappa = parse_flag(o.om_kappa, UnitFamily::kFrequency, "--kappa") * kTwoPi;
  p.kappa_ext =
      parse_flag(o.om_kappa_ext, UnitFamily::kFrequency, "--kappa-ext") *
      kTwoPi;
  p.n_cav = o.om_n_cav;
  p.n_th = o.om_n_th;
  p.validate();

  std::vector<CoupledMode> modes;
  for (const std::string& text : o.om_modes) {
    std::vector<std::string> parts = split(text, ',');
    if (parts.size() != 3) {
      throw std::invalid_argument(
          "--mode expects Omega,Gamma,g0 (e.g. 2MHz,0.05Hz,15Hz), got '" +
          text + "'");
    }
    double omega =
        parse_flag(parts[0], UnitFamily::kFrequency, "--mode Omega") * kTwoPi;
    double gamma =
        parse_flag(parts[1], UnitFamily::kFrequency, "--mode Gamma") * kTwoPi;
    double g0 =
        parse_flag(parts[2], UnitFamily::kFrequency, "--mode g0") * kTwoPi;
    if (!(omega > 0.0) || !(gamma > 0.0)) {
      throw std::invalid_argument(
          "--mode needs positive frequency and damping");
    }
    CoupledMode cm;
    cm.mode.omega_m = omega;
    cm.mode.gamma_m = gamma;
    cm.mode.q_m = omega / gamma;
    cm.g0 = g0;
    modes.push_back(cm);
  }

  double omega_ref = -1.0;
  if (!o.om_omega_ref.empty()) {
    omega_ref =
        parse_flag(o.om_omega_ref, UnitFamily::kFrequency, "--omega-ref") *
        kTwoPi;
  } else if (!modes.empty()) {
    omega_ref = modes.front().mode.omega_m;
  }

  // Coarse global span plus a dense window around each mode, so narrow
  // windows stay resolved without a uniformly fine grid.
  double mu_min = 0.0;
  double mu_max = 0.0;
  std::vector<std::pair<double, double>> windows;
  for (const auto& cm : modes) {
    double mu = cm.mode.omega_m - omega_ref;
    mu_min = std::min(mu_min, mu);
    mu_max = std::max(mu_max, mu);
    double g_pump = cm.g0 * std::sqrt(p.n_cav);
    double coop =
        4.0 * g_pump * g_pump / (p.kappa * cm.mode.gamma_m);
    double gamma_tot = effective_damping(cm.mode.gamma_m, coop);
    windows.emplace_back(mu - 15.0 * gamma_tot, mu + 15.0 * gamma_tot);
  }
  double lo;
  double hi;
  if (!o.om_span.empty()) {
    double span =
        parse_flag(o.om_span, UnitFamily::kFrequency, "--span") * kTwoPi;
    if (!(span > 0.0)) {
      throw std::invalid_argument("--span must be positive");
    }
    lo = -0.5 * span;
    hi = 0.5 * span;
  } else {
    lo = mu_min - 3.0 * p.kappa;
    hi = mu_max + 3.0 * p.kappa;
  }
  std::vector<double> axis = linspace(lo, hi, o.om_points);
  for (const auto& w : windows) {
    double wlo = std::max(lo, w.first);
    double whi = std::min(hi, w.second);
    if (!(whi > wlo)) continue;
    std::vector<double> dense = linspace(wlo, whi, o.om_window_points);
    axis.insert(axis.end(), dense.begin(), dense.end());
  }
  std::sort(axis.begin(), axis.end());
  std::vector<double> unique_axis;
  double tol = (hi - lo) * 1e-13;
  for (double x : axis) {
    if (unique_axis.empty() || x > unique_axis.back() + tol) {
      unique_axis.push_back(x);
    }
  }

  Spectrum spectrum = omit_spectrum(p, modes, unique_axis, omega_ref);
  if (!spectrum.resolved_sideband) {
    std::cout << "warning: sideband resolution marginal, reference mode "
                 "frequency does not exceed kappa\n";
  }
  Trace trace = spectrum.magnitude_trace();
  write_trace_csv(o.om_out, trace);
  note_output(o.om_out);
  write_plot_sidecar(o.om_out, "omit", "detuning_hz",
                     "probe detuning from two-photon resonance (Hz)",
                     "linear", "mag", "|t|", "linear",
                     "probe transmission magnitude");
  std::cout << "wrote " << o.om_out << " (" << trace.size() << " points)\n";
  int index = 0;
  for (const auto& cm : modes) {
    double g_pump = cm.g0 * std::sqrt(p.n_cav);
    double coop = 4.0 * g_pump * g_pump / (p.kappa * cm.mode.gamma_m);
    std::cout << "mode " << index++ << ": Omega/2pi = "
              << human_freq(cm.mode.omega_m / kTwoPi) << ", C = "
              << fmt6(coop) << ", Gamma_tot/2pi = "
              << human_freq(effective_damping(cm.mode.gamma_m, coop) / kTwoPi)
              << "\n";
  }
  return 0;
}

int cmd_simulate_lattice(const Options& o,
                         const std::optional<ProjectConfig>& project) {
  LatticeSpec spec;
  if (project && project->lattice) {
    spec = to_lattice_spec(*project);
  } else {
    double omega =
        parse_flag(o.lat_omega_site, UnitFamily::kFrequency, "--omega-site") *
        kTwoPi;
    double j1 = parse_flag(o.lat_j1, UnitFamily::kFrequency, "--j1") * kTwoPi;
    double j2 = parse_flag(o.lat_j2, UnitFamily::kFrequency, "--j2") * kTwoPi;
    Boundary boundary;
    if (o.lat_boundary == "open") {
      boundary = Boundary::kOpen;
    } else if (o.lat_boundary == "periodic") {
      boundary = Boundary::kPeriodic;
    } else {
      throw std::invalid_argument("--boundary must be open or periodic");
    }
    spec = LatticeSpec::uniform(o.lat_n_sites, omega, j1, j2, boundary);
  }
  spec.validate();

  ModeSet modes = eigenmodes(build_hamiltonian(spec));
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < modes.eigenfrequencies.size(); ++m) {
    rows.push_back({static_cast<double>(m),
                    modes.eigenfrequencies[m] / kTwoPi, modes.ipr[m]});
  }
  write_csv(o.lat_out, {"mode", "freq_hz", "ipr"}, rows);
  note_output(o.lat_out);
  write_plot_sidecar(o.lat_out, "lattice-modes", "mode", "mode index",
                     "linear", "freq_hz", "eigenfrequency (Hz)", "linear",
                     "lattice eigenmode spectrum");

  json mode_json;
  mode_json["eigenfrequencies_hz"] = json::array();
  for (double w : modes.eigenfrequencies) {
    mode_json["eigenfrequencies_hz"].push_back(w / kTwoPi);
  }
  mode_json["ipr"] = modes.ipr;
  mode_json["eigenvectors"] = modes.eigenvectors;
  {
    std::ofstream out(o.lat_json);
    if (!out) {
      throw std::invalid_argument("cannot write mode set: " + o.lat_json);
    }
    out << mode_json.dump(2) << "\n";
    note_output(o.lat_json);
  }

  std::cout << "wrote " << o.lat_out << " and " << o.lat_json << " ("
            << spec.n_sites << " sites, "
            << (spec.boundary == Boundary::kOpen ? "open" : "periodic")
            << ")\n";
  if (spec.j1 != spec.j2) {
    EdgeStateReport edges = edge_states(modes, spec.omega_site.front(),
                                        spec.j1, spec.j2);
    std::cout << "mid-gap modes = " << edges.n_mid_gap << ", splitting/2pi = "
              << human_freq(edges.splitting / kTwoPi)
              << ", edge IPR = " << fmt6(edges.ipr_left) << " / "
              << fmt6(edges.ipr_right) << "\n";
  }

  if (!o.lat_mech.empty()) {
    if (spec.site_drums.empty()) {
      throw std::invalid_argument(
          "--mech needs site drums (project lattice with drum names)");
    }
    double stress_pa =
        parse_flag(o.stress, UnitFamily::kPressure, "--stress");
    std::vector<double> freqs = radius_multiplex(spec, stress_pa, o.density);
    std::vector<std::vector<double>> mech_rows;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      mech_rows.push_back({static_cast<double>(i), freqs[i] / kTwoPi});
    }
    write_csv(o.lat_mech, {"site", "freq_hz"}, mech_rows);
    note_output(o.lat_mech);
    write_plot_sidecar(o.lat_mech, "radius-multiplex", "site", "site index",
                       "linear", "freq_hz", "mechanical frequency (Hz)",
                       "linear", "radius-multiplexed mechanical frequencies");
    std::cout << "wrote " << o.lat_mech << "\n";
  }
  return 0;
}

int cmd_simulate_disorder(const Options& o, CLI::App* cmd, bool seed_given,
                          const std::optional<ProjectConfig>& project) {
  LatticeSpec spec;
  DisorderInputs inputs;
  if (project && project->lattice && !project->lattice->drum_names.empty()) {
    spec = to_lattice_spec(*project);
    if (project->lc.empty()) {
      throw std::invalid_argument(
          "disorder Monte Carlo needs an lc circuit in the project");
    }
    inputs.lc = project->lc.begin()->second;
  } else {
    double radius = parse_flag(o.dis_radius, UnitFamily::kLength, "--radius");
    DrumGeometry drum;
    drum.trench_radius = radius;
    drum.top_thickness = parse_flag(o.top, UnitFamily::kLength, "--top");
    drum.bottom_thickness =
        parse_flag(o.bottom, UnitFamily::kLength, "--bottom");
    drum.trench_depth = parse_flag(o.depth, UnitFamily::kLength, "--depth");
    drum.validate();
    spec = LatticeSpec::uniform(
        o.dis_n_sites,
        parse_flag(o.lat_omega_site, UnitFamily::kFrequency, "--omega-site") *
            kTwoPi,
        parse_flag(o.lat_j1, UnitFamily::kFrequency, "--j1") * kTwoPi,
        parse_flag(o.lat_j2, UnitFamily::kFrequency, "--j2") * kTwoPi);
    spec.site_drums.assign(static_cast<std::size_t>(o.dis_n_sites), drum);

    LcDesign lc;
    lc.gap = parse_flag(o.gap, UnitFamily::kLength, "--gap");
    lc.plate_radius = cmd->count("--plate-radius") > 0
                          ? parse_flag(o.plate_radius, UnitFamily::kLength,
                                       "--plate-radius")
                          : radius;
    lc.inductance =
        parse_flag(o.inductance, UnitFamily::kInductance, "--inductance");
    lc.stray_capacitance =
        parse_flag(o.stray, UnitFamily::kCapacitance, "--stray");
    lc.validate();
    inputs.lc = lc;
  }
  inputs.stress_pa = parse_flag(o.stress, UnitFamily::kPressure, "--stress");
  inputs.density = o.density;
  inputs.lateral_span =
      parse_flag(o.dis_span, UnitFamily::kLength, "--span");

  double sigma_r =
      parse_flag(o.dis_sigma_r, UnitFamily::kLength, "--sigma-r");
  double sigma_gradient =
      parse_gradient_flag(o.dis_sigma_gradient, "--sigma-gradient");
  std::uint64_t seed = resolve_seed(seed_given, o.seed, project, "disorder");

  DisorderStats stats = disorder_monte_carlo(spec, inputs, sigma_r,
                                             sigma_gradient, o.dis_trials,
                                             seed);

  std::vector<std::vector<double>> hist_rows;
  for (std::size_t b = 0; b + 1 < stats.detuning_histogram.edges.size();
       ++b) {
    hist_rows.push_back(
        {stats.detuning_histogram.edges[b] / kTwoPi,
         stats.detuning_histogram.edges[b + 1] / kTwoPi,
         static_cast<double>(stats.detuning_histogram.counts[b])});
  }
  write_csv(o.dis_out_hist, {"bin_lo_hz", "bin_hi_hz", "count"}, hist_rows);
  note_output(o.dis_out_hist);
  write_plot_sidecar(o.dis_out_hist, "disorder-histogram", "bin_lo_hz",
                     "peak-to-peak cavity detuning (Hz)", "linear", "count",
                     "trials", "linear",
                     "cavity detuning spread over Monte Carlo trials");

  std::vector<std::vector<double>> site_rows;
  for (std::size_t i = 0; i < stats.mean_omega_m.size(); ++i) {
    site_rows.push_back({static_cast<double>(i),
                         stats.mean_omega_m[i] / kTwoPi,
                         stats.std_omega_m[i] / kTwoPi});
  }
  write_csv(o.dis_out_sites, {"site", "mean_freq_hz", "std_freq_hz"},
            site_rows);
  note_output(o.dis_out_sites);
  write_plot_sidecar(o.dis_out_sites, "disorder-sites", "site", "site index",
                     "linear", "std_freq_hz",
                     "mechanical frequency spread (Hz)", "linear",
                     "per-site mechanical frequency dispersion");

  std::cout << "wrote " << o.dis_out_hist << " and " << o.dis_out_sites
            << " (" << o.dis_trials << " trials, seed " << seed << ")\n";
  std::cout << "fractional mechanical frequency std = "
            << fmt6(stats.fractional_freq_std * 100.0) << " %\n";
  std::cout << "mean peak-to-peak cavity detuning = "
            << human_freq(stats.mean_peak_detuning / kTwoPi) << "\n";
  return 0;
}

int cmd_fit_ringdown(const Options& o) {
  Trace trace = load_ringdown_csv(o.fit_input);
  note_input(o.fit_input);
  double omega_m = 0.0;
  if (!o.fit_omega_m.empty()) {
    omega_m =
        parse_flag(o.fit_omega_m, UnitFamily::kFrequency, "--omega-m") *
        kTwoPi;
  }
  FitReport report = fit_ringdown(trace, o.tail_fraction, omega_m);
  return finish_fit(report, o.fit_out);
}

int cmd_fit_omit(const Options& o) {
  Trace trace = load_spectrum_csv(o.fit_input);
  note_input(o.fit_input);
  FitReport report = fit_omit(trace, o.fit_modes);
  return finish_fit(report, o.fit_out);
}

int cmd_fit_power(const Options& o) {
  Trace trace = load_power_csv(o.fit_input);
  note_input(o.fit_input);
  FitReport report = fit_damping_vs_power(trace);
  return finish_fit(report, o.fit_out);
}

int cmd_fit_stress(const Options& o) {
  Trace trace = load_radii_csv(o.fit_input);
  note_input(o.fit_input);
  FitReport report = fit_stress_from_radii(trace, o.density);
  return finish_fit(report, o.fit_out);
}

int cmd_fit_mixture(const Options& o) {
  std::vector<double> samples = load_batch_csv(o.fit_input);
  note_input(o.fit_input);
  MixtureInit init;
  if (o.mix_init_given) {
    init.provided = true;
    init.w = o.mix_w;
    init.mu1 = o.mix_mu1;
    init.sigma1 = o.mix_sigma1;
    init.mu2 = o.mix_mu2;
    init.sigma2 = o.mix_sigma2;
  }
  FitReport report = fit_gaussian_mixture2(samples, init);
  return finish_fit(report, o.fit_out);
}

int cmd_fit_heating(const Options& o) {
  CsvTable table = read_csv(o.fit_input);
  note_input(o.fit_input);
  if (table.header != std::vector<std::string>{"cooperativity", "quanta"}) {
    throw std::invalid_argument(o.fit_input +
                                ": expected columns cooperativity,quanta");
  }
  Trace trace;
  trace.kind = TraceKind::kHeating;
  std::vector<std::vector<double>> rows = table.rows;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (const auto& row : rows) {
    trace.x.push_back(row[0]);
    trace.y.push_back(row[1]);
  }
  trace.validate();
  FitReport report = fit_power_law(trace);
  return finish_fit(report, o.fit_out);
}

int cmd_stats_batch(const Options& o) {
  std::vector<double> samples = load_batch_csv(o.stats_input);
  note_input(o.stats_input);
  BatchStats stats = batch_stats(samples);
  std::cout << "n = " << samples.size() << "\n";
  std::cout << "min = " << fmt6(stats.min) << ", mean = " << fmt6(stats.mean)
            << ", max = " << fmt6(stats.max) << "\n";
  if (!stats.grid.empty()) {
    std::cout << "kde bandwidth = " << fmt6(stats.bandwidth) << "\n";
  }
  if (!o.stats_out.empty()) {
    if (stats.grid.empty()) {
      throw std::invalid_argument(
          "density output needs at least two samples");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < stats.grid.size(); ++i) {
      rows.push_back({stats.grid[i], stats.density[i]});
    }
    write_csv(o.stats_out, {"value", "density"}, rows);
    note_output(o.stats_out);
    write_plot_sidecar(o.stats_out, "batch-density", "value", "value",
                       "linear", "density", "estimated density", "linear",
                       "batch kernel density estimate");
    std::cout << "wrote " << o.stats_out << "\n";
  }
  return 0;
}

const char* const kLengthHelp = " (length; suffixes fm pm nm um mm m, bare = m)";
const char* const kFreqHelp =
    " (cyclic frequency; suffixes Hz kHz MHz GHz, bare = Hz)";
const char* const kPressureHelp =
    " (pressure; suffixes Pa kPa MPa GPa, bare = Pa)";
const char* const kTempHelp =
    " (temperature; suffixes uK mK K, bare = K)";
const char* const kGradientHelp =
    " (gap gradient; suffixes nm/mm nm/m um/mm m/m, bare = nm/mm)";
const char* const kMassHelp =
    " (mass; suffixes fg pg ng ug mg g kg, bare = kg)";
const char* const kInductanceHelp =
    " (inductance; suffixes pH nH uH mH H, bare = H)";
const char* const kCapacitanceHelp =
    " (capacitance; suffixes aF fF pF nF uF F, bare = F)";

}  // namespace

int run_cli(int argc, char** argv) {
  Options o;
  CLI::App app{
      "gapcap: design, simulation, and estimation toolkit for "
      "superconducting vacuum-gap electromechanical circuits"};
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  app.add_option("--project", o.project_path,
                 "Project file with named materials, drums, circuits, "
                 "budget, lattice, and seeds");
  app.add_flag("--verbose", o.verbose,
               "Echo every applied default and its origin");
  bool want_report = false;
  app.add_flag("--report", want_report,
               "Print a run report (command, input digests, outputs, "
               "version, wall time) as JSON");
  CLI::Option* seed_opt =
      app.add_option("--seed", o.seed,
                     "Random seed (overrides GAPCAP_SEED and project seeds)");

  // design
  CLI::App* design = app.add_subcommand("design", "Forward design models");
  design->fallthrough();
  design->require_subcommand(1);
  CLI::App* design_drum =
      design->add_subcommand("drum", "Drumhead mechanics from geometry");
  design_drum->fallthrough();
  design_drum->add_option("--drum", o.drum_name,
                          "Named drum from the project file");
  design_drum->add_option("--radius", o.radius,
                          std::string("Trench radius") + kLengthHelp);
  design_drum->add_option("--top", o.top,
                          std::string("Top plate thickness") + kLengthHelp);
  design_drum->add_option("--bottom", o.bottom,
                          std::string("Bottom plate thickness") + kLengthHelp);
  design_drum->add_option("--depth", o.depth,
                          std::string("Trench depth") + kLengthHelp);
  design_drum->add_option("--clamp-ratio", o.clamp_ratio,
                          "Clamp stress concentration ratio (dimensionless)");
  design_drum->add_option("--hole-radius", o.hole_radius,
                          std::string("Release hole radius") + kLengthHelp);
  design_drum->add_option("--holes", o.hole_count, "Release hole count");
  design_drum->add_option("--stress", o.stress,
                          std::string("Film stress") + kPressureHelp);
  design_drum->add_option("--density", o.density,
                          "Film density (kg/m^3, bare number)");
  design_drum->add_option("--q0", o.q0,
                          "Baseline mechanical quality factor "
                          "(dimensionless, 0 = skip)");
  design_drum->add_option("--dq", o.dq,
                          "Quality factor enhancement ratio (dimensionless)");
  design_drum->add_option("--delta-d", o.delta_d,
                          std::string("Trench edge placement error") +
                              kLengthHelp);
  design_drum->add_option("--temperature", o.temperature,
                          std::string("Bath temperature for force noise") +
                              kTempHelp);
  design_drum->add_option("--yield", o.yield_stress,
                          std::string("Film yield stress") + kPressureHelp);

  CLI::App* design_lc =
      design->add_subcommand("lc", "LC circuit from gap capacitor geometry");
  design_lc->fallthrough();
  design_lc->add_option("--lc", o.lc_name,
                        "Named circuit from the project file");
  design_lc->add_option("--gap", o.gap,
                        std::string("Capacitor vacuum gap") + kLengthHelp);
  design_lc->add_option("--plate-radius", o.plate_radius,
                        std::string("Capacitor plate radius") + kLengthHelp);
  design_lc->add_option("--hole-fill", o.hole_fill,
                        "Fraction of plate area removed by holes "
                        "(dimensionless)");
  design_lc->add_option("--inductance", o.inductance,
                        std::string("Circuit inductance") + kInductanceHelp);
  design_lc->add_option("--stray", o.stray,
                        std::string("Stray capacitance") + kCapacitanceHelp);
  design_lc->add_option("--participation", o.participation,
                        "Fraction of capacitance in the gap (dimensionless)");
  design_lc->add_option("--omega-m", o.omega_m_text,
                        std::string("Mechanical frequency for g0") +
                            kFreqHelp);
  design_lc->add_option("--m-eff", o.m_eff_text,
                        std::string("Effective mass for g0") + kMassHelp);

  // budget
  CLI::App* budget = app.add_subcommand(
      "budget", "Fabrication non-uniformity budget (step table, RSS "
                "combination, solve-for-step headroom)");
  budget->fallthrough();
  budget->add_option("--step", o.budget_steps,
                     std::string("Step as name=epsilon, repeatable") +
                         kGradientHelp);
  budget->add_option("--total", o.budget_total,
                     std::string("Total budget to solve against") +
                         kGradientHelp);
  budget->add_option("--solve", o.budget_solve,
                     "Step name whose headroom to solve for");
  budget->add_option("--span", o.budget_span,
                     std::string("Lateral span") + kLengthHelp);
  budget->add_option("--freq-tolerance", o.budget_freq_tol,
                     std::string("Allowed cavity detuning") + kFreqHelp);
  budget->add_option("--omega-c", o.budget_omega_c,
                     std::string("Cavity frequency for the tolerance limit") +
                         kFreqHelp);
  budget->add_option("--gap", o.budget_gap,
                     std::string("Capacitor gap for the tolerance limit") +
                         kLengthHelp);

  // stress
  CLI::App* stress =
      app.add_subcommand("stress", "Thin-film stress models");
  stress->fallthrough();
  stress->require_subcommand(1);
  CLI::App* stress_thermal = stress->add_subcommand(
      "thermal", "Differential-contraction stress between two temperatures");
  stress_thermal->fallthrough();
  stress_thermal->add_option("--film", o.film,
                             "Film material: aluminum, silicon, or a table "
                             "file path");
  stress_thermal->add_option("--substrate", o.substrate,
                             "Substrate material: aluminum, silicon, or a "
                             "table file path");
  stress_thermal->add_option("--sigma-rt", o.sigma_rt,
                             std::string("Room-temperature film stress") +
                                 kPressureHelp);
  stress_thermal->add_option("--t-low", o.t_low,
                             std::string("Cold end") + kTempHelp);
  stress_thermal->add_option("--t-high", o.t_high,
                             std::string("Warm end") + kTempHelp);
  stress_thermal->add_option("--steps", o.steps,
                             "Trapezoid integration panels (count)");
  CLI::App* stress_stoney = stress->add_subcommand(
      "stoney", "Film stress from wafer curvature change");
  stress_stoney->fallthrough();
  stress_stoney->add_option("--substrate", o.substrate,
                            "Substrate material: aluminum, silicon, or a "
                            "table file path");
  stress_stoney->add_option("--t-sub", o.t_sub,
                            std::string("Substrate thickness") + kLengthHelp);
  stress_stoney->add_option("--t-film", o.t_film,
                            std::string("Film thickness") + kLengthHelp);
  stress_stoney->add_option("--kappa-before", o.kappa_before,
                            "Wafer curvature before deposition (1/m, bare "
                            "number)");
  stress_stoney->add_option("--kappa-after", o.kappa_after,
                            "Wafer curvature after deposition (1/m, bare "
                            "number)");

  // simulate
  CLI::App* simulate =
      app.add_subcommand("simulate", "Synthetic measurement generation");
  simulate->fallthrough();
  simulate->require_subcommand(1);
  CLI::App* sim_ringdown = simulate->add_subcommand(
      "ringdown", "Mechanical energy decay record");
  sim_ringdown->fallthrough();
  sim_ringdown->add_option("--omega-m", o.rd_omega_m,
                           std::string("Mechanical frequency") + kFreqHelp);
  sim_ringdown->add_option("--q", o.rd_q,
                           "Mechanical quality factor (dimensionless)");
  sim_ringdown->add_option("--c-readout", o.rd_c_readout,
                           "Readout cooperativity broadening the decay "
                           "(dimensionless)");
  sim_ringdown->add_option("--decay-constants", o.rd_decay_constants,
                           "Trace length in units of the 1/e time "
                           "(dimensionless)");
  sim_ringdown->add_option("--points", o.rd_points, "Sample count");
  sim_ringdown->add_option("--amplitude", o.rd_amplitude,
                           "Initial energy (arbitrary units, bare number)");
  sim_ringdown->add_option("--noise-floor", o.rd_noise_floor,
                           "Additive noise standard deviation, same units "
                           "as --amplitude (0 = noise-free)");
  sim_ringdown->add_option("--gamma-nl", o.rd_gamma_nl,
                           "Amplitude-dependent extra decay scale (rad/s, "
                           "bare number, 0 = off)");
  sim_ringdown->add_option("--e-sat", o.rd_e_sat,
                           "Saturation energy of the extra decay "
                           "(same units as --amplitude)");
  sim_ringdown->add_option("--nl-threshold", o.rd_threshold,
                           "Energy below which the decay is pure "
                           "exponential (same units as --amplitude)");
  sim_ringdown->add_option("-o,--out", o.rd_out, "Output CSV path");

  CLI::App* sim_omit = simulate->add_subcommand(
      "omit", "Probe transmission spectrum with induced-transparency "
              "windows");
  sim_omit->fallthrough();
  sim_omit->add_option("--omega-c", o.om_omega_c,
                       std::string("Cavity frequency") + kFreqHelp);
  sim_omit->add_option("--kappa", o.om_kappa,
                       std::string("Total cavity linewidth") + kFreqHelp);
  sim_omit->add_option("--kappa-ext", o.om_kappa_ext,
                       std::string("External coupling rate") + kFreqHelp);
  sim_omit->add_option("--n-cav", o.om_n_cav,
                       "Intracavity pump photon number (dimensionless)");
  sim_omit->add_option("--n-th", o.om_n_th,
                       "Thermal bath occupancy (dimensionless)");
  sim_omit->add_option("--mode", o.om_modes,
                       std::string("Mechanical mode as Omega,Gamma,g0, "
                                   "repeatable; each part") +
                           kFreqHelp);
  sim_omit->add_option("--omega-ref", o.om_omega_ref,
                       std::string("Pump reference mode frequency, default "
                                   "first mode") +
                           kFreqHelp);
  sim_omit->add_option("--span", o.om_span,
                       std::string("Full detuning span, default covers all "
                                   "modes plus 3 kappa") +
                           kFreqHelp);
  sim_omit->add_option("--points", o.om_points, "Coarse grid sample count");
  sim_omit->add_option("--window-points", o.om_window_points,
                       "Dense samples per mode window");
  sim_omit->add_option("-o,--out", o.om_out, "Output CSV path");

  CLI::App* sim_lattice = simulate->add_subcommand(
      "lattice", "Eigenmodes of a coupled-circuit chain");
  sim_lattice->fallthrough();
  sim_lattice->add_option("--n-sites", o.lat_n_sites, "Site count");
  sim_lattice->add_option("--omega-site", o.lat_omega_site,
                          std::string("Uniform site frequency") + kFreqHelp);
  sim_lattice->add_option("--j1", o.lat_j1,
                          std::string("First alternating hopping rate") +
                              kFreqHelp);
  sim_lattice->add_option("--j2", o.lat_j2,
                          std::string("Second alternating hopping rate") +
                              kFreqHelp);
  sim_lattice->add_option("--boundary", o.lat_boundary,
                          "Chain boundary: open or periodic");
  sim_lattice->add_option("--stress", o.stress,
                          std::string("Film stress for --mech") +
                              kPressureHelp);
  sim_lattice->add_option("--density", o.density,
                          "Film density for --mech (kg/m^3, bare number)");
  sim_lattice->add_option("-o,--out", o.lat_out, "Mode table CSV path");
  sim_lattice->add_option("--json", o.lat_json, "Full mode set JSON path");
  sim_lattice->add_option("--mech", o.lat_mech,
                          "Per-site mechanical frequency CSV path "
                          "(needs project site drums)");

  CLI::App* sim_disorder = simulate->add_subcommand(
      "disorder", "Monte Carlo fabrication-disorder study");
  sim_disorder->fallthrough();
  sim_disorder->add_option("--n-sites", o.dis_n_sites, "Site count");
  sim_disorder->add_option("--radius", o.dis_radius,
                           std::string("Drum trench radius") + kLengthHelp);
  sim_disorder->add_option("--top", o.top,
                           std::string("Top plate thickness") + kLengthHelp);
  sim_disorder->add_option("--bottom", o.bottom,
                           std::string("Bottom plate thickness") +
                               kLengthHelp);
  sim_disorder->add_option("--depth", o.depth,
                           std::string("Trench depth") + kLengthHelp);
  sim_disorder->add_option("--gap", o.gap,
                           std::string("Capacitor gap") + kLengthHelp);
  sim_disorder->add_option("--plate-radius", o.plate_radius,
                           std::string("Capacitor plate radius, default = "
                                       "drum radius") +
                               kLengthHelp);
  sim_disorder->add_option("--inductance", o.inductance,
                           std::string("Circuit inductance") +
                               kInductanceHelp);
  sim_disorder->add_option("--stray", o.stray,
                           std::string("Stray capacitance") +
                               kCapacitanceHelp);
  sim_disorder->add_option("--omega-site", o.lat_omega_site,
                           std::string("Site frequency") + kFreqHelp);
  sim_disorder->add_option("--j1", o.lat_j1,
                           std::string("First hopping rate") + kFreqHelp);
  sim_disorder->add_option("--j2", o.lat_j2,
                           std::string("Second hopping rate") + kFreqHelp);
  sim_disorder->add_option("--stress", o.stress,
                           std::string("Film stress") + kPressureHelp);
  sim_disorder->add_option("--density", o.density,
                           "Film density (kg/m^3, bare number)");
  sim_disorder->add_option("--sigma-r", o.dis_sigma_r,
                           std::string("Per-site radius scatter, 1 sigma") +
                               kLengthHelp);
  sim_disorder->add_option("--sigma-gradient", o.dis_sigma_gradient,
                           std::string("Wafer gap gradient bound") +
                               kGradientHelp);
  sim_disorder->add_option("--span", o.dis_span,
                           std::string("Chip lateral span") + kLengthHelp);
  sim_disorder->add_option("--trials", o.dis_trials, "Monte Carlo trials");
  sim_disorder->add_option("--out-hist", o.dis_out_hist,
                           "Detuning histogram CSV path");
  sim_disorder->add_option("--out-sites", o.dis_out_sites,
                           "Per-site statistics CSV path");

  // fit
  CLI::App* fit = app.add_subcommand(
      "fit", "Inverse parameter estimation from measurement CSVs");
  fit->fallthrough();
  fit->require_subcommand(1);
  CLI::App* fit_rd = fit->add_subcommand(
      "ringdown", "Decay rate from a time_s,power_linear record");
  fit_rd->fallthrough();
  fit_rd->add_option("csv", o.fit_input, "Input CSV")->required();
  fit_rd->add_option("--tail-fraction", o.tail_fraction,
                     "Trailing fraction of the trace to fit "
                     "(dimensionless)");
  fit_rd->add_option("--omega-m", o.fit_omega_m,
                     std::string("Mechanical frequency to also report Q") +
                         kFreqHelp);
  fit_rd->add_option("-o,--out", o.fit_out, "Fit report JSON path");
  CLI::App* fit_om = fit->add_subcommand(
      "omit", "Cavity and mode parameters from a detuning_hz,mag spectrum");
  fit_om->fallthrough();
  fit_om->add_option("csv", o.fit_input, "Input CSV")->required();
  fit_om->add_option("--modes", o.fit_modes,
                     "Number of transparency windows to fit");
  fit_om->add_option("-o,--out", o.fit_out, "Fit report JSON path");
  CLI::App* fit_pw = fit->add_subcommand(
      "power", "Intrinsic damping from a power_w,gamma_tot_hz sweep");
  fit_pw->fallthrough();
  fit_pw->add_option("csv", o.fit_input, "Input CSV")->required();
  fit_pw->add_option("-o,--out", o.fit_out, "Fit report JSON path");
  CLI::App* fit_st = fit->add_subcommand(
      "stress", "Film stress from a radius_m,freq_hz table");
  fit_st->fallthrough();
  fit_st->add_option("csv", o.fit_input, "Input CSV")->required();
  fit_st->add_option("--density", o.density,
                     "Film density (kg/m^3, bare number)");
  fit_st->add_option("-o,--out", o.fit_out, "Fit report JSON path");
  CLI::App* fit_mx = fit->add_subcommand(
      "mixture", "Two-component Gaussian mixture from a value column");
  fit_mx->fallthrough();
  fit_mx->add_option("csv", o.fit_input, "Input CSV")->required();
  CLI::Option* mix_w_opt = fit_mx->add_option(
      "--w", o.mix_w, "Initial first-component weight (dimensionless)");
  fit_mx->add_option("--mu1", o.mix_mu1,
                     "Initial first mean (sample units, bare number)")
      ->needs(mix_w_opt);
  fit_mx->add_option("--sigma1", o.mix_sigma1,
                     "Initial first std (sample units, bare number)")
      ->needs(mix_w_opt);
  fit_mx->add_option("--mu2", o.mix_mu2,
                     "Initial second mean (sample units, bare number)")
      ->needs(mix_w_opt);
  fit_mx->add_option("--sigma2", o.mix_sigma2,
                     "Initial second std (sample units, bare number)")
      ->needs(mix_w_opt);
  fit_mx->add_option("-o,--out", o.fit_out, "Fit report JSON path");
  CLI::App* fit_ht = fit->add_subcommand(
      "heating", "Power law from a cooperativity,quanta table");
  fit_ht->fallthrough();
  fit_ht->add_option("csv", o.fit_input, "Input CSV")->required();
  fit_ht->add_option("-o,--out", o.fit_out, "Fit report JSON path");

  // stats
  CLI::App* stats =
      app.add_subcommand("stats", "Batch statistics and densities");
  stats->fallthrough();
  stats->require_subcommand(1);
  CLI::App* stats_batch = stats->add_subcommand(
      "batch", "Summary and kernel density of a value column");
  stats_batch->fallthrough();
  stats_batch->add_option("csv", o.stats_input, "Input CSV")->required();
  stats_batch->add_option("-o,--out", o.stats_out, "Density CSV path");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  g_ctx.report = want_report;
  o.mix_init_given = fit_mx->count("--w") > 0 &&
                     fit_mx->count("--mu1") > 0 &&
                     fit_mx->count("--sigma1") > 0 &&
                     fit_mx->count("--mu2") > 0 &&
                     fit_mx->count("--sigma2") > 0;

  std::optional<ProjectConfig> project;
  if (!o.project_path.empty()) {
    project = load_project(o.project_path,
                           o.verbose ? &std::cout : nullptr);
    note_input(o.project_path);
  }
  bool seed_given = seed_opt->count() > 0;

  int code = 0;
  if (design_drum->parsed()) {
    code = cmd_design_drum(o, design_drum, project);
  } else if (design_lc->parsed()) {
    code = cmd_design_lc(o, design_lc, project);
  } else if (budget->parsed()) {
    code = cmd_budget(o, budget, project);
  } else if (stress_thermal->parsed()) {
    code = cmd_stress_thermal(o);
  } else if (stress_stoney->parsed()) {
    code = cmd_stress_stoney(o);
  } else if (sim_ringdown->parsed()) {
    code = cmd_simulate_ringdown(o, seed_given, project);
  } else if (sim_omit->parsed()) {
    code = cmd_simulate_omit(o);
  } else if (sim_lattice->parsed()) {
    code = cmd_simulate_lattice(o, project);
  } else if (sim_disorder->parsed()) {
    code = cmd_simulate_disorder(o, sim_disorder, seed_given, project);
  } else if (fit_rd->parsed()) {
    code = cmd_fit_ringdown(o);
  } else if (fit_om->parsed()) {
    code = cmd_fit_omit(o);
  } else if (fit_pw->parsed()) {
    code = cmd_fit_power(o);
  } else if (fit_st->parsed()) {
    code = cmd_fit_stress(o);
  } else if (fit_mx->parsed()) {
    code = cmd_fit_mixture(o);
  } else if (fit_ht->parsed()) {
    code = cmd_fit_heating(o);
  } else if (stats_batch->parsed()) {
    code = cmd_stats_batch(o);
  }

  if (code == 0 && g_ctx.report) {
    emit_run_report();
  }
  return code;
}

int main(int argc, char** argv) {
  g_ctx.start = std::chrono::steady_clock::now();
  std::ostringstream cmd;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) cmd << " ";
    cmd << argv[i];
  }
  g_ctx.command_line = cmd.str();

  try {
    return run_cli(argc, argv);
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
