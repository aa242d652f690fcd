#include "gapcap/project.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "gapcap/constants.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw std::invalid_argument(field + ": " + message);
}

void reject_unknown_keys(const json& object, const std::string& field,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(field, "unknown key '" + item.key() + "'");
    }
  }
}

double quantity_field(const json& object, const std::string& key,
                      UnitFamily family, const std::string& field) {
  const json& value = object.at(key);
  if (value.is_number()) {
    return value.get<double>();
  }
  if (value.is_string()) {
    return parse_unit(value.get<std::string>(), family, field);
  }
  fail(field, "expected a number or a unit-suffixed string");
}

double quantity_or_default(const json& object, const std::string& key,
                           UnitFamily family, const std::string& field,
                           double fallback, const char* origin,
                           std::ostream* echo) {
  if (object.contains(key)) {
    return quantity_field(object, key, family, field);
  }
  if (echo) {
    *echo << field << ": default " << fallback << " (" << origin << ")\n";
  }
  return fallback;
}

Material parse_material(const json& object, const std::string& name,
                        const std::string& field) {
  reject_unknown_keys(object, field, {"rho", "nu", "table"});
  for (const char* key : {"rho", "nu", "table"}) {
    if (!object.contains(key)) {
      fail(field, std::string("missing key '") + key + "'");
    }
  }
  Material m;
  m.name = name;
  if (!object["rho"].is_number()) fail(field + ".rho", "expected a number");
  if (!object["nu"].is_number()) fail(field + ".nu", "expected a number");
  m.density = object["rho"].get<double>();
  m.poisson_ratio = object["nu"].get<double>();
  const json& table = object["table"];
  if (!table.is_array() || table.size() < 2) {
    fail(field + ".table", "expected at least two [T_K, Y_Pa, alpha_perK] rows");
  }
  std::vector<double> temps, moduli, alphas;
  for (const auto& row : table) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
        !row[1].is_number() || !row[2].is_number()) {
      fail(field + ".table", "rows must be [T_K, Y_Pa, alpha_perK] numbers");
    }
    temps.push_back(row[0].get<double>());
    moduli.push_back(row[1].get<double>());
    alphas.push_back(row[2].get<double>());
  }
  try {
    m.youngs_modulus = PiecewiseCurve(temps, moduli, name + " Young's modulus");
    m.thermal_expansion =
        PiecewiseCurve(temps, alphas, name + " thermal expansion");
    m.validate();
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  return m;
}

DrumGeometry parse_drum(const json& object, const std::string& field,
                        std::ostream* echo) {
  reject_unknown_keys(object, field,
                      {"trench_radius", "top_thickness", "bottom_thickness",
                       "trench_depth", "clamp_ratio", "hole_radius",
                       "hole_count"});
  if (!object.contains("trench_radius")) {
    fail(field, "missing key 'trench_radius'");
  }
  DrumGeometry drum;
  drum.trench_radius = quantity_field(object, "trench_radius",
                                      UnitFamily::kLength,
                                      field + ".trench_radius");
  drum.top_thickness =
      quantity_or_default(object, "top_thickness", UnitFamily::kLength,
                          field + ".top_thickness", 200e-9,
                          "calibrated device-class value", echo);
  drum.bottom_thickness =
      quantity_or_default(object, "bottom_thickness", UnitFamily::kLength,
                          field + ".bottom_thickness", 150e-9,
                          "calibrated device-class value", echo);
  drum.trench_depth =
      quantity_or_default(object, "trench_depth", UnitFamily::kLength,
                          field + ".trench_depth", 300e-9,
                          "calibrated device-class value", echo);
  drum.clamp_ratio = quantity_or_default(object, "clamp_ratio",
                                         UnitFamily::kNone,
                                         field + ".clamp_ratio", 1.0,
                                         "no tapering", echo);
  drum.hole_radius =
      quantity_or_default(object, "hole_radius", UnitFamily::kLength,
                          field + ".hole_radius", 0.0, "no perforation", echo);
  if (object.contains("hole_count")) {
    if (!object["hole_count"].is_number_integer()) {
      fail(field + ".hole_count", "expected an integer");
    }
    drum.hole_count = object["hole_count"].get<int>();
  } else if (echo) {
    *echo << field << ".hole_count: default 0 (no perforation)\n";
  }
  try {
    drum.validate();
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  return drum;
}

LcDesign parse_lc(const json& object, const std::string& field,
                  std::ostream* echo) {
  reject_unknown_keys(object, field,
                      {"gap", "plate_radius", "hole_fill", "inductance",
                       "stray_capacitance", "participation"});
  if (!object.contains("plate_radius")) {
    fail(field, "missing key 'plate_radius'");
  }
  LcDesign lc;
  lc.plate_radius = quantity_field(object, "plate_radius", UnitFamily::kLength,
                                   field + ".plate_radius");
  lc.gap = quantity_or_default(object, "gap", UnitFamily::kLength,
                               field + ".gap", 150e-9,
                               "calibrated device-class value", echo);
  lc.hole_fill =
      quantity_or_default(object, "hole_fill", UnitFamily::kNone,
                          field + ".hole_fill", 0.0, "no perforation", echo);
  lc.inductance = quantity_or_default(object, "inductance",
                                      UnitFamily::kInductance,
                                      field + ".inductance", 10e-9,
                                      "calibrated device-class value", echo);
  lc.stray_capacitance =
      quantity_or_default(object, "stray_capacitance",
                          UnitFamily::kCapacitance,
                          field + ".stray_capacitance", 0.0,
                          "gap capacitance only", echo);
  lc.participation =
      quantity_or_default(object, "participation", UnitFamily::kNone,
                          field + ".participation", 1.0,
                          "galvanically connected capacitor", echo);
  try {
    lc.validate();
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  return lc;
}

ToleranceBudget parse_budget(const json& object, const std::string& field) {
  reject_unknown_keys(object, field,
                      {"steps", "lateral_span", "freq_tolerance"});
  for (const char* key : {"steps", "lateral_span", "freq_tolerance"}) {
    if (!object.contains(key)) {
      fail(field, std::string("missing key '") + key + "'");
    }
  }
  ToleranceBudget budget;
  const json& steps = object["steps"];
  if (!steps.is_array()) fail(field + ".steps", "expected an array");
  int index = 0;
  for (const auto& entry : steps) {
    std::string step_field =
        field + ".steps[" + std::to_string(index++) + "]";
    if (!entry.is_object()) fail(step_field, "expected an object");
    reject_unknown_keys(entry, step_field, {"name", "epsilon"});
    if (!entry.contains("name") || !entry["name"].is_string()) {
      fail(step_field, "missing string key 'name'");
    }
    if (!entry.contains("epsilon")) {
      fail(step_field, "missing key 'epsilon'");
    }
    BudgetStep step;
    step.name = entry["name"].get<std::string>();
    step.epsilon = quantity_field(entry, "epsilon", UnitFamily::kGradient,
                                  step_field + ".epsilon");
    budget.steps.push_back(step);
  }
  budget.lateral_span = quantity_field(object, "lateral_span",
                                       UnitFamily::kLength,
                                       field + ".lateral_span");
  double tol_hz = quantity_field(object, "freq_tolerance",
                                 UnitFamily::kFrequency,
                                 field + ".freq_tolerance");
  budget.freq_tolerance = tol_hz * kTwoPi;
  try {
    budget.validate();
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  return budget;
}

ProjectLattice parse_lattice(const json& object, const std::string& field,
                             std::ostream* echo) {
  reject_unknown_keys(object, field,
                      {"n_sites", "omega_site", "j1", "j2", "boundary",
                       "drums"});
  if (!object.contains("n_sites") || !object["n_sites"].is_number_integer()) {
    fail(field, "missing integer key 'n_sites'");
  }
  ProjectLattice lattice;
  lattice.n_sites = object["n_sites"].get<int>();
  lattice.omega_site_hz =
      quantity_or_default(object, "omega_site", UnitFamily::kFrequency,
                          field + ".omega_site", 6.0e9,
                          "calibrated mid-band value", echo);
  lattice.j1_hz = quantity_or_default(object, "j1", UnitFamily::kFrequency,
                                      field + ".j1", 100.0e6,
                                      "calibrated placeholder", echo);
  lattice.j2_hz = quantity_or_default(object, "j2", UnitFamily::kFrequency,
                                      field + ".j2", 200.0e6,
                                      "calibrated placeholder", echo);
  if (object.contains("boundary")) {
    if (!object["boundary"].is_string()) {
      fail(field + ".boundary", "expected 'open' or 'periodic'");
    }
    lattice.boundary = object["boundary"].get<std::string>();
    if (lattice.boundary != "open" && lattice.boundary != "periodic") {
      fail(field + ".boundary", "expected 'open' or 'periodic'");
    }
  } else if (echo) {
    *echo << field << ".boundary: default open (finite chain)\n";
  }
  if (object.contains("drums")) {
    if (!object["drums"].is_array()) {
      fail(field + ".drums", "expected an array of drum names");
    }
    for (const auto& name : object["drums"]) {
      if (!name.is_string()) {
        fail(field + ".drums", "expected an array of drum names");
      }
      lattice.drum_names.push_back(name.get<std::string>());
    }
  }
  return lattice;
}

}  // namespace

ProjectConfig load_project(const std::string& path, std::ostream* echo) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open project file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << path << ":" << line << ":" << column << ": " << e.what();
    throw std::invalid_argument(msg.str());
  }
  if (!root.is_object()) {
    throw std::invalid_argument(path + ": project root must be an object");
  }
  reject_unknown_keys(root, path,
                      {"materials", "drums", "lc", "budget", "lattice",
                       "seeds"});

  ProjectConfig config;
  if (root.contains("materials")) {
    const json& materials = root["materials"];
    if (!materials.is_object()) {
      fail("materials", "expected an object of named materials");
    }
    for (const auto& item : materials.items()) {
      config.materials[item.key()] =
          parse_material(item.value(), item.key(), "materials." + item.key());
    }
  }
  if (root.contains("drums")) {
    const json& drums = root["drums"];
    if (!drums.is_object()) {
      fail("drums", "expected an object of named drums");
    }
    for (const auto& item : drums.items()) {
      config.drums[item.key()] =
          parse_drum(item.value(), "drums." + item.key(), echo);
    }
  }
  if (root.contains("lc")) {
    const json& lc = root["lc"];
    if (!lc.is_object()) {
      fail("lc", "expected an object of named circuits");
    }
    for (const auto& item : lc.items()) {
      config.lc[item.key()] =
          parse_lc(item.value(), "lc." + item.key(), echo);
    }
  }
  if (root.contains("budget")) {
    config.budget = parse_budget(root["budget"], "budget");
  }
  if (root.contains("lattice")) {
    config.lattice = parse_lattice(root["lattice"], "lattice", echo);
    for (const std::string& name : config.lattice->drum_names) {
      if (config.drums.find(name) == config.drums.end()) {
        fail("lattice.drums", "dangling reference to drum '" + name + "'");
      }
    }
    if (!config.lattice->drum_names.empty() &&
        config.lattice->drum_names.size() !=
            static_cast<std::size_t>(config.lattice->n_sites)) {
      fail("lattice.drums", "drum list length must equal n_sites");
    }
  }
  if (root.contains("seeds")) {
    const json& seeds = root["seeds"];
    if (!seeds.is_object()) {
      fail("seeds", "expected an object of named integer seeds");
    }
    for (const auto& item : seeds.items()) {
      if (!item.value().is_number_integer() ||
          item.value().get<long long>() < 0) {
        fail("seeds." + item.key(), "expected a nonnegative integer");
      }
      config.seeds[item.key()] = item.value().get<std::uint64_t>();
    }
  }
  return config;
}

std::string serialize_project(const ProjectConfig& config) {
  json root = json::object();
  if (!config.materials.empty()) {
    json materials = json::object();
    for (const auto& [name, m] : config.materials) {
      json table = json::array();
      const auto& temps = m.youngs_modulus.temperatures();
      const auto& moduli = m.youngs_modulus.values();
      const auto& alphas = m.thermal_expansion.values();
      for (std::size_t i = 0; i < temps.size(); ++i) {
        table.push_back({temps[i], moduli[i], alphas[i]});
      }
      materials[name] = {{"rho", m.density},
                         {"nu", m.poisson_ratio},
                         {"table", table}};
    }
    root["materials"] = materials;
  }
  if (!config.drums.empty()) {
    json drums = json::object();
    for (const auto& [name, d] : config.drums) {
      drums[name] = {{"trench_radius", d.trench_radius},
                     {"top_thickness", d.top_thickness},
                     {"bottom_thickness", d.bottom_thickness},
                     {"trench_depth", d.trench_depth},
                     {"clamp_ratio", d.clamp_ratio},
                     {"hole_radius", d.hole_radius},
                     {"hole_count", d.hole_count}};
    }
    root["drums"] = drums;
  }
  if (!config.lc.empty()) {
    json lc = json::object();
    for (const auto& [name, c] : config.lc) {
      lc[name] = {{"gap", c.gap},
                  {"plate_radius", c.plate_radius},
                  {"hole_fill", c.hole_fill},
                  {"inductance", c.inductance},
                  {"stray_capacitance", c.stray_capacitance},
                  {"participation", c.participation}};
    }
    root["lc"] = lc;
  }
  if (config.budget) {
    json steps = json::array();
    for (const auto& step : config.budget->steps) {
      steps.push_back({{"name", step.name}, {"epsilon", step.epsilon}});
    }
    root["budget"] = {{"steps", steps},
                      {"lateral_span", config.budget->lateral_span},
                      {"freq_tolerance",
                       config.budget->freq_tolerance / kTwoPi}};
  }
  if (config.lattice) {
    json lattice = {{"n_sites", config.lattice->n_sites},
                    {"omega_site", config.lattice->omega_site_hz},
                    {"j1", config.lattice->j1_hz},
                    {"j2", config.lattice->j2_hz},
                    {"boundary", config.lattice->boundary}};
    if (!config.lattice->drum_names.empty()) {
      lattice["drums"] = config.lattice->drum_names;
    }
    root["lattice"] = lattice;
  }
  if (!config.seeds.empty()) {
    json seeds = json::object();
    for (const auto& [name, seed] : config.seeds) {
      seeds[name] = seed;
    }
    root["seeds"] = seeds;
  }
  return root.dump(2) + "\n";
}

void save_project(const ProjectConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write project file: " + path);
  }
  out << serialize_project(config);
}

LatticeSpec to_lattice_spec(const ProjectConfig& config) {
  if (!config.lattice) {
    throw std::invalid_argument("project has no lattice section");
  }
  const ProjectLattice& pl = *config.lattice;
  LatticeSpec spec = LatticeSpec::uniform(
      pl.n_sites, pl.omega_site_hz * kTwoPi, pl.j1_hz * kTwoPi,
      pl.j2_hz * kTwoPi,
      pl.boundary == "periodic" ? Boundary::kPeriodic : Boundary::kOpen);
  for (const std::string& name : pl.drum_names) {
    auto it = config.drums.find(name);
    if (it == config.drums.end()) {
      throw std::invalid_argument("dangling reference to drum '" + name +
                                  "'");
    }
    spec.site_drums.push_back(it->second);
  }
  spec.validate();
  return spec;
}

std::uint64_t project_seed(const ProjectConfig& config,
                           const std::string& name, std::uint64_t fallback) {
  auto it = config.seeds.find(name);
  if (it != config.seeds.end()) return it->second;
  it = config.seeds.find("default");
  if (it != config.seeds.end()) return it->second;
  return fallback;
}

}  // namespace gapcap
