#include "gapcap/materials.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gapcap {

void Material::validate() const {
  if (!(density > 0.0)) {
    throw std::invalid_argument("material density must be positive");
  }
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
    throw std::invalid_argument("Poisson ratio must lie in (-1, 0.5)");
  }
  if (!youngs_modulus.covers(0.01, 300.0) ||
      !thermal_expansion.covers(0.01, 300.0)) {
    throw std::invalid_argument("material '" + name +
                                "' curves must cover [0.01, 300] K");
  }
}

double Material::biaxial_modulus(double temperature_k) const {
  return youngs_modulus(temperature_k) / (1.0 - poisson_ratio);
}

const char* to_string(StressProvenance provenance) {
  switch (provenance) {
    case StressProvenance::kMeasured:
      return "measured";
    case StressProvenance::kStoney:
      return "stoney";
    case StressProvenance::kThermalModel:
      return "thermal-model";
  }
  return "unknown";
}

void WaferGeometry::validate() const {
  if (!(substrate_thickness > 0.0)) {
    throw std::invalid_argument("substrate thickness must be positive");
  }
  if (!(film_thickness > 0.0)) {
    throw std::domain_error("film thickness must be positive");
  }
  if (!(film_thickness < substrate_thickness / 100.0)) {
    throw std::invalid_argument(
        "film must be thin: t_film < t_sub/100 for the curvature relation");
  }
}

FilmStressState thermal_stress(const Material& film, const Material& substrate,
                               double sigma_rt_pa, double t_low_k,
                               double t_high_k, int n_steps) {
  if (n_steps < 2) {
    throw std::invalid_argument("thermal stress integral needs n_steps >= 2");
  }
  if (!(t_low_k < t_high_k)) {
    throw std::invalid_argument("thermal stress needs T_low < T_high");
  }
  if (!film.youngs_modulus.covers(t_low_k, t_high_k) ||
      !film.thermal_expansion.covers(t_low_k, t_high_k) ||
      !substrate.thermal_expansion.covers(t_low_k, t_high_k)) {
    std::ostringstream msg;
    msg << "material curves do not cover [" << t_low_k << ", " << t_high_k
        << "] K";
    throw std::out_of_range(msg.str());
  }
  auto mismatch = [&](double t) {
    return film.youngs_modulus(t) *
           (film.thermal_expansion(t) - substrate.thermal_expansion(t));
  };
  double h = (t_high_k - t_low_k) / n_steps;
  double sum = 0.5 * (mismatch(t_low_k) + mismatch(t_high_k));
  for (int i = 1; i < n_steps; ++i) {
    sum += mismatch(t_low_k + h * i);
  }
  FilmStressState state;
  state.sigma_rt = sigma_rt_pa;
  state.sigma_cryo = sigma_rt_pa + sum * h;
  state.provenance = StressProvenance::kThermalModel;
  return state;
}

FilmStressState stoney_stress(const Material& substrate,
                              const WaferGeometry& wafer) {
  wafer.validate();
  double d_kappa = wafer.curvature_after - wafer.curvature_before;
  double prefactor = substrate.biaxial_modulus(kRoomTemperatureK) / 6.0;
  double stress = -prefactor *
                  (wafer.substrate_thickness * wafer.substrate_thickness /
                   wafer.film_thickness) *
                  d_kappa;
  FilmStressState state;
  state.sigma_rt = stress;
  state.sigma_cryo = stress;
  state.provenance = StressProvenance::kStoney;
  return state;
}

namespace {

PiecewiseCurve make_curve(std::string name, std::vector<double> t,
                          std::vector<double> v) {
  return PiecewiseCurve(std::move(t), std::move(v), std::move(name));
}

const std::vector<double> kDefaultGridK = {0.01, 20.0, 77.0, 150.0, 293.0,
                                           300.0};

}  // namespace

Material default_aluminum() {
  Material m;
  m.name = "aluminum";
  m.density = 2700.0;
  m.poisson_ratio = 0.33;
  m.youngs_modulus =
      make_curve("aluminum Young's modulus", kDefaultGridK,
                 {51.0e9, 51.0e9, 50.8e9, 50.4e9, 49.8e9, 49.8e9});
  m.thermal_expansion =
      make_curve("aluminum thermal expansion", kDefaultGridK,
                 {0.0, 23.1e-6, 23.1e-6, 23.1e-6, 23.1e-6, 23.1e-6});
  return m;
}

Material default_silicon() {
  Material m;
  m.name = "silicon";
  m.density = 2329.0;
  m.poisson_ratio = 0.28;
  m.youngs_modulus =
      make_curve("silicon Young's modulus", kDefaultGridK,
                 {131.0e9, 131.0e9, 130.8e9, 130.4e9, 130.0e9, 130.0e9});
  m.thermal_expansion =
      make_curve("silicon thermal expansion", kDefaultGridK,
                 {0.0, 2.6e-6, 2.6e-6, 2.6e-6, 2.6e-6, 2.6e-6});
  return m;
}

Material load_material_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open material table: " + path);
  }
  Material m;
  bool header_seen = false;
  std::vector<double> temps;
  std::vector<double> moduli;
  std::vector<double> alphas;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      std::istringstream hs(line.substr(start + 1));
      std::string word;
      hs >> word;
      if (word != "material") continue;
      hs >> m.name;
      bool have_rho = false;
      bool have_nu = false;
      while (hs >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        std::string key = word.substr(0, eq);
        double value = std::stod(word.substr(eq + 1));
        if (key == "rho") {
          m.density = value;
          have_rho = true;
        } else if (key == "nu") {
          m.poisson_ratio = value;
          have_nu = true;
        }
      }
      if (m.name.empty() || !have_rho || !have_nu) {
        throw std::invalid_argument(path +
                                    ": material header needs name, rho=, nu=");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line.substr(start));
    double t = 0.0, y = 0.0, alpha = 0.0;
    if (!(row >> t >> y >> alpha)) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 'T_K Y_Pa alpha_perK' row");
    }
    temps.push_back(t);
    moduli.push_back(y);
    alphas.push_back(alpha);
  }
  if (!header_seen) {
    throw std::invalid_argument(path + ": missing '# material ...' header");
  }
  if (temps.size() < 2) {
    throw std::invalid_argument(path + ": need at least two table rows");
  }
  m.youngs_modulus = PiecewiseCurve(temps, moduli, m.name + " Young's modulus");
  m.thermal_expansion =
      PiecewiseCurve(temps, alphas, m.name + " thermal expansion");
  return m;
}

void save_material_table(const Material& material, const std::string& path) {
  const auto& t_y = material.youngs_modulus.temperatures();
  const auto& t_a = material.thermal_expansion.temperatures();
  if (t_y != t_a) {
    throw std::invalid_argument(
        "material table export needs matching temperature grids");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write material table: " + path);
  }
  out << std::setprecision(17);
  out << "# material " << material.name << " rho=" << material.density
      << " nu=" << material.poisson_ratio << "\n";
  out << "# T_K Y_Pa alpha_perK\n";
  const auto& y = material.youngs_modulus.values();
  const auto& a = material.thermal_expansion.values();
  for (std::size_t i = 0; i < t_y.size(); ++i) {
    out << t_y[i] << " " << y[i] << " " << a[i] << "\n";
  }
}

}  // namespace gapcap
