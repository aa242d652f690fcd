#pragma once

#include <string>

#include "gapcap/curve.hpp"

namespace gapcap {

// Temperature-dependent elastic and thermal data for one solid.
struct Material {
  std::string name;
  double density = 0.0;        // kg/m^3
  double poisson_ratio = 0.0;  // dimensionless
  PiecewiseCurve youngs_modulus;     // Pa vs K
  PiecewiseCurve thermal_expansion;  // 1/K vs K

  // Requires density > 0, nu in (-1, 0.5), both curves covering [0.01, 300] K.
  void validate() const;

  // Biaxial modulus Y/(1-nu) at the given temperature.
  double biaxial_modulus(double temperature_k) const;
};

// How a film stress number came to be known.
enum class StressProvenance { kMeasured, kStoney, kThermalModel };

const char* to_string(StressProvenance provenance);

// In-plane film stress, tensile positive, with its origin attached.
struct FilmStressState {
  double sigma_rt = 0.0;    // Pa, room-temperature stress
  double sigma_cryo = 0.0;  // Pa, stress at the cold end of the model
  StressProvenance provenance = StressProvenance::kMeasured;
};

// Substrate/film stack plus the bow measurement around deposition.
struct WaferGeometry {
  double substrate_thickness = 0.0;  // m
  double curvature_before = 0.0;     // 1/m
  double curvature_after = 0.0;      // 1/m
  double film_thickness = 0.0;       // m
  void validate() const;             // requires 0 < t_film < t_sub/100
};

// Room-temperature reference for deposition-state stress and Stoney.
inline constexpr double kRoomTemperatureK = 293.0;

// sigma_cryo = sigma_rt + integral_{T_low}^{T_high} Y_film (alpha_film -
// alpha_sub) dT, trapezoid rule on n_steps uniform panels.
FilmStressState thermal_stress(const Material& film, const Material& substrate,
                               double sigma_rt_pa, double t_low_k,
                               double t_high_k, int n_steps = 1024);

// Stoney relation: sigma = -Y_sub(293 K)/(6(1-nu_sub)) * t_sub^2/t_film *
// (kappa_after - kappa_before).
FilmStressState stoney_stress(const Material& substrate,
                              const WaferGeometry& wafer);

// Built-in tables. Every row is a calibrated default, user-overridable.
Material default_aluminum();
Material default_silicon();

// Plain-text material table exchange.
//   # material <name> rho=<kg/m^3> nu=<ratio>
//   <T_K> <Y_Pa> <alpha_perK>
Material load_material_table(const std::string& path);
void save_material_table(const Material& material, const std::string& path);

}  // namespace gapcap
