#pragma once

namespace gapcap {

// Suspended circular plate over a trench-defined vacuum gap.
struct DrumGeometry {
  double trench_radius = 0.0;     // m
  double top_thickness = 0.0;     // m
  double bottom_thickness = 0.0;  // m
  double trench_depth = 0.0;      // m
  double clamp_ratio = 1.0;       // trench perimeter / clamp perimeter
  double hole_radius = 0.0;       // m
  int hole_count = 0;

  void validate() const;
  // The vacuum gap is what the trench leaves above the bottom plate.
  double gap() const { return trench_depth - bottom_thickness; }
  double plate_area() const;  // net membrane area after perforation, m^2
};

// One mechanical mode of a drum.
struct MechanicalMode {
  double omega_m = 0.0;  // rad/s
  double gamma_m = 0.0;  // rad/s
  double q_m = 0.0;      // dimensionless
  double m_eff = 0.0;    // kg

  void validate() const;
  static MechanicalMode from_q(double omega_m, double q_m, double m_eff);
};

// Zeroth/first-order Bessel functions of the first kind, power series,
// valid for |x| < 8.
double bessel_j0(double x);
double bessel_j1(double x);

// First zero of J0, found by bisection in [2, 3] on first use.
double bessel_j0_first_zero();

// Fraction of the plate mass that moves in the fundamental membrane mode,
// J1(alpha01)^2. Overridable in effective_mass.
double mode_mass_fraction();

// Omega_m = (alpha01 / R) sqrt(sigma / rho) for a fully clamped membrane.
double fundamental_frequency(const DrumGeometry& geom, double stress_pa,
                             double density);

// Q_m = Q0 * DQ.
double quality_factor(double q0, double dq);

// Stress concentration at the clamps.
struct ClampStressResult {
  double local_stress = 0.0;  // Pa
  bool survives = false;
};
inline constexpr double kDefaultYieldStressPa = 1.0e9;
ClampStressResult clamp_stress(double film_stress_pa, double clamp_ratio,
                               double yield_stress_pa = kDefaultYieldStressPa);

// Fractional mechanical frequency disorder from trench-edge placement error.
double lithography_disorder(double trench_radius, double delta_d);

// m_eff = c_mode * rho * t_top * net plate area.
double effective_mass(const DrumGeometry& geom, double density,
                      double c_mode = -1.0);  // negative = use mode fraction

}  // namespace gapcap
