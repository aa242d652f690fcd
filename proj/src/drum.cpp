#include "gapcap/drum.hpp"

#include <cmath>
#include <stdexcept>

#include "gapcap/constants.hpp"

namespace gapcap {

void DrumGeometry::validate() const {
  if (!(trench_radius > 0.0)) {
    throw std::invalid_argument("trench radius must be positive");
  }
  if (!(top_thickness > 0.0)) {
    throw std::invalid_argument("top plate thickness must be positive");
  }
  if (!(bottom_thickness >= 0.0)) {
    throw std::invalid_argument("bottom plate thickness must be nonnegative");
  }
  if (!(trench_depth > bottom_thickness)) {
    throw std::invalid_argument(
        "trench depth must exceed bottom plate thickness to leave a gap");
  }
  if (!(clamp_ratio >= 1.0)) {
    throw std::invalid_argument("clamp ratio must be at least 1");
  }
  if (hole_count < 0 || hole_radius < 0.0) {
    throw std::invalid_argument("perforation parameters must be nonnegative");
  }
  double hole_area = hole_count * kPi * hole_radius * hole_radius;
  if (!(hole_area < kPi * trench_radius * trench_radius)) {
    throw std::invalid_argument("perforation removes the whole plate");
  }
}

double DrumGeometry::plate_area() const {
  double full = kPi * trench_radius * trench_radius;
  double holes = hole_count * kPi * hole_radius * hole_radius;
  return full - holes;
}

void MechanicalMode::validate() const {
  if (!(omega_m > 0.0)) {
    throw std::invalid_argument("mechanical frequency must be positive");
  }
  if (gamma_m < 0.0) {
    throw std::invalid_argument("mechanical damping must be nonnegative");
  }
  if (gamma_m > 0.0) {
    double q = omega_m / gamma_m;
    if (std::abs(q - q_m) > 1e-9 * q) {
      throw std::invalid_argument("Q_m must equal omega_m/gamma_m");
    }
  }
}

MechanicalMode MechanicalMode::from_q(double omega_m, double q_m,
                                      double m_eff) {
  if (!(omega_m > 0.0) || !(q_m > 0.0)) {
    throw std::invalid_argument("from_q needs positive frequency and Q");
  }
  MechanicalMode mode;
  mode.omega_m = omega_m;
  mode.q_m = q_m;
  mode.gamma_m = omega_m / q_m;
  mode.m_eff = m_eff;
  return mode;
}

double bessel_j0(double x) {
  if (std::abs(x) >= 8.0) {
    throw std::domain_error("J0 power series restricted to |x| < 8");
  }
  // J0(x) = sum_k (-1)^k (x/2)^{2k} / (k!)^2, term recurrence in q = (x/2)^2.
  double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j1(double x) {
  if (std::abs(x) >= 8.0) {
    throw std::domain_error("J1 power series restricted to |x| < 8");
  }
  double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k <= 60; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  // J0 changes sign once in [2, 3]; bisection to ~1e-14.
  static const double zero = [] {
    double lo = 2.0;
    double hi = 3.0;
    double f_lo = bessel_j0(lo);
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      double f_mid = bessel_j0(mid);
      if (f_mid == 0.0) return mid;
      if ((f_lo > 0.0) == (f_mid > 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
  }();
  return zero;
}

double mode_mass_fraction() {
  static const double fraction = [] {
    double j1 = bessel_j1(bessel_j0_first_zero());
    return j1 * j1;
  }();
  return fraction;
}

double fundamental_frequency(const DrumGeometry& geom, double stress_pa,
                             double density) {
  geom.validate();
  if (!(stress_pa > 0.0)) {
    throw std::domain_error("membrane model requires tensile stress");
  }
  if (!(density > 0.0)) {
    throw std::domain_error("density must be positive");
  }
  return bessel_j0_first_zero() / geom.trench_radius *
         std::sqrt(stress_pa / density);
}

double quality_factor(double q0, double dq) {
  if (!(q0 > 0.0) || !(dq > 0.0)) {
    throw std::invalid_argument("quality factor inputs must be positive");
  }
  return q0 * dq;
}

ClampStressResult clamp_stress(double film_stress_pa, double clamp_ratio,
                               double yield_stress_pa) {
  if (!(clamp_ratio >= 1.0)) {
    throw std::invalid_argument("clamp ratio must be at least 1");
  }
  ClampStressResult result;
  result.local_stress = film_stress_pa * clamp_ratio;
  result.survives = result.local_stress < yield_stress_pa;
  return result;
}

double lithography_disorder(double trench_radius, double delta_d) {
  if (!(trench_radius > 0.0)) {
    throw std::invalid_argument("trench radius must be positive");
  }
  if (delta_d < 0.0) {
    throw std::invalid_argument("placement error must be nonnegative");
  }
  return delta_d / trench_radius;
}

double effective_mass(const DrumGeometry& geom, double density,
                      double c_mode) {
  geom.validate();
  if (!(density > 0.0)) {
    throw std::invalid_argument("density must be positive");
  }
  double fraction = c_mode < 0.0 ? mode_mass_fraction() : c_mode;
  return fraction * density * geom.top_thickness * geom.plate_area();
}

}  // namespace gapcap
