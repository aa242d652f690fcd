#pragma once

#include <string>
#include <vector>

#include "gapcap/drum.hpp"

namespace gapcap {

// Vacuum-gap capacitor in parallel with stray capacitance, plus an inductor.
struct LcDesign {
  double gap = 0.0;                // m
  double plate_radius = 0.0;       // m
  double hole_fill = 0.0;          // fraction of plate area removed
  double inductance = 0.0;         // H
  double stray_capacitance = 0.0;  // F
  double participation = 1.0;      // fraction of capacitance in the gap

  void validate() const;
};

// One process step's lateral gap-uniformity contribution.
struct BudgetStep {
  std::string name;
  double epsilon = 0.0;  // m/m (gap variation per lateral distance)
};

// Multi-step non-uniformity budget over a lateral span.
struct ToleranceBudget {
  std::vector<BudgetStep> steps;
  double lateral_span = 0.0;    // m
  double freq_tolerance = 0.0;  // rad/s, allowed cavity detuning

  void validate() const;
};

struct CapacitanceResult {
  double c_gap = 0.0;    // F
  double c_total = 0.0;  // F
};

// Parallel-plate gap capacitance (fringing ignored; error O(d/R)).
CapacitanceResult capacitance(const LcDesign& design);

// omega_c = 1/sqrt(L C_total).
double resonance(const LcDesign& design);

struct GapSensitivity {
  double fractional = 0.0;  // (d omega_c / omega_c) per meter of gap change
  double absolute = 0.0;    // rad/s per meter of gap change
};

// d omega_c / omega_c = eta * dd / (2 d).
GapSensitivity gap_sensitivity(const LcDesign& design);

// epsilon = 2 d dOmega_c / (l omega_c): the gap gradient that exhausts the
// frequency tolerance over the lateral span.
double tolerance_limit(const ToleranceBudget& budget, double omega_c,
                       double gap);

// Root-sum-square step combination. Empty solve_for returns the total;
// otherwise returns the headroom left for the named step at epsilon_total.
double budget_rss(const ToleranceBudget& budget, double epsilon_total = 0.0,
                  const std::string& solve_for = "");

// g0 = eta * (omega_c / 2d) * x_zpf, x_zpf = sqrt(hbar / (2 m_eff Omega_m)).
double coupling_g0(const LcDesign& design, const MechanicalMode& mode);

// Zero-point displacement amplitude for a mode.
double zero_point_motion(const MechanicalMode& mode);

}  // namespace gapcap
