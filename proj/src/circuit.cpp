#include "gapcap/circuit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gapcap/constants.hpp"
#include "gapcap/errors.hpp"

namespace gapcap {

void LcDesign::validate() const {
  if (!(gap > 0.0)) {
    throw std::domain_error("capacitor gap must be positive");
  }
  if (!(plate_radius > 0.0)) {
    throw std::invalid_argument("plate radius must be positive");
  }
  if (!(hole_fill >= 0.0 && hole_fill < 1.0)) {
    throw std::invalid_argument("hole fill must lie in [0, 1)");
  }
  if (!(inductance > 0.0)) {
    throw std::invalid_argument("inductance must be positive");
  }
  if (stray_capacitance < 0.0) {
    throw std::invalid_argument("stray capacitance must be nonnegative");
  }
  if (!(participation > 0.0 && participation <= 1.0)) {
    throw std::invalid_argument("participation must lie in (0, 1]");
  }
}

void ToleranceBudget::validate() const {
  for (const auto& step : steps) {
    if (step.epsilon < 0.0) {
      throw std::invalid_argument("budget step '" + step.name +
                                  "' has negative non-uniformity");
    }
  }
  if (!(lateral_span > 0.0)) {
    throw std::invalid_argument("lateral span must be positive");
  }
  if (!(freq_tolerance > 0.0)) {
    throw std::invalid_argument("frequency tolerance must be positive");
  }
}

CapacitanceResult capacitance(const LcDesign& design) {
  design.validate();
  CapacitanceResult result;
  double area = kPi * design.plate_radius * design.plate_radius *
                (1.0 - design.hole_fill);
  result.c_gap = kVacuumPermittivity * area / design.gap;
  result.c_total = result.c_gap + design.stray_capacitance;
  return result;
}

double resonance(const LcDesign& design) {
  CapacitanceResult cap = capacitance(design);
  return 1.0 / std::sqrt(design.inductance * cap.c_total);
}

GapSensitivity gap_sensitivity(const LcDesign& design) {
  design.validate();
  GapSensitivity s;
  s.fractional = design.participation / (2.0 * design.gap);
  s.absolute = resonance(design) * s.fractional;
  return s;
}

double tolerance_limit(const ToleranceBudget& budget, double omega_c,
                       double gap) {
  budget.validate();
  if (!(omega_c > 0.0) || !(gap > 0.0)) {
    throw std::invalid_argument(
        "tolerance limit needs positive frequency and gap");
  }
  return 2.0 * gap * budget.freq_tolerance / (budget.lateral_span * omega_c);
}

double budget_rss(const ToleranceBudget& budget, double epsilon_total,
                  const std::string& solve_for) {
  for (const auto& step : budget.steps) {
    if (step.epsilon < 0.0) {
      throw std::invalid_argument("budget step '" + step.name +
                                  "' has negative non-uniformity");
    }
  }
  if (solve_for.empty()) {
    double sum_sq = 0.0;
    for (const auto& step : budget.steps) {
      sum_sq += step.epsilon * step.epsilon;
    }
    return std::sqrt(sum_sq);
  }
  bool found = false;
  double others_sq = 0.0;
  for (const auto& step : budget.steps) {
    if (step.name == solve_for) {
      found = true;
      continue;
    }
    others_sq += step.epsilon * step.epsilon;
  }
  if (!found) {
    throw std::invalid_argument("budget has no step named '" + solve_for +
                                "'");
  }
  double radicand = epsilon_total * epsilon_total - others_sq;
  if (radicand < 0.0) {
    std::ostringstream msg;
    msg << "budget infeasible: other steps already combine to "
        << std::sqrt(others_sq) << " m/m, exceeding the total "
        << epsilon_total << " m/m by "
        << (std::sqrt(others_sq) - epsilon_total) << " m/m";
    throw BudgetError(msg.str());
  }
  return std::sqrt(radicand);
}

double zero_point_motion(const MechanicalMode& mode) {
  if (!(mode.m_eff > 0.0) || !(mode.omega_m > 0.0)) {
    throw std::invalid_argument(
        "zero-point motion needs positive mass and frequency");
  }
  return std::sqrt(kHbar / (2.0 * mode.m_eff * mode.omega_m));
}

double coupling_g0(const LcDesign& design, const MechanicalMode& mode) {
  design.validate();
  double omega_c = resonance(design);
  return design.participation * omega_c / (2.0 * design.gap) *
         zero_point_motion(mode);
}

}  // namespace gapcap
