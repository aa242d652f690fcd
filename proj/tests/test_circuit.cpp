#include <cmath>
#include <doctest.h>
#include <stdexcept>
#include <string>

#include "gapcap/circuit.hpp"
#include "gapcap/constants.hpp"
#include "gapcap/drum.hpp"
#include "gapcap/errors.hpp"

using namespace gapcap;

namespace {

LcDesign reference_lc() {
  LcDesign design;
  design.gap = 150.0e-9;
  design.plate_radius = 70.0e-6;
  design.inductance = 10.0e-9;
  return design;
}

ToleranceBudget reference_budget() {
  ToleranceBudget budget;
  budget.steps = {{"si-etch", 0.5e-6},
                  {"evaporation", 0.1e-6},
                  {"lto", 0.2e-6},
                  {"ibe", 0.1e-6}};
  budget.lateral_span = 2.0e-3;
  budget.freq_tolerance = kTwoPi * 50.0e6;
  return budget;
}

}  // namespace

TEST_CASE("gap capacitance is the parallel-plate value on the net area") {
  LcDesign design = reference_lc();
  CapacitanceResult cap = capacitance(design);
  double expected = kVacuumPermittivity * kPi * 70.0e-6 * 70.0e-6 / 150.0e-9;
  CHECK(cap.c_gap == doctest::Approx(expected).epsilon(1e-13));
  CHECK(cap.c_total == cap.c_gap);

  design.hole_fill = 0.25;
  design.stray_capacitance = 40.0e-15;
  cap = capacitance(design);
  CHECK(cap.c_gap == doctest::Approx(0.75 * expected).epsilon(1e-13));
  CHECK(cap.c_total ==
        doctest::Approx(0.75 * expected + 40.0e-15).epsilon(1e-13));
}

TEST_CASE("resonance is set by the inductor and total capacitance") {
  LcDesign design = reference_lc();
  design.stray_capacitance = 40.0e-15;
  CapacitanceResult cap = capacitance(design);
  CHECK(resonance(design) ==
        doctest::Approx(1.0 / std::sqrt(10.0e-9 * cap.c_total))
            .epsilon(1e-13));
}

TEST_CASE("gap sensitivity is participation over twice the gap") {
  LcDesign design = reference_lc();
  design.participation = 0.8;
  GapSensitivity s = gap_sensitivity(design);
  CHECK(s.fractional == doctest::Approx(0.8 / (2.0 * 150.0e-9)).epsilon(1e-15));
  CHECK(s.absolute ==
        doctest::Approx(resonance(design) * s.fractional).epsilon(1e-15));
}

TEST_CASE("gap sensitivity matches a numerical derivative of the resonance") {
  LcDesign design = reference_lc();  // participation 1, no stray
  GapSensitivity s = gap_sensitivity(design);
  double h = 1.0e-5 * design.gap;
  LcDesign plus = design;
  LcDesign minus = design;
  plus.gap += h;
  minus.gap -= h;
  double derivative = (resonance(plus) - resonance(minus)) / (2.0 * h);
  CHECK(std::abs(derivative) ==
        doctest::Approx(s.absolute).epsilon(1e-6));
}

TEST_CASE("a 200 nm gap at 6 GHz moves about 15 MHz per nanometer") {
  // Fractional sensitivity 1/(2*200nm) = 2.5e6 per meter of gap change, so
  // at 6 GHz one nanometer detunes the cavity by 15 MHz.
  LcDesign design;
  design.gap = 200.0e-9;
  design.inductance = 10.0e-9;
  design.plate_radius = 70.0e-6;
  GapSensitivity s = gap_sensitivity(design);
  CHECK(s.fractional == doctest::Approx(2.5e6).epsilon(1e-15));
  double per_nm_at_6ghz = s.fractional * 6.0e9 * 1.0e-9;
  CHECK(per_nm_at_6ghz == doctest::Approx(15.0e6).epsilon(1e-12));
}

TEST_CASE("tolerance limit converts a frequency budget into a gap gradient") {
  ToleranceBudget budget = reference_budget();
  double omega_c = kTwoPi * 6.0e9;
  double epsilon = tolerance_limit(budget, omega_c, 200.0e-9);
  // 2 d dOmega / (l Omega): 50 MHz over 2 mm at 6 GHz and a 200 nm gap.
  double expected = 2.0 * 200.0e-9 * 50.0e6 / (2.0e-3 * 6.0e9);
  CHECK(epsilon == doctest::Approx(expected).epsilon(1e-13));
  CHECK(epsilon == doctest::Approx(1.6667e-6).epsilon(1e-4));
  CHECK_THROWS_AS(tolerance_limit(budget, 0.0, 200.0e-9),
                  std::invalid_argument);
}

TEST_CASE("budget combines steps in quadrature") {
  ToleranceBudget budget = reference_budget();
  double total = budget_rss(budget);
  double expected = std::sqrt(0.25 + 0.01 + 0.04 + 0.01) * 1.0e-6;
  CHECK(total == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("solving a budget step returns the quadrature headroom") {
  ToleranceBudget budget = reference_budget();
  budget.steps.push_back({"cmp", 0.0});
  double headroom = budget_rss(budget, 2.0e-6, "cmp");
  CHECK(headroom == doctest::Approx(std::sqrt(3.69) * 1.0e-6).epsilon(1e-12));

  // Using the headroom for the solved step saturates the total exactly.
  budget.steps.back().epsilon = headroom;
  CHECK(budget_rss(budget) == doctest::Approx(2.0e-6).epsilon(1e-13));
}

TEST_CASE("an infeasible budget names the shortfall") {
  ToleranceBudget budget = reference_budget();
  budget.steps.push_back({"cmp", 0.0});
  CHECK_THROWS_AS(budget_rss(budget, 0.5e-6, "cmp"), BudgetError);
  try {
    budget_rss(budget, 0.5e-6, "cmp");
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
  }
}

TEST_CASE("solving an absent budget step is an argument error") {
  ToleranceBudget budget = reference_budget();
  CHECK_THROWS_AS(budget_rss(budget, 2.0e-6, "polish"), std::invalid_argument);
}

TEST_CASE("zero-point motion follows from mass and frequency") {
  MechanicalMode mode = MechanicalMode::from_q(kTwoPi * 2.0e6, 4.0e7, 2.0e-12);
  double expected = std::sqrt(kHbar / (2.0 * 2.0e-12 * kTwoPi * 2.0e6));
  CHECK(zero_point_motion(mode) == doctest::Approx(expected).epsilon(1e-13));
  // Nanogram drums at megahertz sit at femtometre zero-point amplitudes.
  CHECK(zero_point_motion(mode) == doctest::Approx(1.4485e-15).epsilon(1e-4));
  MechanicalMode massless = mode;
  massless.m_eff = 0.0;
  CHECK_THROWS_AS(zero_point_motion(massless), std::invalid_argument);
}

TEST_CASE("single-photon coupling is the pulled resonance times x_zpf") {
  LcDesign design = reference_lc();
  design.participation = 0.9;
  MechanicalMode mode = MechanicalMode::from_q(kTwoPi * 2.0e6, 4.0e7, 2.0e-12);
  double expected = 0.9 * resonance(design) / (2.0 * 150.0e-9) *
                    zero_point_motion(mode);
  CHECK(coupling_g0(design, mode) == doctest::Approx(expected).epsilon(1e-13));
  // Vacuum-gap geometries land in the few-to-tens-of-hertz range.
  double g0_hz = coupling_g0(design, mode) / kTwoPi;
  CHECK(g0_hz > 5.0);
  CHECK(g0_hz < 50.0);
}

TEST_CASE("lc design validation rejects unphysical values") {
  LcDesign design = reference_lc();
  CHECK_NOTHROW(design.validate());

  LcDesign bad = design;
  bad.gap = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);

  bad = design;
  bad.plate_radius = -1.0e-6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = design;
  bad.hole_fill = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = design;
  bad.inductance = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = design;
  bad.stray_capacitance = -1.0e-15;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = design;
  bad.participation = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = design;
  bad.participation = 1.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("budget validation rejects negative steps and empty extents") {
  ToleranceBudget budget = reference_budget();
  CHECK_NOTHROW(budget.validate());

  ToleranceBudget bad = budget;
  bad.steps[0].epsilon = -0.1e-6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = budget;
  bad.lateral_span = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = budget;
  bad.freq_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
