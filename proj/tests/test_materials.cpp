#include <cstdio>
#include <doctest.h>
#include <stdexcept>
#include <string>

#include "gapcap/curve.hpp"
#include "gapcap/materials.hpp"

using namespace gapcap;

namespace {

PiecewiseCurve constant_curve(double value, const std::string& name = "") {
  return PiecewiseCurve({0.01, 300.0}, {value, value}, name);
}

// Fictitious film/substrate pair with constant properties, so the thermal
// integral has a closed form.
Material flat_film() {
  Material m;
  m.name = "flat-film";
  m.density = 2700.0;
  m.poisson_ratio = 0.33;
  m.youngs_modulus = constant_curve(70.0e9);
  m.thermal_expansion = constant_curve(23.1e-6);
  return m;
}

Material flat_substrate() {
  Material m;
  m.name = "flat-substrate";
  m.density = 2329.0;
  m.poisson_ratio = 0.28;
  m.youngs_modulus = constant_curve(130.0e9);
  m.thermal_expansion = constant_curve(2.6e-6);
  return m;
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/gapcap_test_") + stem;
}

}  // namespace

TEST_CASE("piecewise curve interpolates linearly and is exact at samples") {
  PiecewiseCurve curve({10.0, 20.0, 40.0}, {1.0, 3.0, 2.0}, "demo");
  CHECK(curve(10.0) == 1.0);
  CHECK(curve(20.0) == 3.0);
  CHECK(curve(40.0) == 2.0);
  CHECK(curve(15.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(curve(30.0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(interpolate_property(curve, 15.0) == curve(15.0));
  CHECK(curve.min_temperature() == 10.0);
  CHECK(curve.max_temperature() == 40.0);
  CHECK(curve.covers(10.0, 40.0));
  CHECK_FALSE(curve.covers(5.0, 40.0));
}

TEST_CASE("piecewise curve refuses evaluation outside its span") {
  PiecewiseCurve curve({10.0, 40.0}, {1.0, 2.0}, "demo");
  CHECK_THROWS_AS(curve(9.9), std::out_of_range);
  CHECK_THROWS_AS(curve(40.1), std::out_of_range);
  try {
    curve(5.0);
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& e) {
    std::string what = e.what();
    // The error names the curve and its span so the fix is obvious.
    CHECK(what.find("demo") != std::string::npos);
    CHECK(what.find("[10, 40]") != std::string::npos);
  }
}

TEST_CASE("piecewise curve constructor rejects malformed samples") {
  CHECK_THROWS_AS(PiecewiseCurve({10.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseCurve({10.0, 20.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseCurve({20.0, 10.0}, {1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseCurve({10.0, 10.0}, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("material validation checks density, Poisson ratio, and coverage") {
  Material m = flat_film();
  CHECK_NOTHROW(m.validate());

  Material bad = flat_film();
  bad.density = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = flat_film();
  bad.poisson_ratio = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = flat_film();
  bad.youngs_modulus = PiecewiseCurve({20.0, 300.0}, {70e9, 70e9});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("biaxial modulus divides Young's modulus by 1 - nu") {
  Material m = flat_film();
  CHECK(m.biaxial_modulus(100.0) ==
        doctest::Approx(70.0e9 / (1.0 - 0.33)).epsilon(1e-15));
}

TEST_CASE("thermal stress integral is exact for constant properties") {
  Material film = flat_film();
  Material substrate = flat_substrate();
  // Constant integrand: the trapezoid rule is exact already at 2 panels.
  double expected = 70.0e9 * (23.1e-6 - 2.6e-6) * (300.0 - 0.01);
  FilmStressState coarse = thermal_stress(film, substrate, 0.0, 0.01, 300.0, 2);
  FilmStressState fine = thermal_stress(film, substrate, 0.0, 0.01, 300.0);
  CHECK(coarse.sigma_cryo == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fine.sigma_cryo == doctest::Approx(expected).epsilon(1e-12));
  CHECK(coarse.provenance == StressProvenance::kThermalModel);
  CHECK(coarse.sigma_rt == 0.0);
}

TEST_CASE("room-temperature stress enters the cryogenic stress additively") {
  Material film = flat_film();
  Material substrate = flat_substrate();
  double base = thermal_stress(film, substrate, 0.0, 0.01, 300.0).sigma_cryo;
  FilmStressState shifted =
      thermal_stress(film, substrate, 120.0e6, 0.01, 300.0);
  CHECK(shifted.sigma_rt == 120.0e6);
  CHECK(shifted.sigma_cryo == doctest::Approx(base + 120.0e6).epsilon(1e-12));
}

TEST_CASE("built-in tables put the cooldown stress gain near 300 MPa") {
  FilmStressState state = thermal_stress(default_aluminum(), default_silicon(),
                                         0.0, 0.01, kRoomTemperatureK);
  CHECK(state.sigma_cryo > 255.0e6);
  CHECK(state.sigma_cryo < 345.0e6);
}

TEST_CASE("thermal stress rejects bad ranges and uncovered curves") {
  Material film = flat_film();
  Material substrate = flat_substrate();
  CHECK_THROWS_AS(thermal_stress(film, substrate, 0.0, 300.0, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(thermal_stress(film, substrate, 0.0, 0.01, 300.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(thermal_stress(film, substrate, 0.0, 0.001, 300.0),
                  std::out_of_range);
}

TEST_CASE("curvature change converts to film stress by the thin-film relation") {
  WaferGeometry wafer;
  wafer.substrate_thickness = 500.0e-6;
  wafer.film_thickness = 250.0e-9;
  wafer.curvature_before = 0.0;
  wafer.curvature_after = 0.02;
  FilmStressState state = stoney_stress(default_silicon(), wafer);
  // sigma = -Y/(6(1-nu)) * t_sub^2/t_film * d_kappa with silicon at 293 K.
  double expected = -(130.0e9 / (1.0 - 0.28)) / 6.0 *
                    (500.0e-6 * 500.0e-6 / 250.0e-9) * 0.02;
  CHECK(state.sigma_cryo == doctest::Approx(expected).epsilon(1e-12));
  CHECK(state.sigma_rt == state.sigma_cryo);
  CHECK(state.provenance == StressProvenance::kStoney);
  CHECK(std::string(to_string(state.provenance)) == "stoney");

  // Bowing the other way flips the sign exactly.
  WaferGeometry flipped = wafer;
  flipped.curvature_before = 0.02;
  flipped.curvature_after = 0.0;
  CHECK(stoney_stress(default_silicon(), flipped).sigma_cryo ==
        doctest::Approx(-expected).epsilon(1e-12));
}

TEST_CASE("wafer geometry enforces the thin-film limit") {
  WaferGeometry wafer;
  wafer.substrate_thickness = 500.0e-6;
  wafer.film_thickness = 250.0e-9;
  CHECK_NOTHROW(wafer.validate());

  WaferGeometry thick = wafer;
  thick.film_thickness = 10.0e-6;  // 1/50 of the substrate
  CHECK_THROWS_AS(thick.validate(), std::invalid_argument);

  WaferGeometry empty = wafer;
  empty.film_thickness = 0.0;
  CHECK_THROWS_AS(empty.validate(), std::domain_error);

  WaferGeometry nosub = wafer;
  nosub.substrate_thickness = 0.0;
  CHECK_THROWS_AS(nosub.validate(), std::invalid_argument);
}

TEST_CASE("material tables survive a save/load round trip") {
  std::string path = temp_path("material_roundtrip.txt");
  Material original = default_aluminum();
  save_material_table(original, path);
  Material loaded = load_material_table(path);
  CHECK(loaded.name == original.name);
  CHECK(loaded.density == original.density);
  CHECK(loaded.poisson_ratio == original.poisson_ratio);
  CHECK(loaded.youngs_modulus.temperatures() ==
        original.youngs_modulus.temperatures());
  CHECK(loaded.youngs_modulus.values() == original.youngs_modulus.values());
  CHECK(loaded.thermal_expansion.values() ==
        original.thermal_expansion.values());
  CHECK_NOTHROW(loaded.validate());
  std::remove(path.c_str());
}

TEST_CASE("material table loader reports malformed files") {
  CHECK_THROWS_AS(load_material_table("/nonexistent/material.txt"),
                  std::invalid_argument);

  std::string path = temp_path("material_bad.txt");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs("0.01 70e9 0.0\n300 70e9 23e-6\n", f);
    std::fclose(f);
  }
  // Rows without the '# material ...' header are rejected.
  CHECK_THROWS_AS(load_material_table(path), std::invalid_argument);

  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs("# material demo rho=2700 nu=0.33\n0.01 70e9\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_material_table(path), std::invalid_argument);
  std::remove(path.c_str());
}
