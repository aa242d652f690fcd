#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gapcap/constants.hpp"
#include "gapcap/lattice.hpp"

using namespace gapcap;

namespace {

constexpr double kOmegaSite = kTwoPi * 6.0e9;
constexpr double kJ1 = kTwoPi * 100.0e6;
constexpr double kJ2 = kTwoPi * 200.0e6;

LatticeSpec ssh_chain(int n_sites, Boundary boundary = Boundary::kOpen) {
  return LatticeSpec::uniform(n_sites, kOmegaSite, kJ1, kJ2, boundary);
}

DrumGeometry drum_of_radius(double radius) {
  DrumGeometry geom;
  geom.trench_radius = radius;
  geom.top_thickness = 200.0e-9;
  geom.bottom_thickness = 150.0e-9;
  geom.trench_depth = 300.0e-9;
  return geom;
}

LcDesign shared_lc() {
  LcDesign lc;
  lc.gap = 150.0e-9;
  lc.plate_radius = 50.0e-6;
  lc.inductance = 10.0e-9;
  return lc;
}

}  // namespace

TEST_CASE("hamiltonian alternates the two hoppings along the chain") {
  LatticeSpec spec = ssh_chain(4);
  Eigen::MatrixXd h = build_hamiltonian(spec);
  REQUIRE(h.rows() == 4);
  for (int i = 0; i < 4; ++i) CHECK(h(i, i) == kOmegaSite);
  CHECK(h(0, 1) == kJ1);
  CHECK(h(1, 2) == kJ2);
  CHECK(h(2, 3) == kJ1);
  CHECK(h(1, 0) == kJ1);
  CHECK(h(0, 2) == 0.0);
  CHECK(h(0, 3) == 0.0);
}

TEST_CASE("periodic boundary closes the ring with the alternating bond") {
  LatticeSpec spec = ssh_chain(4, Boundary::kPeriodic);
  Eigen::MatrixXd h = build_hamiltonian(spec);
  // Bond 3-0 continues the alternation: bonds 0,1,2 used j1,j2,j1, so the
  // wrap-around bond index 3 is j2.
  CHECK(h(3, 0) == kJ2);
  CHECK(h(0, 3) == kJ2);
}

TEST_CASE("uniform open chain matches the analytic cosine band") {
  const int n = 8;
  double j = kJ1;
  LatticeSpec spec = LatticeSpec::uniform(n, kOmegaSite, j, j);
  ModeSet modes = eigenmodes(build_hamiltonian(spec));
  std::vector<double> expected;
  for (int k = 1; k <= n; ++k) {
    expected.push_back(kOmegaSite + 2.0 * j * std::cos(kPi * k / (n + 1)));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(modes.eigenfrequencies.size() == static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    CHECK(modes.eigenfrequencies[static_cast<std::size_t>(m)] ==
          doctest::Approx(expected[static_cast<std::size_t>(m)])
              .epsilon(1e-9));
  }
}

TEST_CASE("uniform ring matches the analytic Bloch frequencies") {
  const int n = 8;
  double j = kJ1;
  LatticeSpec spec =
      LatticeSpec::uniform(n, kOmegaSite, j, j, Boundary::kPeriodic);
  ModeSet modes = eigenmodes(build_hamiltonian(spec));
  std::vector<double> expected;
  for (int m = 0; m < n; ++m) {
    expected.push_back(kOmegaSite + 2.0 * j * std::cos(kTwoPi * m / n));
  }
  std::sort(expected.begin(), expected.end());
  for (int m = 0; m < n; ++m) {
    CHECK(modes.eigenfrequencies[static_cast<std::size_t>(m)] ==
          doctest::Approx(expected[static_cast<std::size_t>(m)])
              .epsilon(1e-9));
  }
}

TEST_CASE("alternating chain spectrum is symmetric about the site frequency") {
  ModeSet modes = eigenmodes(build_hamiltonian(ssh_chain(12)));
  std::size_t n = modes.eigenfrequencies.size();
  for (std::size_t m = 0; m < n; ++m) {
    double mirror = modes.eigenfrequencies[n - 1 - m];
    CHECK(modes.eigenfrequencies[m] + mirror ==
          doctest::Approx(2.0 * kOmegaSite).epsilon(1e-12));
  }
}

TEST_CASE("eigenvectors come back orthonormal with ascending frequencies") {
  ModeSet modes = eigenmodes(build_hamiltonian(ssh_chain(6)));
  std::size_t n = modes.eigenfrequencies.size();
  for (std::size_t m = 1; m < n; ++m) {
    CHECK(modes.eigenfrequencies[m] >= modes.eigenfrequencies[m - 1]);
  }
  for (std::size_t a = 0; a < n; ++a) {
    double norm = 0.0;
    for (double v : modes.eigenvectors[a]) norm += v * v;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t b = a + 1; b < n; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += modes.eigenvectors[a][i] * modes.eigenvectors[b][i];
      }
      CHECK(dot == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("eigen decomposition rejects asymmetric matrices") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(eigenmodes(bad), std::invalid_argument);
  CHECK_THROWS_AS(eigenmodes(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("weak-bond-terminated chain carries a localized mid-gap doublet") {
  ModeSet modes = eigenmodes(build_hamiltonian(ssh_chain(12)));
  EdgeStateReport report = edge_states(modes, kOmegaSite, kJ1, kJ2);
  CHECK(report.n_mid_gap == 2);
  CHECK(report.doublet_lo == 5);
  CHECK(report.doublet_hi == 6);
  // Maximally localized combinations concentrate on a few edge sites.
  CHECK(report.ipr_left > 0.4);
  CHECK(report.ipr_right > 0.4);
  CHECK(report.ipr_left == doctest::Approx(report.ipr_right).epsilon(1e-6));
  // Finite-size splitting: leading order 2 j1 (j1/j2)^(cells-1) (1-(j1/j2)^2).
  double ratio = kJ1 / kJ2;
  double estimate =
      2.0 * kJ1 * std::pow(ratio, 5.0) * (1.0 - ratio * ratio);
  CHECK(report.splitting == doctest::Approx(estimate).epsilon(0.05));
}

TEST_CASE("doublet splitting decays exponentially with chain length") {
  double previous = 0.0;
  for (int n : {8, 12, 16}) {
    ModeSet modes = eigenmodes(build_hamiltonian(ssh_chain(n)));
    EdgeStateReport report = edge_states(modes, kOmegaSite, kJ1, kJ2);
    CHECK(report.n_mid_gap == 2);
    if (previous > 0.0) {
      // Two more cells shrink the splitting by about (j1/j2)^2 = 1/4.
      CHECK(report.splitting < 0.3 * previous);
    }
    previous = report.splitting;
  }
}

TEST_CASE("bulk modes stay delocalized while edge modes concentrate") {
  ModeSet modes = eigenmodes(build_hamiltonian(ssh_chain(12)));
  EdgeStateReport report = edge_states(modes, kOmegaSite, kJ1, kJ2);
  for (int m = 0; m < 12; ++m) {
    if (m == report.doublet_lo || m == report.doublet_hi) continue;
    CHECK(modes.ipr[static_cast<std::size_t>(m)] < 0.3);
  }
}

TEST_CASE("strong-bond-terminated chain has no mid-gap modes") {
  // Swapping j1 and j2 ends the chain on strong bonds: trivial phase.
  LatticeSpec spec = LatticeSpec::uniform(12, kOmegaSite, kJ2, kJ1);
  ModeSet modes = eigenmodes(build_hamiltonian(spec));
  EdgeStateReport report = edge_states(modes, kOmegaSite, kJ2, kJ1);
  CHECK(report.n_mid_gap == 0);
}

TEST_CASE("equal hoppings leave nothing for the edge diagnostic") {
  LatticeSpec spec = LatticeSpec::uniform(12, kOmegaSite, kJ1, kJ1);
  ModeSet modes = eigenmodes(build_hamiltonian(spec));
  EdgeStateReport report = edge_states(modes, kOmegaSite, kJ1, kJ1);
  CHECK(report.n_mid_gap == 0);
  CHECK(report.splitting == 0.0);
}

TEST_CASE("lattice validation rejects inconsistent sizes") {
  LatticeSpec spec = ssh_chain(4);
  CHECK_NOTHROW(spec.validate());

  LatticeSpec bad = spec;
  bad.n_sites = 1;
  bad.omega_site = {kOmegaSite};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.omega_site.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.j1 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.site_drums.assign(3, drum_of_radius(50.0e-6));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("radius multiplexing maps site radii onto 1/R frequencies") {
  LatticeSpec spec = ssh_chain(3);
  spec.site_drums = {drum_of_radius(50.0e-6), drum_of_radius(60.0e-6),
                     drum_of_radius(75.0e-6)};
  std::vector<double> freqs = radius_multiplex(spec, 350.0e6, 2700.0);
  REQUIRE(freqs.size() == 3);
  double speed = std::sqrt(350.0e6 / 2700.0);
  CHECK(freqs[0] ==
        doctest::Approx(2.4048255576957724 / 50.0e-6 * speed).epsilon(1e-12));
  CHECK(freqs[0] / freqs[2] == doctest::Approx(1.5).epsilon(1e-12));

  LatticeSpec bare = ssh_chain(3);
  CHECK_THROWS_AS(radius_multiplex(bare, 350.0e6, 2700.0),
                  std::invalid_argument);
}

TEST_CASE("mutual inductance converts to hopping at the resonance") {
  CHECK(mutual_to_hopping(kTwoPi * 6.0e9, 50.0e-12, 10.0e-9) ==
        doctest::Approx(kTwoPi * 6.0e9 * 50.0e-12 / (2.0 * 10.0e-9))
            .epsilon(1e-15));
  CHECK_THROWS_AS(mutual_to_hopping(0.0, 50.0e-12, 10.0e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(mutual_to_hopping(kTwoPi * 6.0e9, 50.0e-12, 0.0),
                  std::invalid_argument);
}

TEST_CASE("radius scatter sets the fractional frequency spread") {
  const int n_sites = 4;
  LatticeSpec spec = ssh_chain(n_sites);
  spec.site_drums.assign(n_sites, drum_of_radius(50.0e-6));
  DisorderInputs inputs;
  inputs.stress_pa = 350.0e6;
  inputs.density = 2700.0;
  inputs.lc = shared_lc();
  inputs.lateral_span = 2.0e-3;
  // 500 nm of radius scatter on 50 um drums: 1% frequency disorder.
  DisorderStats stats =
      disorder_monte_carlo(spec, inputs, 500.0e-9, 0.0, 2000, 7);
  CHECK(stats.fractional_freq_std == doctest::Approx(0.01).epsilon(0.05));
  CHECK(stats.mean_peak_detuning == 0.0);
  int total = std::accumulate(stats.detuning_histogram.counts.begin(),
                              stats.detuning_histogram.counts.end(), 0);
  CHECK(total == 2000);
  CHECK(stats.detuning_histogram.edges.size() ==
        stats.detuning_histogram.counts.size() + 1);
}

TEST_CASE("gap gradient sets the chip-scale cavity detuning spread") {
  const int n_sites = 4;
  LatticeSpec spec = ssh_chain(n_sites);
  spec.site_drums.assign(n_sites, drum_of_radius(50.0e-6));
  DisorderInputs inputs;
  inputs.stress_pa = 350.0e6;
  inputs.density = 2700.0;
  inputs.lc = shared_lc();
  inputs.lateral_span = 2.0e-3;
  double sigma_gradient = 1.0e-6;  // 1 nm of gap change per millimetre
  DisorderStats stats =
      disorder_monte_carlo(spec, inputs, 0.0, sigma_gradient, 4000, 11);
  // Peak-to-peak detuning per trial is |g| span |dw/dd|; the mean of |g|
  // over a symmetric uniform draw is sigma/2.
  GapSensitivity sens = gap_sensitivity(inputs.lc);
  double expected =
      0.5 * sigma_gradient * inputs.lateral_span * sens.absolute;
  CHECK(stats.mean_peak_detuning == doctest::Approx(expected).epsilon(0.05));
  // Radii are unperturbed; only accumulation rounding is left.
  CHECK(stats.fractional_freq_std < 1e-6);
}

TEST_CASE("disorder trials are reproducible and seed-keyed") {
  LatticeSpec spec = ssh_chain(3);
  spec.site_drums.assign(3, drum_of_radius(50.0e-6));
  DisorderInputs inputs;
  inputs.stress_pa = 350.0e6;
  inputs.density = 2700.0;
  inputs.lc = shared_lc();
  inputs.lateral_span = 2.0e-3;
  DisorderStats a = disorder_monte_carlo(spec, inputs, 200e-9, 1e-6, 50, 3);
  DisorderStats b = disorder_monte_carlo(spec, inputs, 200e-9, 1e-6, 50, 3);
  DisorderStats c = disorder_monte_carlo(spec, inputs, 200e-9, 1e-6, 50, 4);
  CHECK(a.fractional_freq_std == b.fractional_freq_std);
  CHECK(a.mean_peak_detuning == b.mean_peak_detuning);
  CHECK(a.mean_omega_m == b.mean_omega_m);
  CHECK(a.fractional_freq_std != c.fractional_freq_std);
}

TEST_CASE("disorder inputs are validated before sampling") {
  LatticeSpec spec = ssh_chain(3);
  spec.site_drums.assign(3, drum_of_radius(50.0e-6));
  DisorderInputs inputs;
  inputs.stress_pa = 350.0e6;
  inputs.density = 2700.0;
  inputs.lc = shared_lc();
  inputs.lateral_span = 2.0e-3;
  CHECK_THROWS_AS(disorder_monte_carlo(spec, inputs, 200e-9, 0.0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(disorder_monte_carlo(spec, inputs, -1.0, 0.0, 10, 1),
                  std::invalid_argument);

  DisorderInputs bad = inputs;
  bad.stress_pa = 0.0;
  CHECK_THROWS_AS(disorder_monte_carlo(spec, bad, 200e-9, 0.0, 10, 1),
                  std::invalid_argument);

  bad = inputs;
  bad.lateral_span = 0.0;
  CHECK_THROWS_AS(disorder_monte_carlo(spec, bad, 200e-9, 0.0, 10, 1),
                  std::invalid_argument);

  LatticeSpec bare = ssh_chain(3);
  CHECK_THROWS_AS(disorder_monte_carlo(bare, inputs, 200e-9, 0.0, 10, 1),
                  std::invalid_argument);
}
