#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gapcap/circuit.hpp"
#include "gapcap/drum.hpp"

namespace gapcap {

enum class Boundary { kOpen, kPeriodic };

// Chain of coupled sites with alternating nearest-neighbour hopping.
struct LatticeSpec {
  int n_sites = 0;
  std::vector<double> omega_site;  // rad/s, one per site
  double j1 = 0.0;                 // rad/s, bond 1-2, 3-4, ...
  double j2 = 0.0;                 // rad/s, bond 2-3, 4-5, ...
  Boundary boundary = Boundary::kOpen;
  std::vector<DrumGeometry> site_drums;  // empty or one per site

  void validate() const;
  static LatticeSpec uniform(int n_sites, double omega, double j1, double j2,
                             Boundary boundary = Boundary::kOpen);
};

// Eigen-decomposition of a lattice Hamiltonian.
struct ModeSet {
  std::vector<double> eigenfrequencies;           // rad/s, ascending
  std::vector<std::vector<double>> eigenvectors;  // unit norm, per mode
  std::vector<double> ipr;                        // sum of |v_i|^4 per mode
};

// Edge-localization diagnostic for the near-degenerate mid-gap doublet.
struct EdgeStateReport {
  int n_mid_gap = 0;        // modes strictly inside the bulk gap
  int doublet_lo = -1;      // mode indices of the two closest to mid-gap
  int doublet_hi = -1;
  double splitting = 0.0;   // rad/s between the doublet frequencies
  double ipr_left = 0.0;    // IPR of the maximally localized combinations
  double ipr_right = 0.0;
};

// Tridiagonal (open) or cyclic (periodic) matrix: diagonal omega_site,
// off-diagonal alternating j1, j2 starting with j1 between sites 1 and 2.
Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec);

// Full spectrum, orthonormal eigenvectors, and per-mode IPR.
// Requires a square matrix symmetric within 1e-12 relative.
ModeSet eigenmodes(const Eigen::MatrixXd& hamiltonian);

// Rotates the two modes nearest omega_site into maximally localized
// combinations; their IPR measures edge confinement directly, which the raw
// even/odd doublet pair hides.
EdgeStateReport edge_states(const ModeSet& modes, double omega_site,
                            double j1, double j2);

// Per-site fundamental frequencies from the site drums.
std::vector<double> radius_multiplex(const LatticeSpec& spec, double stress_pa,
                                     double density);

// J = omega_c * M / (2 L) for inductively coupled circuits.
double mutual_to_hopping(double omega_c, double mutual_h, double inductance_h);

struct Histogram {
  std::vector<double> edges;  // n_bins + 1
  std::vector<int> counts;    // n_bins
};

// Fabrication context for the disorder Monte Carlo.
struct DisorderInputs {
  double stress_pa = 0.0;
  double density = 0.0;
  LcDesign lc;               // shared per-site circuit
  double lateral_span = 0.0; // m, chip extent the gradient acts across
};

struct DisorderStats {
  std::vector<double> mean_omega_m;  // per site, rad/s
  std::vector<double> std_omega_m;   // per site, rad/s
  double fractional_freq_std = 0.0;  // mean over sites of std/mean
  double mean_peak_detuning = 0.0;   // rad/s, peak-to-peak cavity detuning
  Histogram detuning_histogram;      // per-trial peak-to-peak detuning
};

// Per trial: Gaussian radius perturbations (zero mean, sigma_r) per site and
// one wafer gap gradient drawn uniformly in [-sigma_gap_gradient,
// +sigma_gap_gradient], acting linearly across the lateral span with the
// chain centered. Randomness is keyed by (seed, trial, site), so results do
// not depend on evaluation order.
DisorderStats disorder_monte_carlo(const LatticeSpec& spec,
                                   const DisorderInputs& inputs,
                                   double sigma_r, double sigma_gap_gradient,
                                   int trials, std::uint64_t seed);

}  // namespace gapcap
