#include "gapcap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gapcap/constants.hpp"
#include "gapcap/rng.hpp"

namespace gapcap {

void LatticeSpec::validate() const {
  if (n_sites < 2) {
    throw std::invalid_argument("lattice needs at least two sites");
  }
  if (j1 < 0.0 || j2 < 0.0) {
    throw std::invalid_argument("hopping rates must be nonnegative");
  }
  if (omega_site.size() != static_cast<std::size_t>(n_sites)) {
    throw std::invalid_argument("lattice needs one site frequency per site");
  }
  if (!site_drums.empty() &&
      site_drums.size() != static_cast<std::size_t>(n_sites)) {
    throw std::invalid_argument("site drum count must match site count");
  }
}

LatticeSpec LatticeSpec::uniform(int n_sites, double omega, double j1,
                                 double j2, Boundary boundary) {
  LatticeSpec spec;
  spec.n_sites = n_sites;
  spec.omega_site.assign(static_cast<std::size_t>(std::max(n_sites, 0)),
                         omega);
  spec.j1 = j1;
  spec.j2 = j2;
  spec.boundary = boundary;
  return spec;
}

Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  int n = spec.n_sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = spec.omega_site[static_cast<std::size_t>(i)];
  }
  for (int bond = 0; bond < n - 1; ++bond) {
    double j = bond % 2 == 0 ? spec.j1 : spec.j2;
    h(bond, bond + 1) = j;
    h(bond + 1, bond) = j;
  }
  if (spec.boundary == Boundary::kPeriodic) {
    double j = (n - 1) % 2 == 0 ? spec.j1 : spec.j2;
    h(n - 1, 0) += j;
    h(0, n - 1) += j;
  }
  return h;
}

ModeSet eigenmodes(const Eigen::MatrixXd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0) {
    throw std::invalid_argument("Hamiltonian must be square and nonempty");
  }
  double scale = hamiltonian.cwiseAbs().maxCoeff();
  double asym = (hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale) {
    throw std::invalid_argument("Hamiltonian must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen-decomposition failed to converge");
  }
  ModeSet modes;
  int n = static_cast<int>(hamiltonian.rows());
  modes.eigenfrequencies.resize(static_cast<std::size_t>(n));
  modes.eigenvectors.resize(static_cast<std::size_t>(n));
  modes.ipr.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    modes.eigenfrequencies[static_cast<std::size_t>(m)] =
        solver.eigenvalues()(m);
    Eigen::VectorXd v = solver.eigenvectors().col(m);
    auto& vec = modes.eigenvectors[static_cast<std::size_t>(m)];
    vec.resize(static_cast<std::size_t>(n));
    double ipr = 0.0;
    for (int i = 0; i < n; ++i) {
      vec[static_cast<std::size_t>(i)] = v(i);
      ipr += v(i) * v(i) * v(i) * v(i);
    }
    modes.ipr[static_cast<std::size_t>(m)] = ipr;
  }
  return modes;
}

namespace {

double rotated_ipr(const std::vector<double>& a, const std::vector<double>& b,
                   double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double w = c * a[i] + s * b[i];
    sum += w * w * w * w;
  }
  return sum;
}

double center_of_mass(const std::vector<double>& a,
                      const std::vector<double>& b, double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double w = c * a[i] + s * b[i];
    num += static_cast<double>(i) * w * w;
    den += w * w;
  }
  return num / den;
}

}  // namespace

EdgeStateReport edge_states(const ModeSet& modes, double omega_site, double j1,
                            double j2) {
  EdgeStateReport report;
  std::size_t n = modes.eigenfrequencies.size();
  if (n < 2) {
    throw std::invalid_argument("edge diagnostic needs at least two modes");
  }
  double gap_edge = std::abs(j2 - j1);
  if (gap_edge <= 0.0) {
    return report;  // no bulk gap, nothing to diagnose
  }
  // Modes strictly inside the bulk gap, counted at half the gap edge so the
  // finite-size band tail cannot leak in.
  std::vector<std::size_t> inside;
  for (std::size_t m = 0; m < n; ++m) {
    if (std::abs(modes.eigenfrequencies[m] - omega_site) < 0.5 * gap_edge) {
      inside.push_back(m);
    }
  }
  report.n_mid_gap = static_cast<int>(inside.size());
  if (inside.size() < 2) {
    return report;
  }
  // The two closest to mid-gap form the doublet.
  std::sort(inside.begin(), inside.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(modes.eigenfrequencies[a] - omega_site) <
           std::abs(modes.eigenfrequencies[b] - omega_site);
  });
  std::size_t lo = std::min(inside[0], inside[1]);
  std::size_t hi = std::max(inside[0], inside[1]);
  report.doublet_lo = static_cast<int>(lo);
  report.doublet_hi = static_cast<int>(hi);
  report.splitting =
      modes.eigenfrequencies[hi] - modes.eigenfrequencies[lo];

  const auto& a = modes.eigenvectors[lo];
  const auto& b = modes.eigenvectors[hi];
  // IPR(theta) is pi-periodic and smooth; a fine grid plus one parabolic
  // refinement pins the maximally localized rotation.
  const int kGrid = 720;
  const double step = kPi / kGrid;
  double best_theta = 0.0;
  double best = -1.0;
  for (int k = 0; k < kGrid; ++k) {
    double theta = step * k;
    double value = rotated_ipr(a, b, theta);
    if (value > best) {
      best = value;
      best_theta = theta;
    }
  }
  double h = step;
  double f0 = rotated_ipr(a, b, best_theta - h);
  double f1 = best;
  double f2 = rotated_ipr(a, b, best_theta + h);
  double denom = f0 - 2.0 * f1 + f2;
  if (denom < 0.0) {
    best_theta += 0.5 * h * (f0 - f2) / denom;
  }
  double theta_other = best_theta + 1.5707963267948966;
  double ipr_a = rotated_ipr(a, b, best_theta);
  double ipr_b = rotated_ipr(a, b, theta_other);
  double com_a = center_of_mass(a, b, best_theta);
  double com_b = center_of_mass(a, b, theta_other);
  if (com_a <= com_b) {
    report.ipr_left = ipr_a;
    report.ipr_right = ipr_b;
  } else {
    report.ipr_left = ipr_b;
    report.ipr_right = ipr_a;
  }
  return report;
}

std::vector<double> radius_multiplex(const LatticeSpec& spec, double stress_pa,
                                     double density) {
  spec.validate();
  if (spec.site_drums.empty()) {
    throw std::invalid_argument("radius multiplexing needs site drums");
  }
  std::vector<double> freqs;
  freqs.reserve(spec.site_drums.size());
  for (const auto& drum : spec.site_drums) {
    freqs.push_back(fundamental_frequency(drum, stress_pa, density));
  }
  return freqs;
}

double mutual_to_hopping(double omega_c, double mutual_h,
                         double inductance_h) {
  if (!(omega_c > 0.0) || !(inductance_h > 0.0)) {
    throw std::invalid_argument(
        "hopping conversion needs positive frequency and inductance");
  }
  return omega_c * mutual_h / (2.0 * inductance_h);
}

DisorderStats disorder_monte_carlo(const LatticeSpec& spec,
                                   const DisorderInputs& inputs,
                                   double sigma_r, double sigma_gap_gradient,
                                   int trials, std::uint64_t seed) {
  spec.validate();
  if (spec.site_drums.empty()) {
    throw std::invalid_argument("disorder Monte Carlo needs site drums");
  }
  if (trials < 1) {
    throw std::invalid_argument("disorder Monte Carlo needs trials >= 1");
  }
  if (sigma_r < 0.0 || sigma_gap_gradient < 0.0) {
    throw std::invalid_argument("disorder magnitudes must be nonnegative");
  }
  if (!(inputs.stress_pa > 0.0) || !(inputs.density > 0.0)) {
    throw std::invalid_argument(
        "disorder Monte Carlo needs positive stress and density");
  }
  if (!(inputs.lateral_span > 0.0)) {
    throw std::invalid_argument("lateral span must be positive");
  }
  inputs.lc.validate();

  int n = spec.n_sites;
  double pitch = inputs.lateral_span / (n - 1);
  double sqrt_ratio = std::sqrt(inputs.stress_pa / inputs.density);
  double alpha = bessel_j0_first_zero();

  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sum_sq(static_cast<std::size_t>(n), 0.0);
  std::vector<double> peak_detunings;
  peak_detunings.reserve(static_cast<std::size_t>(trials));

  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    double gradient = sigma_gap_gradient * rng.symmetric(0);
    double wc_min = 0.0;
    double wc_max = 0.0;
    for (int i = 0; i < n; ++i) {
      std::size_t si = static_cast<std::size_t>(i);
      double r = spec.site_drums[si].trench_radius +
                 sigma_r * rng.gaussian(static_cast<std::uint64_t>(i) + 1);
      if (!(r > 0.0)) {
        throw std::domain_error("radius perturbation drove a radius negative");
      }
      double omega_m = alpha / r * sqrt_ratio;
      sum[si] += omega_m;
      sum_sq[si] += omega_m * omega_m;

      double position = (i - 0.5 * (n - 1)) * pitch;
      LcDesign perturbed = inputs.lc;
      perturbed.gap = inputs.lc.gap + gradient * position;
      double wc = resonance(perturbed);
      if (i == 0) {
        wc_min = wc;
        wc_max = wc;
      } else {
        wc_min = std::min(wc_min, wc);
        wc_max = std::max(wc_max, wc);
      }
    }
    peak_detunings.push_back(wc_max - wc_min);
  }

  DisorderStats stats;
  stats.mean_omega_m.resize(static_cast<std::size_t>(n));
  stats.std_omega_m.resize(static_cast<std::size_t>(n));
  double frac_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::size_t si = static_cast<std::size_t>(i);
    double mean = sum[si] / trials;
    double var = sum_sq[si] / trials - mean * mean;
    stats.mean_omega_m[si] = mean;
    stats.std_omega_m[si] = std::sqrt(std::max(var, 0.0));
    frac_sum += stats.std_omega_m[si] / mean;
  }
  stats.fractional_freq_std = frac_sum / n;
  stats.mean_peak_detuning =
      std::accumulate(peak_detunings.begin(), peak_detunings.end(), 0.0) /
      trials;

  double lo = *std::min_element(peak_detunings.begin(), peak_detunings.end());
  double hi = *std::max_element(peak_detunings.begin(), peak_detunings.end());
  const int kBins = 20;
  if (hi <= lo) {
    stats.detuning_histogram.edges = {lo - 0.5, lo + 0.5};
    stats.detuning_histogram.counts = {trials};
  } else {
    stats.detuning_histogram.edges.resize(kBins + 1);
    stats.detuning_histogram.counts.assign(kBins, 0);
    for (int b = 0; b <= kBins; ++b) {
      stats.detuning_histogram.edges[static_cast<std::size_t>(b)] =
          lo + (hi - lo) * b / kBins;
    }
    for (double value : peak_detunings) {
      int b = static_cast<int>((value - lo) / (hi - lo) * kBins);
      b = std::min(std::max(b, 0), kBins - 1);
      ++stats.detuning_histogram.counts[static_cast<std::size_t>(b)];
    }
  }
  return stats;
}

}  // namespace gapcap
