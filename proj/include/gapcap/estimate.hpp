#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gapcap/trace.hpp"

namespace gapcap {

// Result of one least-squares or EM fit.
struct FitReport {
  std::map<std::string, double> params;
  std::map<std::string, double> std_errors;
  std::vector<std::string> param_names;  // covariance row/column order
  std::vector<std::vector<double>> covariance;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  double condition = 0.0;  // Jacobian condition estimate at the last step
  std::vector<std::string> warnings;
};

// Parametric model y = f(x; theta) with an optional analytic Jacobian.
struct LeastSquaresModel {
  std::vector<std::string> param_names;
  std::function<void(const std::vector<double>& theta,
                     const std::vector<double>& x, std::vector<double>& out)>
      evaluate;
  // J[i][j] = d f(x_i) / d theta_j. Empty means central finite differences.
  std::function<void(const std::vector<double>& theta,
                     const std::vector<double>& x,
                     std::vector<std::vector<double>>& out)>
      jacobian;
};

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;        // relative step AND gradient
  double initial_damping = 1e-3;   // Levenberg parameter
  std::vector<double> weights;     // optional, one per data point
};

// Damped least squares. Accepted iterations never increase the residual.
FitReport least_squares(const LeastSquaresModel& model, const Trace& data,
                        const std::vector<double>& init,
                        const FitOptions& options = {});

// Model builders, exposed so the analytic Jacobians stay testable against
// finite differences.
LeastSquaresModel ringdown_model();             // [gamma_tot, amplitude0, floor]
LeastSquaresModel omit_magnitude_model(int n_modes);
// omit layout: [kappa, kappa_ext, then per mode: mu_j, gamma_j, g_pump_j],
// all rad/s; x is probe detuning from the two-photon resonance in rad/s.
LeastSquaresModel stress_radius_model(double density);  // [sigma_pa], y in Hz

// Decay fit on the trailing tail_fraction of the trace.
// Params: gamma_tot (1/s), amplitude0, floor; plus q_m when omega_m > 0.
FitReport fit_ringdown(const Trace& trace, double tail_fraction = 0.7,
                       double omega_m = 0.0);

// Weighted line through (power W, Gamma_tot Hz) points.
// Params: gamma_m_hz (intercept), slope_hz_per_w.
FitReport fit_damping_vs_power(const Trace& points);

// Full cavity+windows magnitude fit. Mode frequencies are reported relative
// to the two-photon reference (params mode<j>.mu). Initial values are derived
// from the data unless init is nonempty (then it must match the layout).
FitReport fit_omit(const Trace& spectrum, int n_modes,
                   const std::vector<double>& init = {});

// One-parameter stress fit of the membrane frequency law to (R m, f Hz).
// Params: sigma_pa.
FitReport fit_stress_from_radii(const Trace& points, double density);

// Log-log linear regression. Params: amplitude, exponent.
FitReport fit_power_law(const Trace& points);

// Two-component Gaussian mixture by expectation-maximization.
// Params: w, mu1, sigma1, mu2, sigma2, pooled_std; mu1 <= mu2 on output.
struct MixtureInit {
  bool provided = false;
  double w = 0.5;
  double mu1 = 0.0;
  double sigma1 = 0.0;
  double mu2 = 0.0;
  double sigma2 = 0.0;
};
FitReport fit_gaussian_mixture2(const std::vector<double>& samples,
                                const MixtureInit& init = {});

// Summary statistics plus a Gaussian-kernel density with Silverman bandwidth.
struct BatchStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};
BatchStats batch_stats(const std::vector<double>& samples);

// Local maxima ranked by prominence (ties broken toward lower x).
struct Peak {
  std::size_t index = 0;
  double x = 0.0;
  double height = 0.0;
  double prominence = 0.0;
  double half_width = 0.0;  // full width at half prominence, x units
};
std::vector<Peak> detect_peaks(const std::vector<double>& x,
                               const std::vector<double>& y,
                               double min_prominence, int max_peaks = -1);

}  // namespace gapcap
