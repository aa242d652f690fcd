#include "gapcap/estimate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gapcap/constants.hpp"
#include "gapcap/drum.hpp"
#include "gapcap/errors.hpp"

namespace gapcap {

namespace {

using Complex = std::complex<double>;

std::vector<std::vector<double>> finite_difference_jacobian(
    const LeastSquaresModel& model, const std::vector<double>& theta,
    const std::vector<double>& x) {
  std::size_t n = x.size();
  std::size_t p = theta.size();
  std::vector<std::vector<double>> jac(n, std::vector<double>(p, 0.0));
  std::vector<double> plus(n), minus(n);
  std::vector<double> shifted = theta;
  for (std::size_t j = 0; j < p; ++j) {
    double h = 1e-6 * std::max(std::abs(theta[j]), 1.0);
    shifted[j] = theta[j] + h;
    model.evaluate(shifted, x, plus);
    shifted[j] = theta[j] - h;
    model.evaluate(shifted, x, minus);
    shifted[j] = theta[j];
    for (std::size_t i = 0; i < n; ++i) {
      jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
    }
  }
  return jac;
}

double quantile(std::vector<double> sorted, double q) {
  std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = q * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

FitReport least_squares(const LeastSquaresModel& model, const Trace& data,
                        const std::vector<double>& init,
                        const FitOptions& options) {
  data.validate();
  std::size_t n = data.size();
  std::size_t p = init.size();
  if (p == 0 || model.param_names.size() != p) {
    throw std::invalid_argument(
        "init length must match the model's parameter list");
  }
  if (n < p) {
    throw std::invalid_argument("need at least one data point per parameter");
  }
  for (double v : init) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("initial parameters must be finite");
    }
  }
  std::vector<double> w_sqrt(n, 1.0);
  if (!options.weights.empty()) {
    if (options.weights.size() != n) {
      throw std::invalid_argument("weights length must match data length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (options.weights[i] < 0.0) {
        throw std::invalid_argument("weights must be nonnegative");
      }
      w_sqrt[i] = std::sqrt(options.weights[i]);
    }
  }

  // Internally the step runs in scaled parameters u, theta_j = s_j u_j,
  // so tolerances mean the same thing across 12 orders of magnitude.
  std::vector<double> scale(p);
  for (std::size_t j = 0; j < p; ++j) {
    scale[j] = std::abs(init[j]) > 0.0 ? std::abs(init[j]) : 1.0;
  }
  Eigen::VectorXd u(p);
  for (std::size_t j = 0; j < p; ++j) u(j) = init[j] / scale[j];

  auto theta_of = [&](const Eigen::VectorXd& uu) {
    std::vector<double> theta(p);
    for (std::size_t j = 0; j < p; ++j) theta[j] = uu(j) * scale[j];
    return theta;
  };
  std::vector<double> predicted(n);
  auto ssr_of = [&](const Eigen::VectorXd& uu, Eigen::VectorXd& resid) {
    model.evaluate(theta_of(uu), data.x, predicted);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = w_sqrt[i] * (data.y[i] - predicted[i]);
      resid(i) = r;
      ssr += r * r;
    }
    return ssr;
  };

  FitReport report;
  report.param_names = model.param_names;

  Eigen::VectorXd resid(n);
  double ssr = ssr_of(u, resid);
  double lambda = options.initial_damping;
  double last_rel_step = 1e300;
  double last_decrease = 1e300;
  bool stuck = false;
  Eigen::MatrixXd jac(n, p);
  int iterations = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<std::vector<double>> j_theta =
        model.jacobian ? [&] {
          std::vector<std::vector<double>> out;
          model.jacobian(theta_of(u), data.x, out);
          return out;
        }()
                       : finite_difference_jacobian(model, theta_of(u), data.x);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        jac(i, j) = w_sqrt[i] * j_theta[i][j] * scale[j];
      }
    }
    Eigen::VectorXd grad = jac.transpose() * resid;
    bool grad_ok = grad.cwiseAbs().maxCoeff() <=
                   options.tolerance * std::max(1.0, ssr);
    // At a noisy optimum the gradient bottoms out on accumulated rounding
    // and can sit just above its threshold forever; an accepted step that
    // neither moved the parameters nor reduced the residual has hit the
    // floating-point resolution of the objective and counts as converged.
    bool flat_ok = last_decrease <= options.tolerance * ssr;
    if ((grad_ok || flat_ok) && last_rel_step <= options.tolerance) {
      report.converged = true;
      break;
    }
    Eigen::MatrixXd normal = jac.transpose() * jac;
    double max_diag = normal.diagonal().cwiseAbs().maxCoeff();
    if (max_diag <= 0.0) max_diag = 1.0;

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      // The undamped Gauss-Newton step is tried first, so well-posed
      // problems (linear models in particular) land in one jump; damping
      // only enters once that step fails to reduce the residual.
      double lambda_try = attempt == 0 ? 0.0 : lambda;
      Eigen::MatrixXd damped = normal;
      for (std::size_t j = 0; j < p; ++j) {
        double d = std::max(normal(j, j), 1e-14 * max_diag);
        damped(j, j) = normal(j, j) + lambda_try * d;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd delta = ldlt.solve(grad);
        if (delta.allFinite()) {
          Eigen::VectorXd u_trial = u + delta;
          Eigen::VectorXd resid_trial(n);
          double ssr_trial = ssr_of(u_trial, resid_trial);
          if (std::isfinite(ssr_trial) && ssr_trial <= ssr) {
            double rel = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
              rel = std::max(
                  rel, std::abs(delta(j)) / std::max(1.0, std::abs(u(j))));
            }
            last_rel_step = rel;
            last_decrease = ssr - ssr_trial;
            u = u_trial;
            resid = resid_trial;
            ssr = ssr_trial;
            lambda = std::max(lambda * 0.1, 1e-12);
            accepted = true;
            break;
          }
        }
      }
      if (attempt > 0) lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    ++iterations;
    if (!accepted) {
      stuck = true;
      break;
    }
  }
  report.iterations = iterations;

  // Final Jacobian for covariance and conditioning.
  std::vector<std::vector<double>> j_theta =
      model.jacobian ? [&] {
        std::vector<std::vector<double>> out;
        model.jacobian(theta_of(u), data.x, out);
        return out;
      }()
                     : finite_difference_jacobian(model, theta_of(u), data.x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      jac(i, j) = w_sqrt[i] * j_theta[i][j] * scale[j];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(static_cast<Eigen::Index>(p) - 1);
  report.condition = smin > 0.0 ? smax / smin : 1e300;
  // A flat direction at the solution spoils the covariance, not the fit:
  // convergence is the optimizer's verdict, the warning carries the rest.
  bool singular = !(smin > 1e-14 * smax);
  if (singular) {
    report.warnings.push_back(
        "singular normal equations at the solution; covariance unreliable");
  }
  if (stuck && !report.converged) {
    report.warnings.push_back("damping exhausted without an acceptable step");
  }

  std::vector<double> theta = theta_of(u);
  for (std::size_t j = 0; j < p; ++j) {
    report.params[model.param_names[j]] = theta[j];
  }
  report.residual_rms = std::sqrt(ssr / static_cast<double>(n));

  double dof = static_cast<double>(n > p ? n - p : 1);
  double variance = ssr / dof;
  report.covariance.assign(p, std::vector<double>(p, 0.0));
  if (!singular) {
    Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    Eigen::MatrixXd cov =
        ldlt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                             static_cast<Eigen::Index>(p))) *
        variance;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        report.covariance[a][b] = cov(static_cast<Eigen::Index>(a),
                                      static_cast<Eigen::Index>(b)) *
                                  scale[a] * scale[b];
      }
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    double var_j = report.covariance[j][j];
    report.std_errors[model.param_names[j]] =
        var_j > 0.0 ? std::sqrt(var_j) : 0.0;
  }
  return report;
}

LeastSquaresModel ringdown_model() {
  LeastSquaresModel model;
  model.param_names = {"gamma_tot", "amplitude0", "floor"};
  model.evaluate = [](const std::vector<double>& theta,
                      const std::vector<double>& x, std::vector<double>& out) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = theta[1] * std::exp(-theta[0] * x[i]) + theta[2];
    }
  };
  model.jacobian = [](const std::vector<double>& theta,
                      const std::vector<double>& x,
                      std::vector<std::vector<double>>& out) {
    out.assign(x.size(), std::vector<double>(3, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      double decay = std::exp(-theta[0] * x[i]);
      out[i][0] = -theta[1] * x[i] * decay;
      out[i][1] = decay;
      out[i][2] = 1.0;
    }
  };
  return model;
}

namespace {

Complex omit_response(const std::vector<double>& theta, int n_modes,
                      double delta) {
  Complex denom(0.5 * theta[0], -delta);
  for (int j = 0; j < n_modes; ++j) {
    double mu = theta[2 + 3 * j];
    double gamma = theta[3 + 3 * j];
    double g_pump = theta[4 + 3 * j];
    Complex mech(0.5 * gamma, -(delta - mu));
    denom += g_pump * g_pump / mech;
  }
  return 1.0 - 0.5 * theta[1] / denom;
}

}  // namespace

LeastSquaresModel omit_magnitude_model(int n_modes) {
  if (n_modes < 0) {
    throw std::invalid_argument("mode count must be nonnegative");
  }
  LeastSquaresModel model;
  model.param_names = {"kappa", "kappa_ext"};
  for (int j = 0; j < n_modes; ++j) {
    std::string prefix = "mode" + std::to_string(j) + ".";
    model.param_names.push_back(prefix + "mu");
    model.param_names.push_back(prefix + "gamma");
    model.param_names.push_back(prefix + "g_pump");
  }
  model.evaluate = [n_modes](const std::vector<double>& theta,
                             const std::vector<double>& x,
                             std::vector<double>& out) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = std::abs(omit_response(theta, n_modes, x[i]));
    }
  };
  model.jacobian = [n_modes](const std::vector<double>& theta,
                             const std::vector<double>& x,
                             std::vector<std::vector<double>>& out) {
    std::size_t p = theta.size();
    out.assign(x.size(), std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      double delta = x[i];
      Complex denom(0.5 * theta[0], -delta);
      std::vector<Complex> mech(static_cast<std::size_t>(n_modes));
      for (int j = 0; j < n_modes; ++j) {
        double mu = theta[2 + 3 * j];
        double gamma = theta[3 + 3 * j];
        double g_pump = theta[4 + 3 * j];
        mech[static_cast<std::size_t>(j)] =
            Complex(0.5 * gamma, -(delta - mu));
        denom += g_pump * g_pump / mech[static_cast<std::size_t>(j)];
      }
      Complex t = 1.0 - 0.5 * theta[1] / denom;
      double mag = std::abs(t);
      Complex denom_sq = denom * denom;
      // d|t|/dp = Re(conj(t) dt/dp)/|t|; dt/dp = (kappa_ext/2) dD/dp / D^2
      // except dt/dkappa_ext = -(1/2)/D.
      auto push = [&](std::size_t col, Complex dt) {
        out[i][col] =
            mag > 1e-300 ? (std::conj(t) * dt).real() / mag : 0.0;
      };
      Complex front = 0.5 * theta[1] / denom_sq;
      push(0, front * 0.5);
      push(1, Complex(-0.5, 0.0) / denom);
      for (int j = 0; j < n_modes; ++j) {
        double g_pump = theta[4 + 3 * j];
        Complex m = mech[static_cast<std::size_t>(j)];
        Complex m_sq = m * m;
        double g_sq = g_pump * g_pump;
        push(static_cast<std::size_t>(2 + 3 * j),
             front * (-g_sq * Complex(0.0, 1.0) / m_sq));
        push(static_cast<std::size_t>(3 + 3 * j),
             front * (-0.5 * g_sq / m_sq));
        push(static_cast<std::size_t>(4 + 3 * j), front * (2.0 * g_pump / m));
      }
    }
  };
  return model;
}

LeastSquaresModel stress_radius_model(double density) {
  if (!(density > 0.0)) {
    throw std::invalid_argument("density must be positive");
  }
  LeastSquaresModel model;
  model.param_names = {"sigma_pa"};
  double alpha = bessel_j0_first_zero();
  model.evaluate = [density, alpha](const std::vector<double>& theta,
                                    const std::vector<double>& x,
                                    std::vector<double>& out) {
    out.resize(x.size());
    double speed = std::sqrt(std::max(theta[0], 0.0) / density);
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = alpha / (kTwoPi * x[i]) * speed;
    }
  };
  model.jacobian = [density, alpha](const std::vector<double>& theta,
                                    const std::vector<double>& x,
                                    std::vector<std::vector<double>>& out) {
    out.assign(x.size(), std::vector<double>(1, 0.0));
    double sigma = std::max(theta[0], 0.0);
    double speed = std::sqrt(sigma / density);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double f = alpha / (kTwoPi * x[i]) * speed;
      out[i][0] = sigma > 0.0 ? f / (2.0 * sigma) : 0.0;
    }
  };
  return model;
}

FitReport fit_ringdown(const Trace& trace, double tail_fraction,
                       double omega_m) {
  trace.validate();
  if (trace.kind != TraceKind::kRingdown) {
    throw std::invalid_argument("ringdown fit needs a ringdown trace");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must lie in (0, 1]");
  }
  std::size_t n = trace.size();
  std::size_t m =
      std::max<std::size_t>(static_cast<std::size_t>(
                                std::lround(tail_fraction * static_cast<double>(n))),
                            8);
  m = std::min(m, n);
  if (m < 8) {
    throw std::invalid_argument("ringdown fit needs at least 8 samples");
  }
  std::size_t start = n - m;

  Trace window;
  window.kind = TraceKind::kRingdown;
  window.x.assign(trace.x.begin() + static_cast<std::ptrdiff_t>(start),
                  trace.x.end());
  window.y.assign(trace.y.begin() + static_cast<std::ptrdiff_t>(start),
                  trace.y.end());

  // Deterministic starting point: floor from the last decile, decay rate
  // from the log slope between the first chunk and mid-window chunk.
  auto chunk_mean = [&](std::size_t lo, std::size_t hi, bool value_axis) {
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += value_axis ? window.y[i] : window.x[i];
    }
    return sum / static_cast<double>(hi - lo);
  };
  std::size_t tenth = std::max<std::size_t>(m / 10, 1);
  double floor0 = chunk_mean(m - tenth, m, true);
  std::size_t head = std::max<std::size_t>(m / 20, 1);
  double e_a = chunk_mean(0, head, true) - floor0;
  double t_a = chunk_mean(0, head, false);
  std::size_t mid_lo = (m * 2) / 5;
  std::size_t mid_hi = std::max<std::size_t>(m / 2, mid_lo + 1);
  double e_b = chunk_mean(mid_lo, mid_hi, true) - floor0;
  double t_b = chunk_mean(mid_lo, mid_hi, false);
  double span_t = window.x.back() - window.x.front();
  double gamma0;
  if (e_a > 0.0 && e_b > 0.0 && e_a > e_b && t_b > t_a) {
    gamma0 = std::log(e_a / e_b) / (t_b - t_a);
  } else {
    gamma0 = span_t > 0.0 ? 1.0 / span_t : 1.0;
  }
  double amp0 = e_a > 0.0 ? e_a * std::exp(gamma0 * t_a)
                          : std::max(window.y.front() - floor0, 1e-12);

  FitReport report =
      least_squares(ringdown_model(), window, {gamma0, amp0, floor0});
  double gamma = report.params.at("gamma_tot");
  if (!(gamma > 0.0)) {
    throw FitError("ringdown tail does not decay: fitted rate is not positive");
  }
  if (omega_m > 0.0) {
    double q = omega_m / gamma;
    report.params["q_m"] = q;
    report.std_errors["q_m"] = q * report.std_errors.at("gamma_tot") / gamma;
  }
  return report;
}

FitReport fit_damping_vs_power(const Trace& points) {
  points.validate();
  if (points.kind != TraceKind::kDampingVsPower) {
    throw std::invalid_argument("damping fit needs damping-vs-power points");
  }
  std::size_t n = points.size();
  if (n < 3) {
    throw std::invalid_argument("damping fit needs at least 3 points");
  }
  double sw = static_cast<double>(n);
  double sx = std::accumulate(points.x.begin(), points.x.end(), 0.0);
  double sy = std::accumulate(points.y.begin(), points.y.end(), 0.0);
  double mean_x = sx / sw;
  double mean_y = sy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = points.x[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (points.y[i] - mean_y);
  }
  if (!(sxx > 0.0)) {
    throw FitError("damping fit is rank deficient: all powers identical");
  }
  double slope = sxy / sxx;
  double intercept = mean_y - slope * mean_x;

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = points.y[i] - (intercept + slope * points.x[i]);
    ssr += r * r;
  }
  double dof = static_cast<double>(n > 2 ? n - 2 : 1);
  double variance = ssr / dof;
  double var_slope = variance / sxx;
  double var_intercept = variance * (1.0 / sw + mean_x * mean_x / sxx);
  double cov_is = -variance * mean_x / sxx;

  FitReport report;
  report.param_names = {"gamma_m_hz", "slope_hz_per_w"};
  report.params["gamma_m_hz"] = intercept;
  report.params["slope_hz_per_w"] = slope;
  report.std_errors["gamma_m_hz"] = std::sqrt(std::max(var_intercept, 0.0));
  report.std_errors["slope_hz_per_w"] = std::sqrt(std::max(var_slope, 0.0));
  report.covariance = {{var_intercept, cov_is}, {cov_is, var_slope}};
  report.residual_rms = std::sqrt(ssr / sw);
  report.iterations = 1;
  report.converged = true;
  if (intercept < 0.0) {
    report.warnings.push_back(
        "fitted intrinsic damping is negative (unphysical); reported anyway");
  }
  return report;
}

namespace {

double bare_dip_magnitude(double delta, double kappa, double kappa_ext) {
  return std::abs(1.0 - 0.5 * kappa_ext / Complex(0.5 * kappa, -delta));
}

double local_grid_step(const std::vector<double>& x, double position) {
  auto it = std::lower_bound(x.begin(), x.end(), position);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return x[1] - x[0];
  if (i >= x.size()) return x[x.size() - 1] - x[x.size() - 2];
  return x[i] - x[i - 1];
}

}  // namespace

FitReport fit_omit(const Trace& spectrum, int n_modes,
                   const std::vector<double>& init) {
  spectrum.validate();
  if (spectrum.kind != TraceKind::kOmit) {
    throw std::invalid_argument("OMIT fit needs a spectrum trace");
  }
  if (n_modes < 0) {
    throw std::invalid_argument("mode count must be nonnegative");
  }
  std::size_t n = spectrum.size();
  std::size_t p = 2 + 3 * static_cast<std::size_t>(n_modes);
  if (n < p + 2) {
    throw std::invalid_argument("OMIT fit has too few spectrum points");
  }

  std::vector<double> theta0;
  if (!init.empty()) {
    if (init.size() != p) {
      throw std::invalid_argument("OMIT init length does not match layout");
    }
    theta0 = init;
  } else {
    // Bare cavity from the broad dip: depth fixes kappa_ext/kappa, the outer
    // half-depth crossings fix kappa. Transparency windows push upward, so
    // the outer crossings see only the broad profile.
    double y_min = *std::min_element(spectrum.y.begin(), spectrum.y.end());
    double depth = 1.0 - y_min;
    if (!(depth > 1e-6)) {
      throw FitError("no cavity dip visible in the spectrum");
    }
    double level = 1.0 - 0.5 * depth;
    double x_left = spectrum.x.front();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (spectrum.y[i] >= level && spectrum.y[i + 1] < level) {
        double f = (level - spectrum.y[i]) /
                   (spectrum.y[i + 1] - spectrum.y[i]);
        x_left = spectrum.x[i] + f * (spectrum.x[i + 1] - spectrum.x[i]);
        break;
      }
    }
    double x_right = spectrum.x.back();
    for (std::size_t i = n - 1; i > 0; --i) {
      if (spectrum.y[i] >= level && spectrum.y[i - 1] < level) {
        double f = (level - spectrum.y[i]) /
                   (spectrum.y[i - 1] - spectrum.y[i]);
        x_right = spectrum.x[i] + f * (spectrum.x[i - 1] - spectrum.x[i]);
        break;
      }
    }
    double kappa0 = x_right - x_left;
    if (!(kappa0 > 0.0)) {
      throw FitError("could not measure the cavity dip width");
    }
    double kext0 = std::min(depth * kappa0, kappa0);
    theta0 = {kappa0, kext0};

    if (n_modes > 0) {
      std::vector<double> residual(n);
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = spectrum.y[i] -
                      bare_dip_magnitude(spectrum.x[i], kappa0, kext0);
      }
      std::vector<Peak> peaks =
          detect_peaks(spectrum.x, residual, 0.0, n_modes);
      if (static_cast<int>(peaks.size()) < n_modes) {
        throw FitError("found fewer transparency windows than modes");
      }
      std::sort(peaks.begin(), peaks.end(),
                [](const Peak& a, const Peak& b) { return a.x < b.x; });
      double ratio = kext0 / kappa0;
      for (const Peak& peak : peaks) {
        double dx = local_grid_step(spectrum.x, peak.x);
        if (peak.half_width < 3.0 * dx) {
          throw FitError(
              "transparency window narrower than 3 grid steps: unresolved");
        }
        double h = std::min(peak.height, 0.95 * ratio);
        double c0 = h > 0.0 ? h / (ratio - h) : 0.1;
        double gamma0 = peak.half_width / (1.0 + c0);
        double g0 = std::sqrt(c0 * kappa0 * gamma0 / 4.0);
        theta0.push_back(peak.x);
        theta0.push_back(gamma0);
        theta0.push_back(g0);
      }
    }
  }

  FitReport report =
      least_squares(omit_magnitude_model(n_modes), spectrum, theta0);

  double kappa = report.params.at("kappa");
  for (int j = 0; j < n_modes; ++j) {
    std::string prefix = "mode" + std::to_string(j) + ".";
    double gamma = report.params.at(prefix + "gamma");
    double g_pump = report.params.at(prefix + "g_pump");
    double mu = report.params.at(prefix + "mu");
    double coop = gamma > 0.0 && kappa > 0.0
                      ? 4.0 * g_pump * g_pump / (kappa * gamma)
                      : 0.0;
    double gamma_tot = gamma * (1.0 + coop);
    report.params[prefix + "cooperativity"] = coop;
    report.params[prefix + "gamma_tot"] = gamma_tot;
    double dx = local_grid_step(spectrum.x, mu);
    if (gamma_tot < 3.0 * dx) {
      throw FitError(
          "fitted transparency window narrower than 3 grid steps: unresolved");
    }
  }
  return report;
}

FitReport fit_stress_from_radii(const Trace& points, double density) {
  points.validate();
  if (points.kind != TraceKind::kFreqVsRadius) {
    throw std::invalid_argument("stress fit needs frequency-vs-radius points");
  }
  std::size_t n = points.size();
  if (n < 2) {
    throw std::invalid_argument("stress fit needs at least 2 points");
  }
  double alpha = bessel_j0_first_zero();
  double sigma0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(points.x[i] > 0.0) || !(points.y[i] > 0.0)) {
      throw std::invalid_argument(
          "stress fit needs positive radii and frequencies");
    }
    double speed = kTwoPi * points.y[i] * points.x[i] / alpha;
    sigma0 += density * speed * speed;
  }
  sigma0 /= static_cast<double>(n);

  FitReport report =
      least_squares(stress_radius_model(density), points, {sigma0});
  double sigma = report.params.at("sigma_pa");
  if (!(sigma > 0.0)) {
    throw std::domain_error("fitted stress is not positive");
  }
  report.params["relative_std_error"] =
      report.std_errors.at("sigma_pa") / sigma;
  return report;
}

FitReport fit_power_law(const Trace& points) {
  points.validate();
  if (points.kind != TraceKind::kHeating) {
    throw std::invalid_argument("power-law fit needs heating points");
  }
  std::size_t n = points.size();
  if (n < 2) {
    throw std::invalid_argument("power-law fit needs at least 2 points");
  }
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(points.x[i] > 0.0) || !(points.y[i] > 0.0)) {
      throw std::invalid_argument(
          "power-law fit needs strictly positive values");
    }
    lx[i] = std::log(points.x[i]);
    ly[i] = std::log(points.y[i]);
  }
  double mean_x = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  double mean_y = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
    sxy += (lx[i] - mean_x) * (ly[i] - mean_y);
  }
  if (!(sxx > 0.0)) {
    throw FitError("power-law fit is rank deficient: all abscissae identical");
  }
  double beta = sxy / sxx;
  double log_a = mean_y - beta * mean_x;
  double a = std::exp(log_a);

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (log_a + beta * lx[i]);
    ssr += r * r;
  }
  double dof = static_cast<double>(n > 2 ? n - 2 : 1);
  double variance = ssr / dof;
  double var_beta = variance / sxx;
  double var_log_a =
      variance * (1.0 / static_cast<double>(n) + mean_x * mean_x / sxx);

  FitReport report;
  report.param_names = {"amplitude", "exponent"};
  report.params["amplitude"] = a;
  report.params["exponent"] = beta;
  report.std_errors["amplitude"] = a * std::sqrt(std::max(var_log_a, 0.0));
  report.std_errors["exponent"] = std::sqrt(std::max(var_beta, 0.0));
  report.covariance = {{var_log_a, 0.0}, {0.0, var_beta}};
  report.residual_rms = std::sqrt(ssr / static_cast<double>(n));
  report.iterations = 1;
  report.converged = true;
  return report;
}

namespace {

double mixture_log_likelihood(const std::vector<double>& samples, double w,
                              double mu1, double s1, double mu2, double s2) {
  double ll = 0.0;
  const double norm = 1.0 / std::sqrt(kTwoPi);
  for (double x : samples) {
    double z1 = (x - mu1) / s1;
    double z2 = (x - mu2) / s2;
    double p1 = norm / s1 * std::exp(-0.5 * z1 * z1);
    double p2 = norm / s2 * std::exp(-0.5 * z2 * z2);
    double density = w * p1 + (1.0 - w) * p2;
    ll += std::log(std::max(density, 1e-300));
  }
  return ll;
}

}  // namespace

FitReport fit_gaussian_mixture2(const std::vector<double>& samples,
                                const MixtureInit& init) {
  std::size_t n = samples.size();
  if (n < 10) {
    throw std::invalid_argument("mixture fit needs at least 10 samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("mixture samples must be finite");
    }
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double span = sorted.back() - sorted.front();
  if (!(span > 0.0)) {
    throw FitError("mixture fit degenerate: all samples identical");
  }
  double sigma_floor = 1e-6 * span;

  double w, mu1, s1, mu2, s2;
  if (init.provided) {
    if (!(init.mu1 != init.mu2)) {
      throw std::invalid_argument("mixture init means must be distinct");
    }
    w = init.w;
    mu1 = init.mu1;
    s1 = init.sigma1;
    mu2 = init.mu2;
    s2 = init.sigma2;
  } else {
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                  static_cast<double>(n);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    double std_all = std::sqrt(var);
    w = 0.5;
    mu1 = quantile(sorted, 0.25);
    mu2 = quantile(sorted, 0.75);
    s1 = s2 = std::max(0.5 * std_all, sigma_floor);
    if (mu1 == mu2) {
      mu1 -= 0.25 * std_all;
      mu2 += 0.25 * std_all;
    }
  }
  if (!(s1 > 0.0) || !(s2 > 0.0)) {
    throw std::invalid_argument("mixture init widths must be positive");
  }

  const double tol = 1e-10;
  const int max_iter = 500;
  double ll_prev = mixture_log_likelihood(samples, w, mu1, s1, mu2, s2);
  int iterations = 0;
  bool converged = false;
  std::vector<double> resp(n);

  for (int iter = 0; iter < max_iter; ++iter) {
    const double norm = 1.0 / std::sqrt(kTwoPi);
    double n1 = 0.0;
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z1 = (samples[i] - mu1) / s1;
      double z2 = (samples[i] - mu2) / s2;
      double p1 = w * norm / s1 * std::exp(-0.5 * z1 * z1);
      double p2 = (1.0 - w) * norm / s2 * std::exp(-0.5 * z2 * z2);
      double total = p1 + p2;
      resp[i] = total > 0.0 ? p1 / total : 0.5;
      n1 += resp[i];
      sum1 += resp[i] * samples[i];
      sum2 += (1.0 - resp[i]) * samples[i];
    }
    double n2 = static_cast<double>(n) - n1;
    if (n1 > 1e-10) mu1 = sum1 / n1;
    if (n2 > 1e-10) mu2 = sum2 / n2;
    double v1 = 0.0;
    double v2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v1 += resp[i] * (samples[i] - mu1) * (samples[i] - mu1);
      v2 += (1.0 - resp[i]) * (samples[i] - mu2) * (samples[i] - mu2);
    }
    if (n1 > 1e-10) s1 = std::sqrt(v1 / n1);
    if (n2 > 1e-10) s2 = std::sqrt(v2 / n2);
    w = n1 / static_cast<double>(n);
    if (s1 < sigma_floor || s2 < sigma_floor) {
      throw FitError(
          "mixture component collapsed: width below 1e-6 of the data span");
    }
    ++iterations;
    double ll = mixture_log_likelihood(samples, w, mu1, s1, mu2, s2);
    if (ll < ll_prev - 1e-8 * (1.0 + std::abs(ll_prev))) {
      throw std::logic_error("EM log-likelihood decreased");
    }
    if (ll - ll_prev < tol) {
      ll_prev = ll;
      converged = true;
      break;
    }
    ll_prev = ll;
  }

  if (mu1 > mu2) {
    std::swap(mu1, mu2);
    std::swap(s1, s2);
    w = 1.0 - w;
  }
  double mean_pool = w * mu1 + (1.0 - w) * mu2;
  double second = w * (s1 * s1 + mu1 * mu1) + (1.0 - w) * (s2 * s2 + mu2 * mu2);
  double pooled = std::sqrt(std::max(second - mean_pool * mean_pool, 0.0));

  FitReport report;
  report.param_names = {"w", "mu1", "sigma1", "mu2", "sigma2"};
  report.params["w"] = w;
  report.params["mu1"] = mu1;
  report.params["sigma1"] = s1;
  report.params["mu2"] = mu2;
  report.params["sigma2"] = s2;
  report.params["pooled_std"] = pooled;
  report.iterations = iterations;
  report.converged = converged;
  report.residual_rms = 0.0;

  // Observed information by central finite differences of the log-likelihood.
  std::vector<double> theta = {w, mu1, s1, mu2, s2};
  std::vector<double> step = {1e-5, 1e-5 * span, 1e-5 * span, 1e-5 * span,
                              1e-5 * span};
  if (theta[0] - step[0] <= 0.0 || theta[0] + step[0] >= 1.0) {
    step[0] = 0.5 * std::min(theta[0], 1.0 - theta[0]);
  }
  auto ll_at = [&](const std::vector<double>& t) {
    return mixture_log_likelihood(samples, t[0], t[1], std::max(t[2], 1e-300),
                                  t[3], std::max(t[4], 1e-300));
  };
  bool hessian_ok = step[0] > 0.0;
  Eigen::MatrixXd hess(5, 5);
  if (hessian_ok) {
    double base = ll_at(theta);
    for (int a = 0; a < 5; ++a) {
      for (int b = a; b < 5; ++b) {
        std::vector<double> t = theta;
        double value;
        if (a == b) {
          t[static_cast<std::size_t>(a)] = theta[static_cast<std::size_t>(a)] +
                                           step[static_cast<std::size_t>(a)];
          double fp = ll_at(t);
          t[static_cast<std::size_t>(a)] = theta[static_cast<std::size_t>(a)] -
                                           step[static_cast<std::size_t>(a)];
          double fm = ll_at(t);
          value = (fp - 2.0 * base + fm) /
                  (step[static_cast<std::size_t>(a)] *
                   step[static_cast<std::size_t>(a)]);
        } else {
          double ha = step[static_cast<std::size_t>(a)];
          double hb = step[static_cast<std::size_t>(b)];
          t = theta;
          t[static_cast<std::size_t>(a)] += ha;
          t[static_cast<std::size_t>(b)] += hb;
          double fpp = ll_at(t);
          t = theta;
          t[static_cast<std::size_t>(a)] += ha;
          t[static_cast<std::size_t>(b)] -= hb;
          double fpm = ll_at(t);
          t = theta;
          t[static_cast<std::size_t>(a)] -= ha;
          t[static_cast<std::size_t>(b)] += hb;
          double fmp = ll_at(t);
          t = theta;
          t[static_cast<std::size_t>(a)] -= ha;
          t[static_cast<std::size_t>(b)] -= hb;
          double fmm = ll_at(t);
          value = (fpp - fpm - fmp + fmm) / (4.0 * ha * hb);
        }
        hess(a, b) = -value;
        hess(b, a) = -value;
      }
    }
  }
  report.covariance.assign(5, std::vector<double>(5, 0.0));
  bool cov_ok = false;
  if (hessian_ok) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
    if (lu.isInvertible()) {
      Eigen::MatrixXd cov = lu.inverse();
      cov_ok = cov.diagonal().minCoeff() > 0.0;
      if (cov_ok) {
        for (int a = 0; a < 5; ++a) {
          for (int b = 0; b < 5; ++b) {
            report.covariance[static_cast<std::size_t>(a)]
                             [static_cast<std::size_t>(b)] = cov(a, b);
          }
        }
      }
    }
  }
  if (cov_ok) {
    for (int a = 0; a < 5; ++a) {
      report.std_errors[report.param_names[static_cast<std::size_t>(a)]] =
          std::sqrt(report.covariance[static_cast<std::size_t>(a)]
                                     [static_cast<std::size_t>(a)]);
    }
  } else {
    for (const auto& name : report.param_names) {
      report.std_errors[name] = 0.0;
    }
    report.warnings.push_back(
        "observed information is singular; standard errors unavailable");
  }
  return report;
}

BatchStats batch_stats(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("batch statistics need at least one sample");
  }
  BatchStats stats;
  stats.min = *std::min_element(samples.begin(), samples.end());
  stats.max = *std::max_element(samples.begin(), samples.end());
  stats.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
  std::size_t n = samples.size();
  if (n < 2) {
    return stats;  // no spread, no density estimate
  }
  double var = 0.0;
  for (double v : samples) var += (v - stats.mean) * (v - stats.mean);
  var /= static_cast<double>(n - 1);
  double sd = std::sqrt(var);
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  double width = sd;
  if (iqr > 0.0) width = std::min(sd, iqr / 1.34);
  double h = 0.9 * width * std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0.0)) {
    return stats;  // all samples equal
  }
  stats.bandwidth = h;
  const int kGridPoints = 401;
  double lo = stats.min - 3.0 * h;
  double hi = stats.max + 3.0 * h;
  stats.grid.resize(kGridPoints);
  stats.density.resize(kGridPoints);
  double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(kTwoPi));
  for (int g = 0; g < kGridPoints; ++g) {
    double xg = lo + (hi - lo) * g / (kGridPoints - 1);
    double sum = 0.0;
    for (double v : samples) {
      double z = (xg - v) / h;
      sum += std::exp(-0.5 * z * z);
    }
    stats.grid[static_cast<std::size_t>(g)] = xg;
    stats.density[static_cast<std::size_t>(g)] = norm * sum;
  }
  return stats;
}

std::vector<Peak> detect_peaks(const std::vector<double>& x,
                               const std::vector<double>& y,
                               double min_prominence, int max_peaks) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("peak detection needs matching x/y lengths");
  }
  std::size_t n = x.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    // Reference level: the higher of the two key saddles flanking the peak.
    double left_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      left_min = std::min(left_min, y[j]);
    }
    double right_min = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      right_min = std::min(right_min, y[j]);
    }
    double prominence = y[i] - std::max(left_min, right_min);
    if (prominence < min_prominence) continue;

    double level = y[i] - 0.5 * prominence;
    double x_left = x.front();
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] <= level) {
        double f = (y[j + 1] - level) / (y[j + 1] - y[j]);
        x_left = x[j + 1] + f * (x[j] - x[j + 1]);
        break;
      }
      if (y[j] > y[i]) {
        x_left = x[j];
        break;
      }
    }
    double x_right = x.back();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] <= level) {
        double f = (y[j - 1] - level) / (y[j - 1] - y[j]);
        x_right = x[j - 1] + f * (x[j] - x[j - 1]);
        break;
      }
      if (y[j] > y[i]) {
        x_right = x[j];
        break;
      }
    }
    Peak peak;
    peak.index = i;
    peak.x = x[i];
    peak.height = y[i];
    peak.prominence = prominence;
    peak.half_width = x_right - x_left;
    peaks.push_back(peak);
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    return a.x < b.x;
  });
  if (max_peaks >= 0 && peaks.size() > static_cast<std::size_t>(max_peaks)) {
    peaks.resize(static_cast<std::size_t>(max_peaks));
  }
  return peaks;
}

}  // namespace gapcap
