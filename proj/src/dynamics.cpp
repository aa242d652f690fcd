#include "gapcap/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "gapcap/constants.hpp"
#include "gapcap/rng.hpp"

namespace gapcap {

void OptomechParams::validate() const {
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("cavity linewidth must be positive");
  }
  if (!(kappa_ext > 0.0 && kappa_ext <= kappa)) {
    throw std::invalid_argument(
        "external coupling must satisfy 0 < kappa_ext <= kappa");
  }
  if (g0 < 0.0 || n_cav < 0.0 || n_th < 0.0) {
    throw std::invalid_argument(
        "coupling, photon number, and occupancy must be nonnegative");
  }
}

void Spectrum::validate() const {
  if (detuning.size() != response.size()) {
    throw std::invalid_argument("spectrum axis/value lengths differ");
  }
  for (std::size_t i = 1; i < detuning.size(); ++i) {
    if (!(detuning[i] > detuning[i - 1])) {
      throw std::invalid_argument("spectrum axis must be strictly increasing");
    }
  }
  for (const auto& v : response) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("spectrum values must be finite");
    }
  }
}

Trace Spectrum::magnitude_trace() const {
  Trace trace;
  trace.kind = TraceKind::kOmit;
  trace.x_unit = AxisUnit::kRadPerSec;
  trace.x = detuning;
  trace.y.reserve(response.size());
  for (const auto& v : response) {
    trace.y.push_back(std::abs(v));
  }
  return trace;
}

double cooperativity(const OptomechParams& p, const MechanicalMode& mode) {
  p.validate();
  if (!(mode.gamma_m > 0.0)) {
    throw std::invalid_argument("cooperativity needs positive damping");
  }
  return 4.0 * p.g0 * p.g0 * p.n_cav / (p.kappa * mode.gamma_m);
}

double effective_damping(double gamma_m, double cooperativity) {
  if (!(gamma_m > 0.0)) {
    throw std::invalid_argument("mechanical damping must be positive");
  }
  if (cooperativity < 0.0) {
    throw std::invalid_argument("cooperativity must be nonnegative");
  }
  return gamma_m * (1.0 + cooperativity);
}

Spectrum omit_spectrum(const OptomechParams& p,
                       const std::vector<CoupledMode>& modes,
                       const std::vector<double>& detuning_axis,
                       double omega_ref) {
  p.validate();
  if (detuning_axis.empty()) {
    throw std::invalid_argument("detuning axis must be nonempty");
  }
  for (std::size_t i = 1; i < detuning_axis.size(); ++i) {
    if (!(detuning_axis[i] > detuning_axis[i - 1])) {
      throw std::invalid_argument(
          "detuning axis must be strictly increasing");
    }
  }
  if (omega_ref <= 0.0) {
    omega_ref = modes.empty() ? 0.0 : modes.front().mode.omega_m;
  }
  for (const auto& cm : modes) {
    if (!(cm.mode.omega_m > 0.0) || !(cm.mode.gamma_m > 0.0)) {
      throw std::invalid_argument(
          "coupled modes need positive frequency and damping");
    }
    if (cm.g0 < 0.0) {
      throw std::invalid_argument("mode coupling must be nonnegative");
    }
  }

  Spectrum spec;
  spec.reference = SpectrumReference::kPumpPlusOmegaM;
  spec.resolved_sideband = modes.empty() || omega_ref > p.kappa;
  spec.detuning = detuning_axis;
  spec.response.reserve(detuning_axis.size());

  const std::complex<double> i_unit(0.0, 1.0);
  for (double delta : detuning_axis) {
    std::complex<double> denom(0.5 * p.kappa, -delta);
    for (const auto& cm : modes) {
      double g_pump = cm.g0 * std::sqrt(p.n_cav);
      double mu = cm.mode.omega_m - omega_ref;
      std::complex<double> mech(0.5 * cm.mode.gamma_m, -(delta - mu));
      denom += g_pump * g_pump / mech;
    }
    spec.response.push_back(1.0 - 0.5 * p.kappa_ext / denom);
  }
  return spec;
}

Trace ringdown_trace(const MechanicalMode& mode, double c_readout,
                     const std::vector<double>& t_axis, double amplitude0,
                     double noise_floor, std::uint64_t seed,
                     const RingdownNonlinearity& nl) {
  if (!(mode.gamma_m > 0.0)) {
    throw std::invalid_argument("ringdown needs positive damping");
  }
  if (c_readout < 0.0) {
    throw std::invalid_argument("readout cooperativity must be nonnegative");
  }
  if (amplitude0 < 0.0 || noise_floor < 0.0) {
    throw std::invalid_argument("amplitude and floor must be nonnegative");
  }
  for (std::size_t i = 1; i < t_axis.size(); ++i) {
    if (!(t_axis[i] > t_axis[i - 1])) {
      throw std::invalid_argument("time axis must be strictly increasing");
    }
  }
  double gamma_tot = effective_damping(mode.gamma_m, c_readout);

  // Envelope: dE/dt = -gamma_tot E - (gamma_nl/e_sat) E^2 above the
  // threshold, pure exponential below, continuous at the crossing.
  double a = gamma_tot;
  double b = nl.enabled ? nl.gamma_nl / nl.e_sat : 0.0;
  double t_cross = 0.0;
  double e_cross = amplitude0;
  if (b > 0.0 && amplitude0 > nl.threshold && nl.threshold > 0.0) {
    double th = nl.threshold;
    double ratio = th * (a + b * amplitude0) / (amplitude0 * (a + b * th));
    t_cross = -std::log(ratio) / a;
    e_cross = th;
  }
  auto envelope = [&](double t) {
    if (b > 0.0 && t < t_cross) {
      double decay = std::exp(-a * t);
      return a * amplitude0 * decay /
             (a + b * amplitude0 * (1.0 - decay));
    }
    double t0 = b > 0.0 ? t_cross : 0.0;
    double e0 = b > 0.0 ? e_cross : amplitude0;
    return e0 * std::exp(-a * (t - t0));
  };

  CounterRng rng(seed);
  Trace trace;
  trace.kind = TraceKind::kRingdown;
  trace.x_unit = AxisUnit::kSeconds;
  trace.x = t_axis;
  trace.y.reserve(t_axis.size());
  for (std::size_t i = 0; i < t_axis.size(); ++i) {
    double value = envelope(t_axis[i]) + noise_floor;
    if (noise_floor > 0.0) {
      value += noise_floor * rng.gaussian(i);
    }
    trace.y.push_back(value);
  }
  return trace;
}

double cooling_occupancy(const OptomechParams& p, const MechanicalMode& mode,
                         const HeatingLaw& heating) {
  p.validate();
  if (!(mode.gamma_m > 0.0) || !(mode.omega_m > 0.0)) {
    throw std::invalid_argument(
        "cooling needs positive mechanical frequency and damping");
  }
  double c = cooperativity(p, mode);
  double gamma_opt = c * mode.gamma_m;
  double quarter = p.kappa / (4.0 * mode.omega_m);
  double n_min = quarter * quarter;
  double n_heat =
      heating.enabled && c > 0.0
          ? heating.amplitude * std::pow(c, heating.exponent)
          : 0.0;
  return (p.n_th * mode.gamma_m + gamma_opt * (n_min + n_heat)) /
         (mode.gamma_m + gamma_opt);
}

double force_sensitivity(const MechanicalMode& mode, double temperature_k) {
  if (!(temperature_k > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
  if (!(mode.gamma_m > 0.0) || !(mode.m_eff > 0.0)) {
    throw std::invalid_argument(
        "force sensitivity needs positive damping and mass");
  }
  double gamma_cyclic = mode.gamma_m / kTwoPi;
  return std::sqrt(2.0 * kBoltzmann * temperature_k * mode.m_eff *
                   gamma_cyclic);
}

}  // namespace gapcap
