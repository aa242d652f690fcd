#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gapcap/drum.hpp"
#include "gapcap/trace.hpp"

namespace gapcap {

// Cavity and drive parameters for one pumped electromechanical circuit.
struct OptomechParams {
  double omega_c = 0.0;    // rad/s
  double kappa = 0.0;      // rad/s, total cavity linewidth
  double kappa_ext = 0.0;  // rad/s, external coupling
  double g0 = 0.0;         // rad/s, single-photon coupling
  double n_cav = 0.0;      // intracavity photon number
  double n_th = 0.0;       // thermal phonon occupancy of the bath
  double temperature = 0.0;  // K

  void validate() const;  // requires 0 < kappa_ext <= kappa
};

enum class SpectrumReference { kCavityCenter, kPumpPlusOmegaM };

// Complex cavity response over a detuning grid.
struct Spectrum {
  std::vector<double> detuning;  // rad/s, strictly increasing
  std::vector<std::complex<double>> response;
  SpectrumReference reference = SpectrumReference::kPumpPlusOmegaM;
  bool resolved_sideband = true;  // false flags Omega_ref <= kappa

  void validate() const;
  // |response| as an omit-kind trace for the fitters.
  Trace magnitude_trace() const;
};

// One mechanical mode with its own coupling strength.
struct CoupledMode {
  MechanicalMode mode;
  double g0 = 0.0;  // rad/s
};

// C = 4 g0^2 n_cav / (kappa Gamma_m).
double cooperativity(const OptomechParams& p, const MechanicalMode& mode);

// Gamma_tot = Gamma_m (1 + C).
double effective_damping(double gamma_m, double cooperativity);

// Probe transmission with the pump on the red sideband of the reference mode:
// t(delta) = 1 - (kappa_ext/2) / (kappa/2 - i delta
//            + sum_j G_j^2 / (Gamma_j/2 - i (delta - mu_j))),
// G_j = g0_j sqrt(n_cav), mu_j = Omega_j - Omega_ref, delta measured from the
// two-photon resonance. omega_ref <= 0 means use the first mode's frequency.
Spectrum omit_spectrum(const OptomechParams& p,
                       const std::vector<CoupledMode>& modes,
                       const std::vector<double>& detuning_axis,
                       double omega_ref = -1.0);

// Optional amplitude-dependent extra decay above a threshold, default off.
struct RingdownNonlinearity {
  bool enabled = false;
  double gamma_nl = 0.0;   // rad/s extra decay rate scale
  double e_sat = 1.0;      // energy scale where the extra decay saturates
  double threshold = 0.0;  // below this energy the decay is pure exponential
};

// Energy-like ringdown record: amplitude0 exp(-Gamma_tot t) + floor + noise.
// Additive Gaussian noise with standard deviation noise_floor, keyed by the
// seed and sample index only. noise_floor = 0 gives a noise-free trace.
Trace ringdown_trace(const MechanicalMode& mode, double c_readout,
                     const std::vector<double>& t_axis, double amplitude0,
                     double noise_floor, std::uint64_t seed,
                     const RingdownNonlinearity& nl = {});

// Final phonon occupancy under red-detuned pumping, with an optional
// pump-induced cavity heating power law n_heat = A C^beta.
struct HeatingLaw {
  bool enabled = false;
  double amplitude = 0.0;  // quanta at C = 1
  double exponent = 0.0;
};
double cooling_occupancy(const OptomechParams& p, const MechanicalMode& mode,
                         const HeatingLaw& heating = {});

// sqrt(2 k_B T m_eff Gamma_m) with Gamma_m taken in cyclic units (Hz).
// The stored angular gamma_m is divided by 2 pi at this interface.
double force_sensitivity(const MechanicalMode& mode, double temperature_k);

}  // namespace gapcap
