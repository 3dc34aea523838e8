#pragma once

#include <string>
#include <vector>

#include "catqed/hilbert.hpp"

namespace catqed {

// Bare physical parameters. The vibronic coupling lambda is the unit of
// energy: every frequency and rate below is a dimensionless multiple of
// lambda and times are in units of 1/lambda.
struct ModelParams {
  double omega_c = 0.0;  // cavity frequency
  double omega_v = 0.0;  // vibrational frequency
  double omega_e = 0.0;  // electronic splitting
  double g = 0.0;        // cavity-vibration coupling
  double lambda = 1.0;   // vibronic coupling, fixed unit of energy
  double xi = 0.0;       // modulation amplitude (dimensionless)
  int n_a = 1;           // sideband index targeted for the cavity-like mode
  int n_b = 1;           // sideband index targeted for the vibration-like mode
  double delta_a_spec = 0.0;  // target detuning as a signed multiple of g_a
  double kappa = 0.0;    // cavity decay rate
  double gamma_v = 0.0;  // vibrational decay rate
  double gamma_e = 0.0;  // electronic decay rate

  void validate() const;  // throws std::invalid_argument on violations
};

// Floquet-sideband quantities derived from ModelParams.
struct EffectiveParams {
  double theta_mix = 0.0;     // hybrid-mode mixing angle (radians)
  double omega_plus = 0.0;    // upper hybrid-mode frequency
  double omega_minus = 0.0;   // lower hybrid-mode frequency
  double omega_0 = 0.0;       // modulation frequency
  double g_a = 0.0;           // effective conditional coupling, mode a (signed)
  double g_b = 0.0;           // effective conditional coupling, mode b (signed)
  double delta_a = 0.0;       // effective detuning, mode a (signed)
  double delta_b = 0.0;       // effective detuning, mode b (signed)
};

struct EffectiveDerivation {
  EffectiveParams eff;
  std::vector<std::string> warnings;  // RWA-condition violations, etc.
};

// Bessel function of the first kind J_order(x); supported for
// |order| <= 50 and |x| <= 50, absolute error <= 1e-12 in range.
double bessel_j(int order, double x);

// Derives the mixing angle, hybrid frequencies, effective couplings and
// detunings:
//   theta = arctan(2g/(omega_v - omega_c))/2       (principal branch)
//   omega_+- = (omega_c+omega_v)/2 +- [(omega_v-omega_c)/2 cos(2 theta)
//                                      + g sin(2 theta)]
//   g_a = lambda sin(theta) J_{-n_a}(xi),  g_b = lambda cos(theta) J_{-n_b}(xi)
//   delta_a = delta_a_spec * g_a,  omega_0 = (omega_- - delta_a)/n_a,
//   delta_b = omega_+ - n_b omega_0
// Warnings are attached when the sideband conditions
// {omega_-, omega_0} >> lambda and {omega_+, omega_0} >> lambda are not met
// (threshold 20 lambda) or when |delta_b| < 3|g_b| (the untargeted sideband is
// not far detuned).
EffectiveDerivation derive_effective(const ModelParams& params);

// Full time-dependent Hamiltonian
//   H(t) = omega_e |e><e| + omega_c a^H a + omega_v b^H b
//          + lambda |e><e| (b^H + b) + g (a^H b + a b^H)
//          + xi omega_0 cos(omega_0 t) (a^H a + b^H b)
// as a dense Hermitian matrix on the composite space (the integrator applies
// the same few bands sparsely; this dense form is the reference).
MatrixXcd full_hamiltonian(const ModelParams& params,
                           const EffectiveParams& eff, double t,
                           const CompositeSpace& space);

// RWA Hamiltonian H_e(t) (x) |e><e| with
//   H_e(t) = g_b (b^H e^{i delta_b t} + h.c.) - g_a (a^H e^{i delta_a t} + h.c.)
// and a vanishing ground-level block.
MatrixXcd rwa_hamiltonian(const EffectiveParams& eff, double t,
                          const CompositeSpace& space);

}  // namespace catqed
