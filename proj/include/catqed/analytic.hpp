#pragma once

#include "catqed/hilbert.hpp"
#include "catqed/model.hpp"

namespace catqed {

// Closed-form RWA solution at a single time. alpha/beta are the lab-frame
// coherent amplitudes; eta/zeta the rotating-frame displacement amplitudes;
// theta = theta_a + theta_b - omega_e t is the accumulated relative phase
// between the displaced branch and the stationary ground branch.
struct AnalyticState {
  double t = 0.0;
  cplx alpha, beta;
  cplx eta, zeta;
  double theta_a = 0.0, theta_b = 0.0, theta = 0.0;
  double m_plus = 0.0, m_minus = 0.0;  // cat normalizations (NaN if degenerate)
  double p_plus = 1.0, p_minus = 0.0;  // analytic detection probabilities
};

// Evaluates the closed forms
//   eta  = (g_a/delta_a)(1 - e^{i delta_a t})
//   zeta = (g_b/delta_b)(1 - e^{i delta_b t})
//   theta_{a,b} = (g/delta)^2 (delta t - sin(delta t))
//   alpha = (g_b sin th / delta_b)(1-e^{i delta_b t}) e^{-i[xi sin(w0 t)+w_+ t]}
//         - (g_a cos th / delta_a)(1-e^{i delta_a t}) e^{-i[xi sin(w0 t)+w_- t]}
//   beta  = (g_b cos th / delta_b)(1-e^{i delta_b t}) e^{-i[xi sin(w0 t)+w_+ t]}
//         + (g_a sin th / delta_a)(1-e^{i delta_a t}) e^{-i[xi sin(w0 t)+w_- t]}
//   P_+- = (1 +- cos(theta) e^{-(|alpha|^2+|beta|^2)/2})/2
// omega_e and xi are passed alongside EffectiveParams because the effective
// set does not carry them and both enter the lab-frame phases. Requires
// delta_a != 0 and delta_b != 0 (the forms divide by the detunings).
AnalyticState analytic_state(const EffectiveParams& eff, double omega_e,
                             double xi, double t);

// (|alpha|^2/2, |beta|^2/2): average excitation numbers of the cavity and the
// vibration for the equal-weight branch superposition.
std::pair<double, double> mean_excitations_analytic(const AnalyticState& state);

// Entangled cat state psi_+- = M_+- (e^{i theta}|alpha,beta> +- |0,0>) on the
// two-mode space, built from the Fock amplitudes
//   C_{m,k} = e^{i theta - (|alpha|^2+|beta|^2)/2} alpha^m beta^k/sqrt(m! k!)
//             +- delta_{m0} delta_{k0},
// renormalized after truncation. Throws when the requested branch norm
// vanishes (degenerate cat).
VectorXcd cat_state(const AnalyticState& state, Sign sign, int da, int db);

// |psi(t)> = (e^{i theta}|e>|alpha>|beta> + |g>|0,0>)/sqrt(2) on the composite
// space. Coherent factors are renormalized per mode so the ground-branch
// weight stays exactly 1/sqrt(2); truncation_warning mirrors coherent_state.
VectorXcd full_state_analytic(const AnalyticState& state,
                              const CompositeSpace& space,
                              bool* truncation_warning = nullptr);

// (P_+, P_-) from the stored closed forms.
std::pair<double, double> detection_prob_analytic(const AnalyticState& state);

// Displacement operator D(amount) = exp(amount a^H - conj(amount) a) cropped
// to dim x dim. Built by exponentiating on a space enlarged by a guard band
// (at least `guard` levels, automatically widened to cover the displacement)
// so unitarity defects stay out of the cropped block.
MatrixXcd displacement_operator(cplx amount, int dim, int guard = 8);

// Displacement exponential on exactly dim levels, no guard band or cropping;
// exactly unitary on the truncated space, with matrix elements converging to
// the infinite-dimensional ones away from the top levels.
MatrixXcd displacement_operator_full(cplx amount, int dim);

// Second-order Magnus propagator of the RWA Hamiltonian on the e-level block,
//   U_e(t) = e^{i theta_a} D_a(-eta) e^{i theta_b} D_b(zeta),
// returned on the two-mode space. Sets *truncation_warning when the
// displacement pushes noticeable population into the top retained levels.
MatrixXcd magnus_unitary(const EffectiveParams& eff, double t, int da, int db,
                         bool* truncation_warning = nullptr);

// Detection time t_s = pi/|delta_a|.
double detection_time(const EffectiveParams& eff);

// Optional refinement: maximizes |alpha(t)|^2 + |beta(t)|^2 over
// [0.8, 1.2] * pi/|delta_a|.
double detection_time_refined(const EffectiveParams& eff, double omega_e,
                              double xi);

}  // namespace catqed
