#include "catqed/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace catqed {

namespace {

// Unnormalized truncated coherent amplitudes e^{-|a|^2/2} a^n/sqrt(n!),
// factorials in log space.
VectorXcd coherent_raw(cplx amplitude, int dim) {
  const double r = std::abs(amplitude);
  const double phase = std::arg(amplitude);
  VectorXcd c(dim);
  for (int n = 0; n < dim; ++n) {
    if (n > 0 && r == 0.0) {
      c(n) = 0.0;
      continue;
    }
    double lg = -0.5 * r * r - 0.5 * std::lgamma(n + 1.0);
    if (n > 0) lg += n * std::log(r);
    c(n) = std::polar(std::exp(lg), n * phase);
  }
  return c;
}

}  // namespace

AnalyticState analytic_state(const EffectiveParams& eff, double omega_e,
                             double xi, double t) {
  if (eff.delta_a == 0.0 || eff.delta_b == 0.0) {
    throw std::invalid_argument(
        "analytic_state: resonant limit (delta_a or delta_b = 0) is not "
        "covered by the closed forms");
  }
  AnalyticState st;
  st.t = t;
  const cplx fa = 1.0 - std::polar(1.0, eff.delta_a * t);
  const cplx fb = 1.0 - std::polar(1.0, eff.delta_b * t);
  st.eta = (eff.g_a / eff.delta_a) * fa;
  st.zeta = (eff.g_b / eff.delta_b) * fb;
  const double ra = eff.g_a / eff.delta_a;
  const double rb = eff.g_b / eff.delta_b;
  st.theta_a = ra * ra * (eff.delta_a * t - std::sin(eff.delta_a * t));
  st.theta_b = rb * rb * (eff.delta_b * t - std::sin(eff.delta_b * t));
  st.theta = st.theta_a + st.theta_b - omega_e * t;

  const double sth = std::sin(eff.theta_mix);
  const double cth = std::cos(eff.theta_mix);
  const double mod = xi * std::sin(eff.omega_0 * t);
  const cplx ph_plus = std::polar(1.0, -(mod + eff.omega_plus * t));
  const cplx ph_minus = std::polar(1.0, -(mod + eff.omega_minus * t));
  st.alpha = rb * sth * fb * ph_plus - ra * cth * fa * ph_minus;
  st.beta = rb * cth * fb * ph_plus + ra * sth * fa * ph_minus;

  const double overlap =
      std::exp(-(std::norm(st.alpha) + std::norm(st.beta)) / 2.0);
  const double x = std::cos(st.theta) * overlap;
  st.p_plus = 0.5 * (1.0 + x);
  st.p_minus = 1.0 - st.p_plus;  // sums to 1 exactly in IEEE arithmetic
  const double nan = std::numeric_limits<double>::quiet_NaN();
  st.m_plus = (1.0 + x) > 1e-12
                  ? 1.0 / std::sqrt(2.0 * (1.0 + x))
                  : nan;
  st.m_minus = (1.0 - x) > 1e-12
                   ? 1.0 / std::sqrt(2.0 * (1.0 - x))
                   : nan;
  return st;
}

std::pair<double, double> mean_excitations_analytic(
    const AnalyticState& state) {
  return {std::norm(state.alpha) / 2.0, std::norm(state.beta) / 2.0};
}

std::pair<double, double> detection_prob_analytic(const AnalyticState& state) {
  return {state.p_plus, state.p_minus};
}

VectorXcd cat_state(const AnalyticState& state, Sign sign, int da, int db) {
  if (da < 1 || db < 1) {
    throw std::invalid_argument("cat_state: cutoff dimensions must be >= 1");
  }
  // e^{i theta}|alpha,beta> as unnormalized Fock amplitudes, then +- |0,0>.
  VectorXcd c =
      kron_vec(coherent_raw(state.alpha, da), coherent_raw(state.beta, db));
  c *= std::polar(1.0, state.theta);
  c(0) += (sign == Sign::plus ? 1.0 : -1.0);
  const double nrm = c.norm();
  if (nrm < 1e-12) {
    throw std::runtime_error(
        "cat_state: degenerate cat (branch norm vanishes)");
  }
  return c / nrm;
}

VectorXcd full_state_analytic(const AnalyticState& state,
                              const CompositeSpace& space,
                              bool* truncation_warning) {
  const CoherentState ca = coherent_state(state.alpha, space.da());
  const CoherentState cb = coherent_state(state.beta, space.db());
  if (truncation_warning != nullptr) {
    *truncation_warning = ca.truncation_warning || cb.truncation_warning;
  }
  VectorXcd psi = VectorXcd::Zero(space.dim());
  const VectorXcd branch = kron_vec(ca.amplitudes, cb.amplitudes);
  const int de = space.two_mode_dim();
  psi.segment(de, de) =
      (std::polar(1.0, state.theta) / std::sqrt(2.0)) * branch;
  psi(space.index(Level::g, 0, 0)) = 1.0 / std::sqrt(2.0);
  return psi;
}

MatrixXcd displacement_operator_full(cplx amount, int dim) {
  if (dim < 1) {
    throw std::invalid_argument(
        "displacement_operator_full: dim must be >= 1");
  }
  // i(amount a^H - conj(amount) a) is Hermitian; D = exp(-i H_d).
  MatrixXcd hd = MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const cplx v = cplx(0.0, 1.0) * amount * std::sqrt(n + 1.0);
    hd(n + 1, n) = v;
    hd(n, n + 1) = std::conj(v);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hd);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("displacement_operator: eigensolver failed");
  }
  const VectorXd& w = es.eigenvalues();
  VectorXcd ph(dim);
  for (int k = 0; k < dim; ++k) ph(k) = std::polar(1.0, -w(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXcd displacement_operator(cplx amount, int dim, int guard) {
  if (dim < 1) {
    throw std::invalid_argument("displacement_operator: dim must be >= 1");
  }
  const double r = std::abs(amount);
  const int needed = static_cast<int>(std::ceil(r * r + 4.0 * r)) + 4;
  const int pad = std::max(guard, needed);
  return displacement_operator_full(amount, dim + pad)
      .topLeftCorner(dim, dim);
}

MatrixXcd magnus_unitary(const EffectiveParams& eff, double t, int da, int db,
                         bool* truncation_warning) {
  if (eff.delta_a == 0.0 || eff.delta_b == 0.0) {
    throw std::invalid_argument(
        "magnus_unitary: resonant limit (delta = 0) not supported");
  }
  const cplx fa = 1.0 - std::polar(1.0, eff.delta_a * t);
  const cplx fb = 1.0 - std::polar(1.0, eff.delta_b * t);
  const cplx eta = (eff.g_a / eff.delta_a) * fa;
  const cplx zeta = (eff.g_b / eff.delta_b) * fb;
  const double ra = eff.g_a / eff.delta_a;
  const double rb = eff.g_b / eff.delta_b;
  const double theta_a =
      ra * ra * (eff.delta_a * t - std::sin(eff.delta_a * t));
  const double theta_b =
      rb * rb * (eff.delta_b * t - std::sin(eff.delta_b * t));
  if (truncation_warning != nullptr) {
    const double rea = std::abs(eta), reb = std::abs(zeta);
    *truncation_warning = (rea * rea + 4.0 * rea + 4.0 > da) ||
                          (reb * reb + 4.0 * reb + 4.0 > db);
  }
  const MatrixXcd ua = displacement_operator(-eta, da);
  const MatrixXcd ub = displacement_operator(zeta, db);
  return std::polar(1.0, theta_a + theta_b) * kron_mat(ua, ub);
}

double detection_time(const EffectiveParams& eff) {
  if (eff.delta_a == 0.0) {
    throw std::invalid_argument("detection_time: delta_a must be nonzero");
  }
  return std::acos(-1.0) / std::abs(eff.delta_a);
}

double detection_time_refined(const EffectiveParams& eff, double omega_e,
                              double xi) {
  const double ts = detection_time(eff);
  const double lo = 0.8 * ts, hi = 1.2 * ts;
  auto excitation = [&](double t) {
    const AnalyticState st = analytic_state(eff, omega_e, xi, t);
    return std::norm(st.alpha) + std::norm(st.beta);
  };
  // Coarse scan to bracket the maximum, then golden-section refinement.
  const int kScan = 512;
  double best_t = ts, best = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double t = lo + (hi - lo) * i / kScan;
    const double v = excitation(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  const double dt = (hi - lo) / kScan;
  double a = std::max(lo, best_t - dt), b = std::min(hi, best_t + dt);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = excitation(c), fd = excitation(d);
  while (b - a > 1e-12 * ts) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = excitation(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = excitation(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace catqed
