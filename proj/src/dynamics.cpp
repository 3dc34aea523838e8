#include "catqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace catqed {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

// The Hamiltonian couples basis states along two constant linear-index
// offsets under the level-major layout:
//   a^H b : (s,n,j) -> (s,n+1,j-1), offset db-1
//   b^H   : (e,n,j) -> (e,n,j+1),   offset 1 (excited block only)
// Weights are indexed by the source state and zeroed where the target would
// leave the retained space (which also kills index wrap-around across rows
// and level blocks), so every apply is a plain strided loop.
struct Bands {
  int dim = 0, da = 0, db = 0, de = 0;
  int off_g = 0, off_l = 0;
  VectorXcd w_g, w_l;          // a^H b and conditional b^H weights
  VectorXcd diag_static;       // omega_e s + omega_c n + omega_v j
  VectorXcd diag_mod;          // n + j (multiplied by xi w0 cos(w0 t))
  VectorXcd w_a, w_b;          // annihilation weights for D[a] (off db), D[b] (off 1)
  VectorXcd w_anti;            // (kappa n + gamma_v j + gamma_e s)/2
};

Bands make_bands(const ModelParams& p, const CompositeSpace& sp) {
  Bands bd;
  bd.da = sp.da();
  bd.db = sp.db();
  bd.de = sp.two_mode_dim();
  bd.dim = sp.dim();
  bd.off_g = bd.db - 1;
  bd.off_l = 1;
  bd.w_g = VectorXcd::Zero(bd.dim);
  bd.w_l = VectorXcd::Zero(bd.dim);
  bd.diag_static = VectorXcd::Zero(bd.dim);
  bd.diag_mod = VectorXcd::Zero(bd.dim);
  bd.w_a = VectorXcd::Zero(bd.dim);
  bd.w_b = VectorXcd::Zero(bd.dim);
  bd.w_anti = VectorXcd::Zero(bd.dim);
  const int namax = bd.da - 1, nbmax = bd.db - 1;
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < bd.da; ++n) {
      for (int j = 0; j < bd.db; ++j) {
        const int i = (s * bd.da + n) * bd.db + j;
        bd.diag_static(i) = p.omega_e * s + p.omega_c * n + p.omega_v * j;
        bd.diag_mod(i) = n + j;
        if (n + 1 <= namax && j - 1 >= 0) {
          bd.w_g(i) = std::sqrt((n + 1.0) * j);
        }
        if (s == 1 && j + 1 <= nbmax) {
          bd.w_l(i) = std::sqrt(j + 1.0);
        }
        if (n + 1 <= namax) bd.w_a(i) = std::sqrt(n + 1.0);
        if (j + 1 <= nbmax) bd.w_b(i) = std::sqrt(j + 1.0);
        bd.w_anti(i) =
            0.5 * (p.kappa * n + p.gamma_v * j + p.gamma_e * s);
      }
    }
  }
  return bd;
}

// out += cu * B * in + cd * B^H * in with B[i+off, i] = w[i].
void band_apply(VectorXcd& out, const VectorXcd& in, const VectorXcd& w,
                int off, cplx cu, cplx cd) {
  const Eigen::Index m = in.size() - off;
  if (cu != 0.0) {
    out.segment(off, m).array() +=
        cu * (w.head(m).array() * in.head(m).array());
  }
  if (cd != 0.0) {
    out.head(m).array() +=
        cd * (w.head(m).array() * in.segment(off, m).array());
  }
}

// out += cu * B * in + cd * B^H * in (matrix from the left).
void band_left(MatrixXcd& out, const MatrixXcd& in, const VectorXcd& w,
               int off, cplx cu, cplx cd) {
  const Eigen::Index m = in.rows() - off;
  if (cu != 0.0) {
    out.middleRows(off, m).noalias() +=
        cu * (w.head(m).asDiagonal() * in.topRows(m));
  }
  if (cd != 0.0) {
    out.topRows(m).noalias() +=
        cd * (w.head(m).asDiagonal() * in.middleRows(off, m));
  }
}

// out += cu * in * B + cd * in * B^H (matrix from the right).
void band_right(MatrixXcd& out, const MatrixXcd& in, const VectorXcd& w,
                int off, cplx cu, cplx cd) {
  const Eigen::Index m = in.cols() - off;
  if (cu != 0.0) {
    out.leftCols(m).noalias() +=
        cu * (in.middleCols(off, m) * w.head(m).asDiagonal());
  }
  if (cd != 0.0) {
    out.middleCols(off, m).noalias() +=
        cd * (in.leftCols(m) * w.head(m).asDiagonal());
  }
}

struct FrameCoeffs {
  cplx c_g;  // coefficient of the a^H b band
  cplx c_l;  // coefficient of the conditional b^H band
};

FrameCoeffs rotating_coeffs(const ModelParams& p, const EffectiveParams& e,
                            double t) {
  return {p.g * std::polar(1.0, (p.omega_c - p.omega_v) * t),
          p.lambda * std::polar(1.0, p.omega_v * t +
                                         p.xi * std::sin(e.omega_0 * t))};
}

void check_samples(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("IntegratorOptions: sample_times is empty");
  }
  double prev = -1.0;
  for (double t : samples) {
    if (t < 0.0 || t <= prev) {
      throw std::invalid_argument(
          "IntegratorOptions: sample_times must be strictly increasing and "
          "start at t >= 0");
    }
    prev = t;
  }
}

double frame_fast_frequency(const ModelParams& p, const EffectiveParams& e,
                            const CompositeSpace& sp, Frame frame) {
  if (frame == Frame::lab) {
    return p.omega_e + sp.cutoffs().n_a_max * (p.omega_c + p.xi * e.omega_0);
  }
  return p.omega_v + p.xi * e.omega_0 + std::abs(p.omega_c - p.omega_v);
}

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695,
                 kE4 = kB4 - 393.0 / 640, kE5 = kB5 + 92097.0 / 339200,
                 kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

template <class State>
double error_norm(const State& err, const State& y0, const State& y1,
                  double atol, double rtol) {
  const auto sc =
      atol + rtol * y0.array().abs().max(y1.array().abs());
  return std::sqrt((err.array().abs() / sc).square().sum() /
                   static_cast<double>(err.size()));
}

// Integrates from t=0 through the sample times, invoking on_sample(t, y)
// (y in the integration frame) at each of them.
template <class State, class Rhs, class OnSample>
StepStats integrate_driver(State y, const std::vector<double>& samples,
                           const IntegratorOptions& opts, double hfix,
                           Rhs&& rhs, OnSample&& on_sample) {
  StepStats stats;
  stats.min_step = std::numeric_limits<double>::infinity();
  stats.max_step = 0.0;
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y,
        ynew = y, err = y;
  double t = 0.0;
  bool have_k1 = false;  // FSAL cache for rk45
  double h45 = hfix;
  for (double target : samples) {
    if (target <= t + 1e-15 * std::max(1.0, target)) {
      if (target == 0.0 && t == 0.0) on_sample(t, y);
      continue;
    }
    if (opts.method == Method::rk4) {
      const double span = target - t;
      const long long n =
          std::max<long long>(1, static_cast<long long>(std::ceil(
                                     span / hfix - 1e-12)));
      const double h = span / static_cast<double>(n);
      stats.min_step = std::min(stats.min_step, h);
      stats.max_step = std::max(stats.max_step, h);
      for (long long k = 0; k < n; ++k) {
        rhs(t, y, k1);
        tmp = y + (h / 2) * k1;
        rhs(t + h / 2, tmp, k2);
        tmp = y + (h / 2) * k2;
        rhs(t + h / 2, tmp, k3);
        tmp = y + h * k3;
        rhs(t + h, tmp, k4);
        y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        ++stats.steps;
      }
      t = target;  // guard against rounding accumulation
    } else {
      double h = std::min(h45, target - t);
      while (t < target - 1e-15 * std::max(1.0, target)) {
        h = std::min(h, target - t);
        if (h <= 1e-14 * std::max(1.0, t)) {
          throw std::runtime_error(
              "evolve: adaptive step underflow at t = " + std::to_string(t));
        }
        if (!have_k1) {
          rhs(t, y, k1);
          have_k1 = true;
        }
        tmp = y + h * (kA21 * k1);
        rhs(t + h / 5, tmp, k2);
        tmp = y + h * (kA31 * k1 + kA32 * k2);
        rhs(t + 3 * h / 10, tmp, k3);
        tmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
        rhs(t + 4 * h / 5, tmp, k4);
        tmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
        rhs(t + 8 * h / 9, tmp, k5);
        tmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 +
                       kA65 * k5);
        rhs(t + h, tmp, k6);
        ynew = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        rhs(t + h, ynew, k7);
        err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
                   kE7 * k7);
        const double en =
            error_norm(err, y, ynew, opts.abs_tol, opts.rel_tol);
        if (en <= 1.0) {
          t += h;
          y.swap(ynew);
          k1.swap(k7);  // FSAL
          ++stats.steps;
          stats.min_step = std::min(stats.min_step, h);
          stats.max_step = std::max(stats.max_step, h);
          const double grow =
              en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
          h *= std::max(0.2, grow);
          h45 = h;
        } else {
          ++stats.rejected;
          h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
          have_k1 = true;  // k1 still valid at unchanged t
        }
      }
      t = target;
    }
    on_sample(t, y);
    have_k1 = false;  // the callback may adjust y (e.g. re-Hermitize)
  }
  if (stats.steps == 0) stats.min_step = 0.0;
  return stats;
}

std::string breach_message(const char* kind, double t, double drift,
                           double top_a, double top_b) {
  return std::string("evolve: ") + kind + " monitor breach at t = " +
         std::to_string(t) + " (drift " + std::to_string(drift) +
         ", top-level populations " + std::to_string(top_a) + ", " +
         std::to_string(top_b) +
         "); refine the step or raise the cutoffs";
}

}  // namespace

VectorXd rotating_frame_phases(const ModelParams& params,
                               const EffectiveParams& eff,
                               const CompositeSpace& space, double t) {
  VectorXd phi(space.dim());
  const double mod = params.xi * std::sin(eff.omega_0 * t);
  const int da = space.da(), db = space.db();
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < da; ++n) {
      for (int j = 0; j < db; ++j) {
        phi((s * da + n) * db + j) =
            (params.omega_e * s + params.omega_c * n + params.omega_v * j) *
                t +
            (n + j) * mod;
      }
    }
  }
  return phi;
}

double default_step(const ModelParams& params, const EffectiveParams& eff,
                    const CompositeSpace& space, Frame frame, bool closed) {
  // The closed-system norm monitor (1e-8/period) is two orders tighter than
  // the trace monitor, so Schroedinger runs get twice the resolution.
  double divisor = closed ? 120.0 : 60.0;
  if (closed) {
    // Below omega/lambda ~ 50 the counter-rotating corrections dominate the
    // RK4 defect and the norm drift no longer scales with the frame's fast
    // frequency alone; pad the resolution so drift stays under the monitor.
    const double slow =
        std::min(params.omega_c, params.omega_v) / params.lambda;
    if (slow < 50.0) divisor *= std::pow(50.0 / slow, 1.5);
  }
  return 2.0 * kPi /
         (divisor * frame_fast_frequency(params, eff, space, frame));
}

double max_step(const ModelParams& params, const EffectiveParams& eff,
                const CompositeSpace& space, Frame frame) {
  return 2.0 * kPi / (40.0 * frame_fast_frequency(params, eff, space, frame));
}

Trajectory evolve_schrodinger(const ModelParams& params,
                              const EffectiveParams& eff,
                              const VectorXcd& psi0,
                              const CompositeSpace& space,
                              const IntegratorOptions& opts) {
  params.validate();
  if (psi0.size() != space.dim()) {
    throw std::invalid_argument("evolve_schrodinger: psi0 dimension mismatch");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("evolve_schrodinger: psi0 is not normalized");
  }
  check_samples(opts.sample_times);
  const double hfix = opts.step > 0.0
                          ? opts.step
                          : default_step(params, eff, space, opts.frame, true);
  if (opts.method == Method::rk4 &&
      hfix > max_step(params, eff, space, opts.frame) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "evolve_schrodinger: fixed step does not resolve the fastest "
        "frequency (need step <= 2*pi/(40*omega_fastest))");
  }
  const Bands bd = make_bands(params, space);
  const bool lab = opts.frame == Frame::lab;
  const double horizon = opts.sample_times.back();
  const double period = opts.period_hint > 0.0
                            ? opts.period_hint
                            : (horizon > 0.0 ? horizon : 1.0);

  auto rhs = [&](double t, const VectorXcd& in, VectorXcd& out) {
    out.setZero();
    if (lab) {
      const double m = params.xi * eff.omega_0 * std::cos(eff.omega_0 * t);
      out.array() = -kI * ((bd.diag_static.array() + m * bd.diag_mod.array()) *
                           in.array());
      band_apply(out, in, bd.w_g, bd.off_g, -kI * params.g, -kI * params.g);
      band_apply(out, in, bd.w_l, bd.off_l, -kI * params.lambda,
                 -kI * params.lambda);
    } else {
      const FrameCoeffs fc = rotating_coeffs(params, eff, t);
      band_apply(out, in, bd.w_g, bd.off_g, -kI * fc.c_g,
                 -kI * std::conj(fc.c_g));
      band_apply(out, in, bd.w_l, bd.off_l, -kI * fc.c_l,
                 -kI * std::conj(fc.c_l));
    }
  };

  Trajectory traj;
  auto on_sample = [&](double t, const VectorXcd& y) {
    VectorXcd state_lab;
    if (lab) {
      state_lab = y;
    } else {
      const VectorXd phi = rotating_frame_phases(params, eff, space, t);
      state_lab.resize(y.size());
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        state_lab(i) = std::polar(1.0, -phi(i)) * y(i);
      }
    }
    MonitorSample mon;
    mon.t = t;
    mon.drift = std::abs(state_lab.norm() - 1.0);
    for (int s = 0; s < 2; ++s) {
      mon.top_a_pop +=
          y.segment((s * bd.da + bd.da - 1) * bd.db, bd.db).squaredNorm();
      for (int n = 0; n < bd.da; ++n) {
        mon.top_b_pop += std::norm(y((s * bd.da + n) * bd.db + bd.db - 1));
      }
    }
    const double allowed = opts.thresholds.norm_drift_per_period *
                           std::max(1.0, t / period);
    mon.breach = mon.drift > allowed ||
                 mon.top_a_pop > opts.thresholds.top_level_population ||
                 mon.top_b_pop > opts.thresholds.top_level_population;
    if (mon.breach) {
      traj.any_breach = true;
      if (opts.thresholds.strict) {
        throw std::runtime_error(breach_message(
            "norm/truncation", t, mon.drift, mon.top_a_pop, mon.top_b_pop));
      }
    }
    traj.times.push_back(t);
    traj.monitors.push_back(mon);
    if (opts.store_states) traj.vec_states.push_back(state_lab);
    if (opts.vec_observer) opts.vec_observer(t, state_lab);
  };

  traj.stats = integrate_driver(psi0, opts.sample_times, opts, hfix, rhs,
                                on_sample);
  return traj;
}

Trajectory evolve_lindblad(const ModelParams& params,
                           const EffectiveParams& eff, const MatrixXcd& rho0,
                           const CompositeSpace& space,
                           const IntegratorOptions& opts) {
  params.validate();
  if (rho0.rows() != space.dim() || rho0.cols() != space.dim()) {
    throw std::invalid_argument("evolve_lindblad: rho0 dimension mismatch");
  }
  const double scale = rho0.cwiseAbs().maxCoeff();
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale)) {
    throw std::invalid_argument("evolve_lindblad: rho0 is not Hermitian");
  }
  if (std::abs(rho0.trace().real() - 1.0) > 1e-6 ||
      std::abs(rho0.trace().imag()) > 1e-10) {
    throw std::invalid_argument("evolve_lindblad: rho0 trace must be 1");
  }
  {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
        0.5 * (rho0 + rho0.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-6) {
      throw std::invalid_argument(
          "evolve_lindblad: rho0 has a negative eigenvalue beyond tolerance");
    }
  }
  check_samples(opts.sample_times);
  const double hfix = opts.step > 0.0
                          ? opts.step
                          : default_step(params, eff, space, opts.frame, false);
  if (opts.method == Method::rk4 &&
      hfix > max_step(params, eff, space, opts.frame) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "evolve_lindblad: fixed step does not resolve the fastest frequency "
        "(need step <= 2*pi/(40*omega_fastest))");
  }
  const Bands bd = make_bands(params, space);
  const bool lab = opts.frame == Frame::lab;
  const double horizon = opts.sample_times.back();
  const double period = opts.period_hint > 0.0
                            ? opts.period_hint
                            : (horizon > 0.0 ? horizon : 1.0);
  const int dim = bd.dim, de = bd.de, db = bd.db;

  auto rhs = [&](double t, const MatrixXcd& in, MatrixXcd& out) {
    out.setZero();
    cplx cg, cl;
    if (lab) {
      cg = params.g;
      cl = params.lambda;
      const double m = params.xi * eff.omega_0 * std::cos(eff.omega_0 * t);
      const VectorXcd d = bd.diag_static + m * bd.diag_mod;
      out.noalias() -= kI * (d.asDiagonal() * in);
      out.noalias() += kI * (in * d.asDiagonal());
    } else {
      const FrameCoeffs fc = rotating_coeffs(params, eff, t);
      cg = fc.c_g;
      cl = fc.c_l;
    }
    // -i H rho
    band_left(out, in, bd.w_g, bd.off_g, -kI * cg, -kI * std::conj(cg));
    band_left(out, in, bd.w_l, bd.off_l, -kI * cl, -kI * std::conj(cl));
    // +i rho H
    band_right(out, in, bd.w_g, bd.off_g, kI * cg, kI * std::conj(cg));
    band_right(out, in, bd.w_l, bd.off_l, kI * cl, kI * std::conj(cl));
    // Dissipators are invariant under the diagonal frame change.
    if (params.kappa > 0.0) {
      const Eigen::Index m = dim - db;
      out.topLeftCorner(m, m).noalias() +=
          params.kappa * (bd.w_a.head(m).asDiagonal() *
                          in.block(db, db, m, m) *
                          bd.w_a.head(m).asDiagonal());
    }
    if (params.gamma_v > 0.0) {
      const Eigen::Index m = dim - 1;
      out.topLeftCorner(m, m).noalias() +=
          params.gamma_v * (bd.w_b.head(m).asDiagonal() *
                            in.block(1, 1, m, m) *
                            bd.w_b.head(m).asDiagonal());
    }
    if (params.gamma_e > 0.0) {
      out.topLeftCorner(de, de).noalias() +=
          params.gamma_e * in.bottomRightCorner(de, de);
    }
    out.noalias() -= bd.w_anti.asDiagonal() * in;
    out.noalias() -= in * bd.w_anti.asDiagonal();
  };

  Trajectory traj;
  long long sample_count = 0;
  const long long total_samples =
      static_cast<long long>(opts.sample_times.size());
  auto on_sample = [&](double t, MatrixXcd& y) {
    y = 0.5 * (y + y.adjoint()).eval();  // enforce Hermiticity each sample
    MatrixXcd state_lab;
    if (lab) {
      state_lab = y;
    } else {
      const VectorXd phi = rotating_frame_phases(params, eff, space, t);
      VectorXcd ph(phi.size());
      for (Eigen::Index i = 0; i < phi.size(); ++i) {
        ph(i) = std::polar(1.0, -phi(i));
      }
      state_lab = ph.asDiagonal() * y * ph.conjugate().asDiagonal();
    }
    MonitorSample mon;
    mon.t = t;
    mon.drift = std::abs(y.trace().real() - 1.0);
    for (int s = 0; s < 2; ++s) {
      for (int j = 0; j < bd.db; ++j) {
        mon.top_a_pop +=
            y((s * bd.da + bd.da - 1) * bd.db + j,
              (s * bd.da + bd.da - 1) * bd.db + j)
                .real();
      }
      for (int n = 0; n < bd.da; ++n) {
        mon.top_b_pop += y((s * bd.da + n) * bd.db + bd.db - 1,
                           (s * bd.da + n) * bd.db + bd.db - 1)
                             .real();
      }
    }
    ++sample_count;
    const bool check_positivity =
        (opts.positivity_check_stride > 0 &&
         sample_count % opts.positivity_check_stride == 0) ||
        sample_count == total_samples;
    if (check_positivity) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(y, Eigen::EigenvaluesOnly);
      const double mineig = es.eigenvalues().minCoeff();
      if (mineig < opts.thresholds.min_eigenvalue) {
        throw std::runtime_error(
            "evolve_lindblad: positivity violated at t = " +
            std::to_string(t) + " (min eigenvalue " + std::to_string(mineig) +
            ")");
      }
    }
    const double allowed = opts.thresholds.trace_drift_per_period *
                           std::max(1.0, t / period);
    mon.breach = mon.drift > allowed ||
                 mon.top_a_pop > opts.thresholds.top_level_population ||
                 mon.top_b_pop > opts.thresholds.top_level_population;
    if (mon.breach) {
      traj.any_breach = true;
      if (opts.thresholds.strict) {
        throw std::runtime_error(breach_message(
            "trace/truncation", t, mon.drift, mon.top_a_pop, mon.top_b_pop));
      }
    }
    traj.times.push_back(t);
    traj.monitors.push_back(mon);
    if (opts.store_states) traj.mat_states.push_back(state_lab);
    if (opts.mat_observer) opts.mat_observer(t, state_lab);
  };

  // The driver owns a copy of the state; on_sample mutates it (symmetrize).
  MatrixXcd rho = rho0;
  traj.stats = integrate_driver(
      std::move(rho), opts.sample_times, opts, hfix, rhs,
      [&](double t, MatrixXcd& y) { on_sample(t, y); });
  return traj;
}

}  // namespace catqed
