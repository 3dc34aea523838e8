#include <doctest.h>

#include <catqed/analytic.hpp>
#include <catqed/dynamics.hpp>
#include <catqed/hilbert.hpp>
#include <catqed/model.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace catqed;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Compact working point: same structure as the narrow-band preset but with a
// slow cavity so lab-frame integrations stay cheap in tests.
ModelParams small_params() {
  ModelParams m;
  m.omega_c = 20.0;
  m.omega_v = 20.2;
  m.omega_e = 30.0;
  m.g = 1.5;
  m.xi = 0.5;
  m.n_a = 1;
  m.n_b = 1;
  m.delta_a_spec = -0.5;
  return m;
}

ModelParams narrow_band_params() {
  ModelParams m;
  m.omega_c = 50.0;
  m.omega_v = 50.5;
  m.omega_e = 250.0;
  m.g = 2.5;
  m.xi = 1.841;
  m.n_a = 1;
  m.n_b = 1;
  m.delta_a_spec = -0.5;
  return m;
}

// Normalized ground-block superposition with deterministic amplitudes.
VectorXcd ground_block_state(const CompositeSpace& space) {
  VectorXcd psi = VectorXcd::Zero(space.dim());
  for (int n = 0; n < space.da(); ++n) {
    for (int j = 0; j < space.db(); ++j) {
      psi(space.index(Level::g, n, j)) =
          cplx(1.0 + n + 2.0 * j, 0.3 * n * j - 0.1 * j);
    }
  }
  psi.normalize();
  return psi;
}

VectorXcd plus_vacuum(const CompositeSpace& space) {
  VectorXcd psi = VectorXcd::Zero(space.dim());
  const double isq = 1.0 / std::sqrt(2.0);
  psi(space.index(Level::g, 0, 0)) = isq;
  psi(space.index(Level::e, 0, 0)) = isq;
  return psi;
}

double fidelity(const VectorXcd& x, const VectorXcd& y) {
  return std::norm(x.dot(y)) / (x.squaredNorm() * y.squaredNorm());
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("rotating_frame_phases carries the diagonal integral") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  const double t = 0.37;
  const VectorXd phi = rotating_frame_phases(m, eff, space, t);
  REQUIRE(phi.size() == space.dim());
  for (int idx = 0; idx < space.dim(); ++idx) {
    const BasisLabel lab = space.unindex(idx);
    const double expected =
        ((lab.level == Level::e ? m.omega_e : 0.0) + lab.n * m.omega_c +
         lab.j * m.omega_v) *
            t +
        (lab.n + lab.j) * m.xi * std::sin(eff.omega_0 * t);
    CHECK(phi(idx) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("uncoupled dynamics accumulates the exact diagonal phases") {
  ModelParams m = small_params();
  m.g = 0.0;  // ground-block dynamics is purely diagonal
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  const VectorXcd psi0 = ground_block_state(space);

  IntegratorOptions opts;
  opts.frame = Frame::lab;
  opts.step = 1e-5;
  opts.sample_times = {0.025, 0.05};

  const Trajectory traj = evolve_schrodinger(m, eff, psi0, space, opts);
  REQUIRE(traj.vec_states.size() == 2);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    double max_err = 0.0;
    for (int idx = 0; idx < space.dim(); ++idx) {
      const BasisLabel lab = space.unindex(idx);
      const double phase = (lab.n * m.omega_c + lab.j * m.omega_v) * t +
                           (lab.n + lab.j) * m.xi * std::sin(eff.omega_0 * t);
      const cplx expected = psi0(idx) * std::polar(1.0, -phase);
      max_err = std::max(max_err, std::abs(traj.vec_states[k](idx) - expected));
    }
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("rotating frame is exact for diagonal dynamics") {
  ModelParams m = small_params();
  m.g = 0.0;
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  const VectorXcd psi0 = ground_block_state(space);

  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {0.8};

  const Trajectory traj = evolve_schrodinger(m, eff, psi0, space, opts);
  const VectorXd phi = rotating_frame_phases(m, eff, space, 0.8);
  double max_err = 0.0;
  for (int idx = 0; idx < space.dim(); ++idx) {
    const cplx expected = psi0(idx) * std::polar(1.0, -phi(idx));
    max_err = std::max(max_err, std::abs(traj.vec_states[0](idx) - expected));
  }
  CHECK(max_err < 1e-12);
}

TEST_CASE("lab and rotating frames agree on the full dynamics") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{5, 5});
  const VectorXcd psi0 = plus_vacuum(space);
  const std::vector<double> samples = {0.1, 0.3, 0.5};

  IntegratorOptions lab;
  lab.frame = Frame::lab;
  lab.step = 1e-5;
  lab.sample_times = samples;
  const Trajectory traj_lab = evolve_schrodinger(m, eff, psi0, space, lab);

  IntegratorOptions rot;
  rot.frame = Frame::rotating;
  rot.sample_times = samples;
  const Trajectory traj_rot = evolve_schrodinger(m, eff, psi0, space, rot);

  for (std::size_t k = 0; k < samples.size(); ++k) {
    CHECK(fidelity(traj_lab.vec_states[k], traj_rot.vec_states[k]) >=
          1.0 - 1e-9);
  }
  CHECK_FALSE(traj_lab.any_breach);
  CHECK_FALSE(traj_rot.any_breach);
}

TEST_CASE("closed evolution tracks the analytic cat preparation") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{12, 12});

  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {0.5, 1.0, 2.0};
  opts.period_hint = 2.0 * kPi / std::abs(eff.delta_a);

  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum(space), space, opts);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const AnalyticState s =
        analytic_state(eff, m.omega_e, m.xi, traj.times[k]);
    const VectorXcd reference = full_state_analytic(s, space);
    CHECK(fidelity(traj.vec_states[k], reference) >= 0.99);
  }
  CHECK_FALSE(traj.any_breach);
}

TEST_CASE("fixed-step integration lands exactly on the sample times") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {0.0, 0.1234, 0.377, 0.5};

  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum(space), space, opts);
  REQUIRE(traj.times.size() == opts.sample_times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    CHECK(traj.times[k] == opts.sample_times[k]);
  }
  // The t = 0 sample is the initial state itself.
  CHECK((traj.vec_states[0] - plus_vacuum(space)).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK(traj.stats.steps > 0);
  CHECK(traj.stats.min_step <= traj.stats.max_step);
  CHECK(traj.vec_states.size() == traj.times.size());
}

TEST_CASE("adaptive rk45 matches rk4 and hits the requested samples") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{4, 4});
  const std::vector<double> samples = {0.2, 0.45};

  IntegratorOptions fine;
  fine.frame = Frame::rotating;
  fine.step = 2e-5;
  fine.sample_times = samples;
  const Trajectory ref = evolve_schrodinger(m, eff, plus_vacuum(space), space, fine);

  IntegratorOptions adaptive;
  adaptive.method = Method::rk45;
  adaptive.frame = Frame::rotating;
  adaptive.rel_tol = 1e-10;
  adaptive.abs_tol = 1e-12;
  adaptive.sample_times = samples;
  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum(space), space, adaptive);

  REQUIRE(traj.times.size() == samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    CHECK(traj.times[k] == samples[k]);
    CHECK(fidelity(traj.vec_states[k], ref.vec_states[k]) >= 1.0 - 1e-9);
  }
  CHECK(traj.stats.steps > 0);
  CHECK(traj.stats.rejected >= 0);
}

TEST_CASE("rk4 exhibits fourth-order convergence") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  const VectorXcd psi0 = plus_vacuum(space);

  auto run = [&](double h) {
    IntegratorOptions opts;
    opts.frame = Frame::lab;
    opts.step = h;
    opts.sample_times = {0.2};
    return evolve_schrodinger(m, eff, psi0, space, opts).vec_states[0];
  };

  const VectorXcd ref = run(1.25e-5);
  const double err_h = (run(2e-4) - ref).norm();
  const double err_h2 = (run(1e-4) - ref).norm();
  CHECK(err_h > 1e-12);  // above rounding noise, inside the asymptotic regime
  const double ratio = err_h / err_h2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("input validation rejects malformed closed-system requests") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  IntegratorOptions opts;
  opts.sample_times = {0.1};

  VectorXcd bad = plus_vacuum(space) * 1.01;
  CHECK_THROWS_AS(evolve_schrodinger(m, eff, bad, space, opts),
                  std::invalid_argument);

  VectorXcd wrong_dim = VectorXcd::Zero(space.dim() + 1);
  wrong_dim(0) = 1.0;
  CHECK_THROWS_AS(evolve_schrodinger(m, eff, wrong_dim, space, opts),
                  std::invalid_argument);

  IntegratorOptions bad_samples;
  bad_samples.sample_times = {0.3, 0.2};
  CHECK_THROWS_AS(
      evolve_schrodinger(m, eff, plus_vacuum(space), space, bad_samples),
      std::invalid_argument);
  bad_samples.sample_times = {-0.1, 0.2};
  CHECK_THROWS_AS(
      evolve_schrodinger(m, eff, plus_vacuum(space), space, bad_samples),
      std::invalid_argument);
  bad_samples.sample_times = {};
  CHECK_THROWS_AS(
      evolve_schrodinger(m, eff, plus_vacuum(space), space, bad_samples),
      std::invalid_argument);

  IntegratorOptions too_coarse;
  too_coarse.sample_times = {0.1};
  too_coarse.step = 1.5 * max_step(m, eff, space, Frame::lab);
  CHECK_THROWS_AS(
      evolve_schrodinger(m, eff, plus_vacuum(space), space, too_coarse),
      std::invalid_argument);
}

TEST_CASE("default steps respect the ceiling and the frame split") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{26, 26});
  for (Frame frame : {Frame::lab, Frame::rotating}) {
    CHECK(default_step(m, eff, space, frame, true) <=
          max_step(m, eff, space, frame));
    CHECK(default_step(m, eff, space, frame, false) <=
          max_step(m, eff, space, frame));
    CHECK(default_step(m, eff, space, frame, true) <
          default_step(m, eff, space, frame, false));
  }
  // The rotating frame strips the electronic splitting and the Fock ladder
  // factor from the fastest retained frequency.
  CHECK(default_step(m, eff, space, Frame::rotating, true) >
        5.0 * default_step(m, eff, space, Frame::lab, true));
}

TEST_CASE("truncation monitor flags and strict mode throws") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{1, 1});  // deliberately undersized

  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {1.0};
  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum(space), space, opts);
  CHECK(traj.any_breach);
  REQUIRE_FALSE(traj.monitors.empty());
  CHECK(traj.monitors.back().breach);
  CHECK(traj.monitors.back().top_a_pop > 1e-6);

  IntegratorOptions strict = opts;
  strict.thresholds.strict = true;
  CHECK_THROWS_AS(evolve_schrodinger(m, eff, plus_vacuum(space), space, strict),
                  std::runtime_error);
}

TEST_CASE("observers stream states when storage is disabled") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});

  int calls = 0;
  double last_norm = 0.0;
  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {0.1, 0.2, 0.3};
  opts.store_states = false;
  opts.vec_observer = [&](double, const VectorXcd& psi) {
    ++calls;
    last_norm = psi.norm();
  };

  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum(space), space, opts);
  CHECK(calls == 3);
  CHECK(traj.vec_states.empty());
  CHECK(traj.times.size() == 3);
  CHECK(last_norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lindblad with zero rates reproduces the closed projector") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{4, 4});
  const VectorXcd psi0 = plus_vacuum(space);
  const std::vector<double> samples = {0.2, 0.4};

  IntegratorOptions vopts;
  vopts.frame = Frame::rotating;
  vopts.step = 5e-4;  // matched steps keep both defects well under the bound
  vopts.sample_times = samples;
  const Trajectory vtraj = evolve_schrodinger(m, eff, psi0, space, vopts);

  IntegratorOptions mopts;
  mopts.frame = Frame::rotating;
  mopts.step = 5e-4;
  mopts.sample_times = samples;
  const MatrixXcd rho0 = psi0 * psi0.adjoint();
  const Trajectory mtraj = evolve_lindblad(m, eff, rho0, space, mopts);

  REQUIRE(mtraj.mat_states.size() == samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const MatrixXcd projector =
        vtraj.vec_states[k] * vtraj.vec_states[k].adjoint();
    CHECK((mtraj.mat_states[k] - projector).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((mtraj.mat_states[k] - mtraj.mat_states[k].adjoint().eval())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(mtraj.mat_states[k].trace().real() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_FALSE(mtraj.any_breach);
}

TEST_CASE("a decoupled cavity decays exponentially under kappa") {
  ModelParams m = small_params();
  m.g = 0.0;
  m.kappa = 0.2;
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});

  // (|g,0,0> + |g,1,0>)/sqrt(2): checks population decay e^{-kappa t} and
  // coherence decay e^{-kappa t/2} in one run.
  VectorXcd psi0 = VectorXcd::Zero(space.dim());
  psi0(space.index(Level::g, 0, 0)) = 1.0 / std::sqrt(2.0);
  psi0(space.index(Level::g, 1, 0)) = 1.0 / std::sqrt(2.0);
  const MatrixXcd rho0 = psi0 * psi0.adjoint();

  IntegratorOptions opts;
  opts.frame = Frame::rotating;
  opts.sample_times = {1.0, 2.5, 5.0};
  const Trajectory traj = evolve_lindblad(m, eff, rho0, space, opts);

  const int i0 = space.index(Level::g, 0, 0);
  const int i1 = space.index(Level::g, 1, 0);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const MatrixXcd& rho = traj.mat_states[k];
    CHECK(rho(i1, i1).real() ==
          doctest::Approx(0.5 * std::exp(-m.kappa * t)).epsilon(2e-6));
    CHECK(rho(i0, i0).real() ==
          doctest::Approx(1.0 - 0.5 * std::exp(-m.kappa * t)).epsilon(2e-6));
    CHECK(std::abs(rho(i0, i1)) ==
          doctest::Approx(0.5 * std::exp(-0.5 * m.kappa * t)).epsilon(2e-6));
  }
}

TEST_CASE("lindblad validates the initial density matrix") {
  const ModelParams m = small_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  IntegratorOptions opts;
  opts.sample_times = {0.1};
  opts.frame = Frame::rotating;

  const VectorXcd psi0 = plus_vacuum(space);
  MatrixXcd rho = psi0 * psi0.adjoint();
  CHECK_THROWS_AS(evolve_lindblad(m, eff, 2.0 * rho, space, opts),
                  std::invalid_argument);

  MatrixXcd non_hermitian = rho;
  non_hermitian(0, 1) += cplx(0.0, 1e-3);
  CHECK_THROWS_AS(evolve_lindblad(m, eff, non_hermitian, space, opts),
                  std::invalid_argument);

  CHECK_THROWS_AS(
      evolve_lindblad(m, eff, MatrixXcd::Identity(3, 3), space, opts),
      std::invalid_argument);
}

}  // TEST_SUITE
