#include <doctest.h>

#include <catqed/hilbert.hpp>
#include <catqed/model.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

using namespace catqed;

namespace {

constexpr double kPi = 3.14159265358979323846;

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

bool mentions(const std::vector<std::string>& warnings, const char* token) {
  for (const std::string& w : warnings) {
    if (w.find(token) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter validation rejects unphysical inputs") {
  ModelParams m = narrow_band_params();
  CHECK_NOTHROW(m.validate());

  ModelParams bad = m;
  bad.omega_c = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.omega_v = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.g = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.lambda = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.xi = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.n_a = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = m;
  bad.kappa = -0.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bessel_j reproduces special values and reflection identities") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  for (double x : {0.3, 1.0, 1.841, 2.5, 7.7}) {
    CHECK(bessel_j(-1, x) == -bessel_j(1, x));
    CHECK(bessel_j(-2, x) == bessel_j(2, x));
    CHECK(bessel_j(1, -x) == -bessel_j(1, x));
    CHECK(bessel_j(2, -x) == bessel_j(2, x));
  }
}

TEST_CASE("bessel_j matches reference values in the supported range") {
  CHECK(bessel_j(1, 1.841) == doctest::Approx(0.58187).epsilon(2e-4));
  CHECK(bessel_j(1, 1.841) ==
        doctest::Approx(0.58186521735382528).epsilon(1e-12));
  CHECK(bessel_j(1, 0.5) ==
        doctest::Approx(0.24226845767487389).epsilon(1e-12));
  CHECK(bessel_j(5, 2.0) ==
        doctest::Approx(0.0070396297558716855).epsilon(1e-12));
  CHECK(bessel_j(2, 5.5) ==
        doctest::Approx(-0.11731548164728748).epsilon(1e-12));
  CHECK(bessel_j(10, 30.0) ==
        doctest::Approx(-0.12987689399858877).epsilon(1e-12));
  CHECK(bessel_j(0, 50.0) ==
        doctest::Approx(0.055812327669251815).epsilon(1e-12));
  CHECK(bessel_j(20, 10.0) ==
        doctest::Approx(1.1513369247813398e-05).epsilon(1e-10));
}

TEST_CASE("bessel_j argmax of |J_1| sits at the modulation sweet spot") {
  double best_x = 0.0, best = -1.0;
  for (int k = 1; k <= 3000; ++k) {
    const double x = 1e-3 * k;
    const double v = std::abs(bessel_j(-1, x));
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(1.841).epsilon(1e-3));
}

TEST_CASE("bessel_j rejects arguments outside the supported range") {
  CHECK_THROWS_AS(bessel_j(51, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(-51, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(1, 50.5), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(1, -50.5), std::invalid_argument);
}

TEST_CASE("Jacobi-Anger expansion converges at the working amplitude") {
  const double xi = 1.841;
  for (double phi : {0.3, 1.0, 2.2, 5.9}) {
    cplx sum(0.0, 0.0);
    for (int n = -25; n <= 25; ++n) {
      sum += bessel_j(n, xi) * std::exp(cplx(0.0, n * phi));
    }
    const cplx exact = std::exp(cplx(0.0, xi * std::sin(phi)));
    CHECK(std::abs(sum - exact) < 1e-10);
  }
}

TEST_CASE("effective parameters at the narrow-band working point") {
  const EffectiveDerivation der = derive_effective(narrow_band_params());
  const EffectiveParams& e = der.eff;

  // Coarse physical values first, then the frozen references.
  CHECK(e.theta_mix == doctest::Approx(0.7356).epsilon(2e-4));
  CHECK(e.omega_plus == doctest::Approx(52.762).epsilon(1e-4));
  CHECK(e.omega_minus == doctest::Approx(47.738).epsilon(1e-4));
  CHECK(e.omega_0 == doctest::Approx(47.542).epsilon(1e-4));
  CHECK(e.g_a == doctest::Approx(-0.3904).epsilon(2e-3));
  CHECK(e.g_b == doctest::Approx(-0.4314).epsilon(2e-3));
  CHECK(e.delta_a == doctest::Approx(0.1952).epsilon(2e-3));
  CHECK(e.delta_b == doctest::Approx(5.220).epsilon(1e-3));

  CHECK(e.theta_mix == doctest::Approx(0.7355638371518674).epsilon(1e-13));
  CHECK(e.omega_plus == doctest::Approx(52.76246890528022).epsilon(1e-13));
  CHECK(e.omega_minus == doctest::Approx(47.73753109471978).epsilon(1e-13));
  CHECK(e.omega_0 == doctest::Approx(47.542313766314706).epsilon(1e-13));
  CHECK(e.g_a == doctest::Approx(-0.39043465681014133).epsilon(1e-13));
  CHECK(e.g_b == doctest::Approx(-0.4314254395927082).epsilon(1e-13));
  CHECK(e.delta_a == doctest::Approx(0.19521732840507067).epsilon(1e-13));
  CHECK(e.delta_b == doctest::Approx(5.2201551389655165).epsilon(1e-13));

  CHECK(der.warnings.empty());
}

TEST_CASE("hybrid frequencies reduce to the bare ones when g vanishes") {
  ModelParams m = narrow_band_params();
  m.g = 0.0;
  m.omega_c = 40.0;
  m.omega_v = 44.0;
  EffectiveDerivation der = derive_effective(m);
  CHECK(der.eff.theta_mix == 0.0);
  CHECK(der.eff.g_a == 0.0);
  CHECK(der.eff.omega_plus == 44.0);
  CHECK(der.eff.omega_minus == 40.0);

  // Reversed ordering: the angle lands on the negative principal branch and
  // omega_+ keeps tracking the vibration-like mode.
  m.omega_c = 44.0;
  m.omega_v = 40.0;
  der = derive_effective(m);
  CHECK(der.eff.theta_mix == 0.0);
  CHECK(der.eff.omega_plus == 40.0);
  CHECK(der.eff.omega_minus == 44.0);
}

TEST_CASE("resonant mixing angle is pi/4 with symmetric splitting") {
  ModelParams m = narrow_band_params();
  m.omega_c = 50.0;
  m.omega_v = 50.0;
  m.g = 0.5;
  const EffectiveDerivation der = derive_effective(m);
  CHECK(der.eff.theta_mix == doctest::Approx(0.25 * kPi).epsilon(1e-15));
  CHECK(der.eff.omega_plus == doctest::Approx(50.5).epsilon(1e-15));
  CHECK(der.eff.omega_minus == doctest::Approx(49.5).epsilon(1e-15));
}

TEST_CASE("derivation rejects the degenerate uncoupled point") {
  ModelParams m = narrow_band_params();
  m.omega_c = 50.0;
  m.omega_v = 50.0;
  m.g = 0.0;
  CHECK_THROWS_AS(derive_effective(m), std::invalid_argument);
}

TEST_CASE("RWA warnings fire for slow cavities") {
  ModelParams m = narrow_band_params();
  m.omega_c = 2.0;
  m.omega_v = 2.02;
  m.g = 0.1;
  const EffectiveDerivation der = derive_effective(m);
  CHECK(mentions(der.warnings, "RWA condition"));
}

TEST_CASE("untargeted-sideband warning fires when delta_b is small") {
  ModelParams m = narrow_band_params();
  m.omega_v = 50.05;
  m.g = 0.2;
  const EffectiveDerivation der = derive_effective(m);
  CHECK(mentions(der.warnings, "second sideband"));
}

TEST_CASE("scale covariance: mixing angle invariant, frequency sum exact") {
  const ModelParams base = narrow_band_params();
  const EffectiveParams e1 = derive_effective(base).eff;
  CHECK(e1.omega_plus + e1.omega_minus == base.omega_c + base.omega_v);

  ModelParams scaled = base;  // lambda stays 1: it is the unit of energy
  scaled.omega_c *= 4.0;
  scaled.omega_v *= 4.0;
  scaled.omega_e *= 4.0;
  scaled.g *= 4.0;
  const EffectiveParams e4 = derive_effective(scaled).eff;
  CHECK(e4.theta_mix == e1.theta_mix);
  CHECK(e4.omega_plus + e4.omega_minus == scaled.omega_c + scaled.omega_v);
  CHECK(e4.omega_plus == doctest::Approx(4.0 * e1.omega_plus).epsilon(1e-15));
}

TEST_CASE("full Hamiltonian diagonal carries the modulated frequencies") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});

  const MatrixXcd h0 = full_hamiltonian(m, eff, 0.0, space);
  for (int idx = 0; idx < space.dim(); ++idx) {
    const BasisLabel lab = space.unindex(idx);
    const double expected = (lab.level == Level::e ? m.omega_e : 0.0) +
                            lab.n * m.omega_c + lab.j * m.omega_v +
                            (lab.n + lab.j) * m.xi * eff.omega_0;
    CHECK(h0(idx, idx).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(h0(idx, idx).imag() == 0.0);
  }

  // At a quarter modulation period the drive vanishes.
  const MatrixXcd hq =
      full_hamiltonian(m, eff, 0.5 * kPi / eff.omega_0, space);
  for (int idx = 0; idx < space.dim(); ++idx) {
    const BasisLabel lab = space.unindex(idx);
    const double bare = (lab.level == Level::e ? m.omega_e : 0.0) +
                        lab.n * m.omega_c + lab.j * m.omega_v;
    CHECK(hq(idx, idx).real() == doctest::Approx(bare).epsilon(1e-10));
  }
}

TEST_CASE("full Hamiltonian couplings sit on the expected bands") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{2, 2});
  const MatrixXcd h = full_hamiltonian(m, eff, 0.37, space);

  // Beam-splitter band g sqrt((n+1)(j+1)): <s,n+1,j|H|s,n,j+1>.
  CHECK(h(space.index(Level::g, 1, 0), space.index(Level::g, 0, 1)).real() ==
        doctest::Approx(m.g).epsilon(1e-13));
  CHECK(h(space.index(Level::e, 2, 1), space.index(Level::e, 1, 2)).real() ==
        doctest::Approx(2.0 * m.g).epsilon(1e-13));

  // Vibronic band lambda sqrt(j+1) acts only in the excited block.
  CHECK(h(space.index(Level::e, 0, 1), space.index(Level::e, 0, 0)).real() ==
        doctest::Approx(m.lambda).epsilon(1e-13));
  CHECK(h(space.index(Level::e, 0, 2), space.index(Level::e, 0, 1)).real() ==
        doctest::Approx(std::sqrt(2.0) * m.lambda).epsilon(1e-13));
  CHECK(std::abs(h(space.index(Level::g, 0, 1), space.index(Level::g, 0, 0))) ==
        0.0);

  // No cross-level or longer-range couplings and exact Hermiticity.
  CHECK(std::abs(h(space.index(Level::e, 0, 0), space.index(Level::g, 0, 0))) ==
        0.0);
  CHECK(std::abs(h(space.index(Level::g, 2, 0), space.index(Level::g, 0, 2))) ==
        0.0);
  CHECK((h - h.adjoint().eval()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RWA Hamiltonian lives in the excited block only") {
  const ModelParams m = narrow_band_params();
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(FockCutoffs{3, 3});
  const int tm = space.two_mode_dim();

  const MatrixXcd h = rwa_hamiltonian(eff, 0.37, space);
  CHECK(h.block(0, 0, tm, tm).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.block(0, tm, tm, tm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((h - h.adjoint().eval()).cwiseAbs().maxCoeff() == 0.0);

  // At t = 0 the excited block is g_b (b^H + b) - g_a (a^H + a).
  const MatrixXcd a = annihilation(space.da());
  const MatrixXcd b = annihilation(space.db());
  const MatrixXcd ia = MatrixXcd::Identity(space.da(), space.da());
  const MatrixXcd ib = MatrixXcd::Identity(space.db(), space.db());
  const MatrixXcd expected =
      eff.g_b * kron_mat(ia, MatrixXcd(b.adjoint() + b)) -
      eff.g_a * kron_mat(MatrixXcd(a.adjoint() + a), ib);
  const MatrixXcd h0 = rwa_hamiltonian(eff, 0.0, space);
  CHECK((h0.block(tm, tm, tm, tm) - expected).cwiseAbs().maxCoeff() < 1e-13);
}

}  // TEST_SUITE
