#include "catqed/model.hpp"

#include <cmath>
#include <stdexcept>

namespace catqed {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ModelParams::validate() const {
  if (!(omega_c > 0.0) || !(omega_v > 0.0) || !(omega_e > 0.0)) {
    throw std::invalid_argument("ModelParams: frequencies must be positive");
  }
  if (g < 0.0) {
    throw std::invalid_argument("ModelParams: g must be >= 0");
  }
  if (lambda != 1.0) {
    throw std::invalid_argument(
        "ModelParams: lambda is the unit of energy and must equal 1");
  }
  if (!(xi > 0.0)) {
    throw std::invalid_argument("ModelParams: xi must be positive");
  }
  if (n_a < 1 || n_b < 1) {
    throw std::invalid_argument("ModelParams: sideband indices must be >= 1");
  }
  if (kappa < 0.0 || gamma_v < 0.0 || gamma_e < 0.0) {
    throw std::invalid_argument("ModelParams: decay rates must be >= 0");
  }
}

double bessel_j(int order, double x) {
  if (std::abs(order) > 50 || std::abs(x) > 50.0) {
    throw std::invalid_argument(
        "bessel_j: supported range is |order| <= 50, |x| <= 50");
  }
  double sign = 1.0;
  if (order < 0) {
    order = -order;
    if (order % 2 != 0) sign = -sign;  // J_{-n} = (-1)^n J_n
  }
  if (x < 0.0) {
    x = -x;
    if (order % 2 != 0) sign = -sign;  // J_n(-x) = (-1)^n J_n(x)
  }
  return sign * std::cyl_bessel_j(static_cast<double>(order), x);
}

EffectiveDerivation derive_effective(const ModelParams& params) {
  params.validate();
  if (params.g == 0.0 && params.omega_v == params.omega_c) {
    throw std::invalid_argument(
        "derive_effective: mixing angle undefined for omega_v == omega_c "
        "with g == 0");
  }
  EffectiveDerivation out;
  EffectiveParams& e = out.eff;
  // Principal arctan branch: the angle goes negative (and g_a flips sign)
  // when omega_v < omega_c; all downstream formulas stay sign-consistent.
  e.theta_mix =
      params.omega_v == params.omega_c
          ? 0.25 * kPi
          : 0.5 * std::atan(2.0 * params.g /
                            (params.omega_v - params.omega_c));
  const double sum = params.omega_c + params.omega_v;
  const double split = 0.5 * (params.omega_v - params.omega_c) *
                           std::cos(2.0 * e.theta_mix) +
                       params.g * std::sin(2.0 * e.theta_mix);
  e.omega_plus = 0.5 * sum + split;
  // Subtracting from the sum (rather than mean - split) keeps the identity
  // omega_plus + omega_minus == omega_c + omega_v exact in floating point
  // whenever both hybrid frequencies are positive (Sterbenz subtraction).
  e.omega_minus = sum - e.omega_plus;
  e.g_a = params.lambda * std::sin(e.theta_mix) * bessel_j(-params.n_a, params.xi);
  e.g_b = params.lambda * std::cos(e.theta_mix) * bessel_j(-params.n_b, params.xi);
  e.delta_a = params.delta_a_spec * e.g_a;
  e.omega_0 = (e.omega_minus - e.delta_a) / params.n_a;
  e.delta_b = e.omega_plus - params.n_b * e.omega_0;

  const double lam = params.lambda;
  if (std::min(e.omega_minus, e.omega_0) < 20.0 * lam) {
    out.warnings.push_back(
        "RWA condition {omega_minus, omega_0} >> lambda is not satisfied "
        "(need at least ~20 lambda)");
  }
  if (std::min(e.omega_plus, e.omega_0) < 20.0 * lam) {
    out.warnings.push_back(
        "RWA condition {omega_plus, omega_0} >> lambda is not satisfied "
        "(need at least ~20 lambda)");
  }
  if (std::abs(e.delta_b) < 3.0 * std::abs(e.g_b)) {
    out.warnings.push_back(
        "second sideband is not far detuned: |delta_b| < 3 |g_b|");
  }
  return out;
}

MatrixXcd full_hamiltonian(const ModelParams& params,
                           const EffectiveParams& eff, double t,
                           const CompositeSpace& space) {
  const int da = space.da(), db = space.db();
  MatrixXcd h = MatrixXcd::Zero(space.dim(), space.dim());
  const double mod = params.xi * eff.omega_0 * std::cos(eff.omega_0 * t);
  for (int s = 0; s < 2; ++s) {
    const Level level = static_cast<Level>(s);
    for (int n = 0; n < da; ++n) {
      for (int j = 0; j < db; ++j) {
        const int i = space.index(level, n, j);
        h(i, i) = params.omega_e * s + params.omega_c * n + params.omega_v * j +
                  mod * (n + j);
        if (n + 1 < da && j - 1 >= 0) {  // g a^H b + h.c.
          const int k = space.index(level, n + 1, j - 1);
          const double w = params.g * std::sqrt((n + 1.0) * j);
          h(k, i) += w;
          h(i, k) += w;
        }
        if (s == 1 && j + 1 < db) {  // lambda |e><e| (b^H + b)
          const int k = space.index(level, n, j + 1);
          const double w = params.lambda * std::sqrt(j + 1.0);
          h(k, i) += w;
          h(i, k) += w;
        }
      }
    }
  }
  return h;
}

MatrixXcd rwa_hamiltonian(const EffectiveParams& eff, double t,
                          const CompositeSpace& space) {
  const int da = space.da(), db = space.db();
  MatrixXcd h = MatrixXcd::Zero(space.dim(), space.dim());
  const cplx pa = eff.g_a * std::polar(1.0, eff.delta_a * t);
  const cplx pb = eff.g_b * std::polar(1.0, eff.delta_b * t);
  for (int n = 0; n < da; ++n) {
    for (int j = 0; j < db; ++j) {
      const int i = space.index(Level::e, n, j);
      if (j + 1 < db) {  // g_b b^H e^{i delta_b t} + h.c.
        const int k = space.index(Level::e, n, j + 1);
        const cplx w = pb * std::sqrt(j + 1.0);
        h(k, i) += w;
        h(i, k) += std::conj(w);
      }
      if (n + 1 < da) {  // -g_a a^H e^{i delta_a t} + h.c.
        const int k = space.index(Level::e, n + 1, j);
        const cplx w = -pa * std::sqrt(n + 1.0);
        h(k, i) += w;
        h(i, k) += std::conj(w);
      }
    }
  }
  return h;
}

}  // namespace catqed
