#include "catqed/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "catqed/analytic.hpp"

namespace catqed {

namespace {

constexpr double kPi = 3.14159265358979323846;
// A state whose top Fock levels carry more population than this cannot give
// trustworthy displaced-parity values.
constexpr double kWignerTruncationTol = 1e-6;

void check_two_mode(Eigen::Index size, int da, int db, const char* who) {
  if (da < 1 || db < 1 || size != static_cast<Eigen::Index>(da) * db) {
    throw std::invalid_argument(std::string(who) +
                                ": state is not on the da*db two-mode space");
  }
}

// coeff(m, k) = psi[m*db + k], the Schmidt/coefficient matrix of the state.
MatrixXcd two_mode_coefficients(const VectorXcd& psi, int da, int db) {
  const Eigen::Map<const MatrixXcd> t(psi.data(), db, da);
  return t.transpose();
}

// Displaced parity kernel K(s) = D(s) P D^H(s) = D(2s) P, cropped to d x d.
// The crop is exact for expectations against states truncated at d because
// the retained matrix elements are the infinite-dimensional ones (up to the
// guard-band accuracy of the padded exponential).
MatrixXcd parity_kernel(cplx s, int d) {
  const cplx two_s = 2.0 * s;
  const double r = std::abs(two_s);
  const int pad = static_cast<int>(std::ceil(r * r + 4.0 * r)) + 8;
  const MatrixXcd dfull = displacement_operator_full(two_s, d + pad);
  MatrixXcd k(d, d);
  for (int n = 0; n < d; ++n) {
    k.col(n) = ((n % 2 == 0) ? 1.0 : -1.0) * dfull.col(n).head(d);
  }
  return k;
}

void check_wigner_truncation(const MatrixXcd& coeff) {
  const double top = coeff.row(coeff.rows() - 1).squaredNorm() +
                     coeff.col(coeff.cols() - 1).squaredNorm();
  if (top > kWignerTruncationTol) {
    throw std::runtime_error(
        "joint_wigner: top Fock levels carry population " +
        std::to_string(top) + "; raise the cutoffs before evaluating");
  }
}

void check_wigner_truncation_density(const MatrixXcd& rho, int da, int db) {
  double top = 0.0;
  for (int k = 0; k < db; ++k) {
    top += rho((da - 1) * db + k, (da - 1) * db + k).real();
  }
  for (int m = 0; m < da; ++m) {
    top += rho(m * db + db - 1, m * db + db - 1).real();
  }
  if (top > kWignerTruncationTol) {
    throw std::runtime_error(
        "joint_wigner: top Fock levels carry population " +
        std::to_string(top) + "; raise the cutoffs before evaluating");
  }
}

// W for a pure state given precomputed kernels: (4/pi^2) sum conj(C) .* (Ka C Kb^T).
double wigner_value_pure(const MatrixXcd& coeff, const MatrixXcd& ka_coeff,
                         const MatrixXcd& kb) {
  const cplx w = (coeff.conjugate().cwiseProduct(ka_coeff * kb.transpose()))
                     .sum();
  return (4.0 / (kPi * kPi)) * w.real();
}

double check_real(cplx w, const char* who) {
  if (std::abs(w.imag()) > 1e-8) {
    throw std::runtime_error(std::string(who) +
                             ": imaginary residue " +
                             std::to_string(w.imag()) + " exceeds tolerance");
  }
  return w.real();
}

double trace_norm_log2(const VectorXd& magnitudes) {
  return std::log2(magnitudes.sum());
}

}  // namespace

ProjectionResult project_electronic(const VectorXcd& psi,
                                    const CompositeSpace& space, Sign sign) {
  if (psi.size() != space.dim()) {
    throw std::invalid_argument("project_electronic: dimension mismatch");
  }
  const int de = space.two_mode_dim();
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  // Level-major layout: |g> slab first, |e> slab second.
  VectorXcd branch =
      (psi.segment(de, de) + s * psi.head(de)) / std::sqrt(2.0);
  ProjectionResult out;
  out.sign = sign;
  out.probability = branch.squaredNorm();
  if (out.probability < 1e-12) {
    throw std::runtime_error(
        "project_electronic: branch probability below 1e-12, collapsed state "
        "undefined");
  }
  out.collapsed_vec = branch / std::sqrt(out.probability);
  return out;
}

ProjectionResult project_electronic(const MatrixXcd& rho,
                                    const CompositeSpace& space, Sign sign) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw std::invalid_argument("project_electronic: dimension mismatch");
  }
  const int de = space.two_mode_dim();
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  MatrixXcd branch = 0.5 * (rho.block(de, de, de, de) +
                            rho.topLeftCorner(de, de) +
                            s * rho.block(de, 0, de, de) +
                            s * rho.block(0, de, de, de));
  ProjectionResult out;
  out.sign = sign;
  out.probability = branch.trace().real();
  if (out.probability < 1e-12) {
    throw std::runtime_error(
        "project_electronic: branch probability below 1e-12, collapsed state "
        "undefined");
  }
  out.collapsed_mat = branch / out.probability;
  return out;
}

double fidelity_pure(const VectorXcd& x, const VectorXcd& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("fidelity_pure: dimension mismatch");
  }
  return std::norm(x.dot(y));
}

double fidelity_mixed(const VectorXcd& psi, const MatrixXcd& rho) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) {
    throw std::invalid_argument("fidelity_mixed: dimension mismatch");
  }
  return psi.dot(rho * psi).real();
}

double log_negativity(const MatrixXcd& rho_two_mode, int da, int db) {
  check_two_mode(rho_two_mode.rows(), da, db, "log_negativity");
  const double scale = rho_two_mode.cwiseAbs().maxCoeff();
  if ((rho_two_mode - rho_two_mode.adjoint()).cwiseAbs().maxCoeff() >
      1e-8 * (1.0 + scale)) {
    throw std::invalid_argument("log_negativity: input is not Hermitian");
  }
  const MatrixXcd pt = partial_transpose(rho_two_mode, da, db, Mode::b);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(pt, Eigen::EigenvaluesOnly);
  return trace_norm_log2(es.eigenvalues().cwiseAbs());
}

double log_negativity_svd(const MatrixXcd& rho_two_mode, int da, int db) {
  check_two_mode(rho_two_mode.rows(), da, db, "log_negativity_svd");
  const MatrixXcd pt = partial_transpose(rho_two_mode, da, db, Mode::b);
  Eigen::BDCSVD<MatrixXcd> svd(pt);
  return trace_norm_log2(svd.singularValues());
}

double log_negativity_pure(const VectorXcd& psi_two_mode, int da, int db) {
  check_two_mode(psi_two_mode.size(), da, db, "log_negativity_pure");
  // Schmidt coefficients are the singular values of the coefficient matrix.
  Eigen::BDCSVD<MatrixXcd> svd(two_mode_coefficients(psi_two_mode, da, db));
  return 2.0 * std::log2(svd.singularValues().sum());
}

WignerGrid joint_wigner(const VectorXcd& psi_two_mode, int da, int db,
                        WignerGrid grid) {
  check_two_mode(psi_two_mode.size(), da, db, "joint_wigner");
  const MatrixXcd coeff = two_mode_coefficients(psi_two_mode, da, db);
  check_wigner_truncation(coeff);
  std::vector<MatrixXcd> ka_coeff;
  ka_coeff.reserve(grid.zeta.size());
  for (cplx z : grid.zeta) ka_coeff.push_back(parity_kernel(z, da) * coeff);
  std::vector<MatrixXcd> kb;
  kb.reserve(grid.chi.size());
  for (cplx c : grid.chi) kb.push_back(parity_kernel(c, db));
  grid.values.resize(static_cast<Eigen::Index>(grid.zeta.size()),
                     static_cast<Eigen::Index>(grid.chi.size()));
  for (size_t i = 0; i < grid.zeta.size(); ++i) {
    for (size_t j = 0; j < grid.chi.size(); ++j) {
      grid.values(i, j) = wigner_value_pure(coeff, ka_coeff[i], kb[j]);
    }
  }
  return grid;
}

WignerGrid joint_wigner(const MatrixXcd& rho_two_mode, int da, int db,
                        WignerGrid grid) {
  check_two_mode(rho_two_mode.rows(), da, db, "joint_wigner");
  check_wigner_truncation_density(rho_two_mode, da, db);
  std::vector<MatrixXcd> ka;
  ka.reserve(grid.zeta.size());
  for (cplx z : grid.zeta) ka.push_back(parity_kernel(z, da));
  grid.values.resize(static_cast<Eigen::Index>(grid.zeta.size()),
                     static_cast<Eigen::Index>(grid.chi.size()));
  MatrixXcd g(da, da);
  for (size_t j = 0; j < grid.chi.size(); ++j) {
    const MatrixXcd kb = parity_kernel(grid.chi[j], db);
    // g(m, n) = Tr(rho_block(m, n) * K_b); W = (4/pi^2) Tr(K_a g).
    for (int m = 0; m < da; ++m) {
      for (int n = 0; n < da; ++n) {
        g(m, n) =
            (rho_two_mode.block(m * db, n * db, db, db) * kb).trace();
      }
    }
    for (size_t i = 0; i < grid.zeta.size(); ++i) {
      const cplx w = (ka[i] * g).trace();
      grid.values(i, j) =
          (4.0 / (kPi * kPi)) * check_real(w, "joint_wigner");
    }
  }
  return grid;
}

VectorXd joint_wigner_points(const VectorXcd& psi_two_mode, int da, int db,
                             const std::vector<cplx>& zeta,
                             const std::vector<cplx>& chi) {
  if (zeta.size() != chi.size()) {
    throw std::invalid_argument(
        "joint_wigner_points: coordinate lists differ in length");
  }
  check_two_mode(psi_two_mode.size(), da, db, "joint_wigner_points");
  const MatrixXcd coeff = two_mode_coefficients(psi_two_mode, da, db);
  check_wigner_truncation(coeff);
  VectorXd out(static_cast<Eigen::Index>(zeta.size()));
  for (size_t i = 0; i < zeta.size(); ++i) {
    out(i) = wigner_value_pure(coeff, parity_kernel(zeta[i], da) * coeff,
                               parity_kernel(chi[i], db));
  }
  return out;
}

VectorXd joint_wigner_points(const MatrixXcd& rho_two_mode, int da, int db,
                             const std::vector<cplx>& zeta,
                             const std::vector<cplx>& chi) {
  if (zeta.size() != chi.size()) {
    throw std::invalid_argument(
        "joint_wigner_points: coordinate lists differ in length");
  }
  check_two_mode(rho_two_mode.rows(), da, db, "joint_wigner_points");
  check_wigner_truncation_density(rho_two_mode, da, db);
  VectorXd out(static_cast<Eigen::Index>(zeta.size()));
  MatrixXcd g(da, da);
  for (size_t i = 0; i < zeta.size(); ++i) {
    const MatrixXcd ka = parity_kernel(zeta[i], da);
    const MatrixXcd kb = parity_kernel(chi[i], db);
    for (int m = 0; m < da; ++m) {
      for (int n = 0; n < da; ++n) {
        g(m, n) =
            (rho_two_mode.block(m * db, n * db, db, db) * kb).trace();
      }
    }
    const cplx w = (ka * g).trace();
    out(i) = (4.0 / (kPi * kPi)) * check_real(w, "joint_wigner_points");
  }
  return out;
}

std::pair<double, double> mean_excitations(const VectorXcd& psi,
                                           const CompositeSpace& space) {
  if (psi.size() != space.dim()) {
    throw std::invalid_argument("mean_excitations: dimension mismatch");
  }
  const int da = space.da(), db = space.db();
  double na = 0.0, nb = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < da; ++n) {
      for (int j = 0; j < db; ++j) {
        const double p = std::norm(psi((s * da + n) * db + j));
        na += n * p;
        nb += j * p;
      }
    }
  }
  return {na, nb};
}

std::pair<double, double> mean_excitations(const MatrixXcd& rho,
                                           const CompositeSpace& space) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw std::invalid_argument("mean_excitations: dimension mismatch");
  }
  const int da = space.da(), db = space.db();
  double na = 0.0, nb = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < da; ++n) {
      for (int j = 0; j < db; ++j) {
        const int i = (s * da + n) * db + j;
        const double p = rho(i, i).real();
        na += n * p;
        nb += j * p;
      }
    }
  }
  return {na, nb};
}

std::pair<double, double> mean_excitations_two_mode(const VectorXcd& psi,
                                                    int da, int db) {
  check_two_mode(psi.size(), da, db, "mean_excitations_two_mode");
  double na = 0.0, nb = 0.0;
  for (int n = 0; n < da; ++n) {
    for (int j = 0; j < db; ++j) {
      const double p = std::norm(psi(n * db + j));
      na += n * p;
      nb += j * p;
    }
  }
  return {na, nb};
}

std::pair<double, double> mean_excitations_two_mode(const MatrixXcd& rho,
                                                    int da, int db) {
  check_two_mode(rho.rows(), da, db, "mean_excitations_two_mode");
  double na = 0.0, nb = 0.0;
  for (int n = 0; n < da; ++n) {
    for (int j = 0; j < db; ++j) {
      const int i = n * db + j;
      const double p = rho(i, i).real();
      na += n * p;
      nb += j * p;
    }
  }
  return {na, nb};
}

}  // namespace catqed
