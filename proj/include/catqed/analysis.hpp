#pragma once

#include <utility>
#include <vector>

#include "catqed/hilbert.hpp"

namespace catqed {

// Outcome of projecting the electronic degree of freedom onto |+-> =
// (|e> +- |g>)/sqrt(2). Exactly one of the collapsed fields is populated,
// matching the type of the projected state; the collapsed state lives on the
// two-mode subspace and is normalized.
struct ProjectionResult {
  Sign sign = Sign::plus;
  double probability = 0.0;
  VectorXcd collapsed_vec;
  MatrixXcd collapsed_mat;
};

ProjectionResult project_electronic(const VectorXcd& psi,
                                    const CompositeSpace& space, Sign sign);
ProjectionResult project_electronic(const MatrixXcd& rho,
                                    const CompositeSpace& space, Sign sign);

// |<x|y>|^2 for unit vectors on the same space.
double fidelity_pure(const VectorXcd& x, const VectorXcd& y);

// <psi|rho|psi> evaluated as a quadratic form.
double fidelity_mixed(const VectorXcd& psi, const MatrixXcd& rho);

// Logarithmic negativity N = log2 ||rho^{T_b}||_1 of a two-mode density
// matrix (da x db layout, vibration index fastest). The eigenvalue route is
// the primary one; the singular-value route is exposed as a cross-check.
double log_negativity(const MatrixXcd& rho_two_mode, int da, int db);
double log_negativity_svd(const MatrixXcd& rho_two_mode, int da, int db);

// Fast path for pure two-mode states via the Schmidt decomposition:
// N = 2 log2(sum of singular values of the coefficient matrix).
double log_negativity_pure(const VectorXcd& psi_two_mode, int da, int db);

// Rectangular joint-Wigner evaluation grid: values(i, j) = W(zeta[i], chi[j]).
struct WignerGrid {
  std::vector<cplx> zeta;
  std::vector<cplx> chi;
  MatrixXd values;
};

// W(zeta, chi) = (4/pi^2) <D_a(zeta) P_a D_a^H(zeta) D_b(chi) P_b D_b^H(chi)>
// with P the single-mode parity. Throws when the state occupies the top
// Fock levels beyond tolerance (truncation would corrupt the values).
WignerGrid joint_wigner(const VectorXcd& psi_two_mode, int da, int db,
                        WignerGrid grid);
WignerGrid joint_wigner(const MatrixXcd& rho_two_mode, int da, int db,
                        WignerGrid grid);

// Paired evaluation for line cuts: returns W(zeta[i], chi[i]).
VectorXd joint_wigner_points(const VectorXcd& psi_two_mode, int da, int db,
                             const std::vector<cplx>& zeta,
                             const std::vector<cplx>& chi);
VectorXd joint_wigner_points(const MatrixXcd& rho_two_mode, int da, int db,
                             const std::vector<cplx>& zeta,
                             const std::vector<cplx>& chi);

// (<a^H a>, <b^H b>) on the full composite space.
std::pair<double, double> mean_excitations(const VectorXcd& psi,
                                           const CompositeSpace& space);
std::pair<double, double> mean_excitations(const MatrixXcd& rho,
                                           const CompositeSpace& space);

// Same expectations on a bare two-mode state.
std::pair<double, double> mean_excitations_two_mode(const VectorXcd& psi,
                                                    int da, int db);
std::pair<double, double> mean_excitations_two_mode(const MatrixXcd& rho,
                                                    int da, int db);

}  // namespace catqed
