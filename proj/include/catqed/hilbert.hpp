#pragma once

#include <Eigen/Dense>
#include <complex>

namespace catqed {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Level : int { g = 0, e = 1 };
enum class Mode : int { a = 0, b = 1 };
enum class Sign : int { minus = -1, plus = +1 };

// Truncation levels for the two bosonic modes: Fock states 0..n_a_max for the
// cavity and 0..n_b_max for the vibration are retained.
struct FockCutoffs {
  int n_a_max = 14;
  int n_b_max = 14;

  void validate() const;  // throws std::invalid_argument unless both >= 1
};

struct BasisLabel {
  Level level;
  int n;  // cavity Fock index
  int j;  // vibration Fock index
};

// Composite space (two-level electronic) x (cavity Fock) x (vibration Fock).
// Layout is level-major with contiguous vibration index:
//   index(s, n, j) = (s*(n_a_max+1) + n)*(n_b_max+1) + j
// so each electronic level occupies a contiguous two-mode slab (ground block
// first) and projection onto a level is a slice.
class CompositeSpace {
 public:
  explicit CompositeSpace(FockCutoffs cutoffs);

  const FockCutoffs& cutoffs() const { return cutoffs_; }
  int da() const { return cutoffs_.n_a_max + 1; }
  int db() const { return cutoffs_.n_b_max + 1; }
  int two_mode_dim() const { return da() * db(); }
  int dim() const { return 2 * two_mode_dim(); }

  int index(Level level, int n, int j) const;  // throws std::out_of_range
  BasisLabel unindex(int idx) const;           // inverse of index

 private:
  FockCutoffs cutoffs_;
};

// Bosonic annihilation operator on a single truncated mode: entries sqrt(n)
// on the (n-1, n) superdiagonal. Requires dim >= 2.
MatrixXcd annihilation(int dim);

struct CoherentState {
  VectorXcd amplitudes;       // renormalized to unit norm
  double truncation_deficit;  // Poisson tail sum_{n>n_max} e^{-|a|^2}|a|^{2n}/n!
  bool truncation_warning;    // deficit > 1e-4
};

// Truncated coherent state with amplitudes e^{-|a|^2/2} a^n / sqrt(n!),
// renormalized after truncation; the pre-renormalization norm deficit is
// surfaced rather than hidden.
CoherentState coherent_state(cplx amplitude, int dim);

// Partial transpose of a two-mode density matrix (index m*db + k for cavity
// Fock m, vibration Fock k). For subsystem b the entry ((m,k),(n,j)) moves to
// ((m,j),(n,k)); symmetric definition for subsystem a.
MatrixXcd partial_transpose(const MatrixXcd& rho, int da, int db,
                            Mode subsystem);

// Partial trace of a two-mode density matrix down to the kept mode.
MatrixXcd partial_trace(const MatrixXcd& rho, int da, int db, Mode keep);

// Kronecker products under the m*db + k two-mode layout.
VectorXcd kron_vec(const VectorXcd& a, const VectorXcd& b);
MatrixXcd kron_mat(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace catqed
