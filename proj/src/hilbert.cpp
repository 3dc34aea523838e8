#include "catqed/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace catqed {

void FockCutoffs::validate() const {
  if (n_a_max < 1 || n_b_max < 1) {
    throw std::invalid_argument("FockCutoffs: n_a_max and n_b_max must be >= 1");
  }
}

CompositeSpace::CompositeSpace(FockCutoffs cutoffs) : cutoffs_(cutoffs) {
  cutoffs_.validate();
}

int CompositeSpace::index(Level level, int n, int j) const {
  const int s = static_cast<int>(level);
  if (s < 0 || s > 1 || n < 0 || n > cutoffs_.n_a_max || j < 0 ||
      j > cutoffs_.n_b_max) {
    throw std::out_of_range("CompositeSpace::index: label (" +
                            std::to_string(s) + ", " + std::to_string(n) +
                            ", " + std::to_string(j) + ") out of range");
  }
  return (s * da() + n) * db() + j;
}

BasisLabel CompositeSpace::unindex(int idx) const {
  if (idx < 0 || idx >= dim()) {
    throw std::out_of_range("CompositeSpace::unindex: index " +
                            std::to_string(idx) + " out of range");
  }
  const int j = idx % db();
  const int rest = idx / db();
  const int n = rest % da();
  const int s = rest / da();
  return BasisLabel{static_cast<Level>(s), n, j};
}

MatrixXcd annihilation(int dim) {
  if (dim < 2) {
    throw std::invalid_argument("annihilation: dim must be >= 2");
  }
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

CoherentState coherent_state(cplx amplitude, int dim) {
  if (dim < 1) {
    throw std::invalid_argument("coherent_state: dim must be >= 1");
  }
  const double r = std::abs(amplitude);
  const double phase = std::arg(amplitude);
  VectorXcd c(dim);
  double kept = 0.0;
  for (int n = 0; n < dim; ++n) {
    // log of |c_n| = -|a|^2/2 + n log|a| - log(n!)/2, assembled in log space
    // so large amplitudes do not overflow the factorial.
    double lg = -0.5 * r * r - 0.5 * std::lgamma(n + 1.0);
    if (n > 0) {
      if (r == 0.0) {
        c(n) = 0.0;
        continue;
      }
      lg += n * std::log(r);
    }
    const double mag = std::exp(lg);
    c(n) = std::polar(mag, n * phase);
    kept += mag * mag;
  }
  const double deficit = std::max(0.0, 1.0 - kept);
  if (kept <= 0.0) {
    throw std::invalid_argument("coherent_state: truncated norm vanished");
  }
  c /= std::sqrt(kept);
  return CoherentState{std::move(c), deficit, deficit > 1e-4};
}

namespace {
void check_two_mode(const MatrixXcd& rho, int da, int db, const char* who) {
  if (da < 1 || db < 1 || rho.rows() != rho.cols() ||
      rho.rows() != static_cast<Eigen::Index>(da) * db) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix shape does not match da*db");
  }
}
}  // namespace

MatrixXcd partial_transpose(const MatrixXcd& rho, int da, int db,
                            Mode subsystem) {
  check_two_mode(rho, da, db, "partial_transpose");
  MatrixXcd out(rho.rows(), rho.cols());
  for (int m = 0; m < da; ++m) {
    for (int n = 0; n < da; ++n) {
      for (int k = 0; k < db; ++k) {
        for (int j = 0; j < db; ++j) {
          const cplx v = rho(m * db + k, n * db + j);
          if (subsystem == Mode::b) {
            out(m * db + j, n * db + k) = v;
          } else {
            out(n * db + k, m * db + j) = v;
          }
        }
      }
    }
  }
  return out;
}

MatrixXcd partial_trace(const MatrixXcd& rho, int da, int db, Mode keep) {
  check_two_mode(rho, da, db, "partial_trace");
  if (keep == Mode::a) {
    MatrixXcd out = MatrixXcd::Zero(da, da);
    for (int m = 0; m < da; ++m) {
      for (int n = 0; n < da; ++n) {
        cplx s = 0.0;
        for (int k = 0; k < db; ++k) s += rho(m * db + k, n * db + k);
        out(m, n) = s;
      }
    }
    return out;
  }
  MatrixXcd out = MatrixXcd::Zero(db, db);
  for (int k = 0; k < db; ++k) {
    for (int j = 0; j < db; ++j) {
      cplx s = 0.0;
      for (int m = 0; m < da; ++m) s += rho(m * db + k, m * db + j);
      out(k, j) = s;
    }
  }
  return out;
}

VectorXcd kron_vec(const VectorXcd& a, const VectorXcd& b) {
  VectorXcd out(a.size() * b.size());
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    out.segment(m * b.size(), b.size()) = a(m) * b;
  }
  return out;
}

MatrixXcd kron_mat(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

}  // namespace catqed
