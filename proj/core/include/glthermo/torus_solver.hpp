#pragma once

#include <memory>
#include <vector>

#include "glthermo/grid.hpp"

namespace glthermo {

// Direct solver for  stiffness * (s (-Delta_B) - floor) + shift  on an
// n x n magnetic torus with `flux_quanta` quanta, spacing a and symmetric
// gauge centred at the origin.  floor is the bottom of the lattice spectrum
// at the torus field, so the operator is >= shift > 0.
//
// The symmetric gauge is traded for the Landau gauge, rows are Fourier
// transformed along x1, and the remaining couplings form independent cyclic
// tridiagonal chains that are factorised once per shift.
class MagneticTorusSolver {
 public:
  MagneticTorusSolver(int n, double spacing, int flux_quanta, double kinetic_scale,
                      double stiffness, const std::vector<double>& shifts);
  ~MagneticTorusSolver();
  MagneticTorusSolver(const MagneticTorusSolver&) = delete;
  MagneticTorusSolver& operator=(const MagneticTorusSolver&) = delete;

  int size() const { return n_; }
  double field() const { return field_; }
  std::size_t shift_count() const { return factors_.size(); }

  // In place on n*n values (index i + n j); not safe to call concurrently
  // on one instance.
  void solve(cplx* data, std::size_t shift_index = 0) const;

  // Exact spectrum of s (-Delta_B) on the torus via the chain matrices,
  // lowest `count` values.  Dense per chain: for small tori only.
  std::vector<double> spectrum(int count) const;

 private:
  struct Chain {
    std::vector<int> modes;  // Fourier index of each block
  };
  struct Factor {
    std::vector<double> l, r, D;
  };

  int n_;
  double a_;
  int flux_;
  double field_;
  double s_;
  double stiffness_;
  double floor_;
  double corner_;  // wrap factor between consecutive blocks (+1 or -1)
  std::vector<Chain> chains_;
  std::vector<double> base_diag_;  // s(4 - 2cos(..))/a^2 per (mode, row)
  std::vector<std::vector<Factor>> factors_;
  std::vector<cplx> gauge_;  // exp(-i chi) at nodes
  struct Plans;
  std::unique_ptr<Plans> plans_;

  double diag(int mode, int row) const { return base_diag_[static_cast<std::size_t>(mode) * n_ + row]; }
  Factor factorise(const Chain& c, double shift) const;
};

// Preconditioner for the Hessian of the discrete energy on a grid: uses the
// exact torus solver on periodic grids, and a slightly larger torus that
// encloses the box for Dirichlet grids (a sine transform along x3 in 3D).
class FieldPreconditioner {
 public:
  FieldPreconditioner(const GaugeLinks& links, double b, double shift);
  ~FieldPreconditioner();
  void apply(const cplx* in, cplx* out) const;

 private:
  GridSpec grid_;
  int torus_n_ = 0;
  int offset_ = 0;
  int planes_ = 0;
  std::unique_ptr<MagneticTorusSolver> solver_;
  Eigen::MatrixXd sine_;
  mutable std::vector<cplx> buffer_;
  mutable Eigen::MatrixXcd planes_buf_;
};

}  // namespace glthermo
