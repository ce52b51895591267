#pragma once

#include <vector>

#include "mwt/trigmat.hpp"

namespace mwt {

/// Spectral report for the low-pass matrix m(0)/sqrt(N).
///
/// The condition holds iff 1 is an eigenvalue, it is semisimple with
/// algebraic = geometric multiplicity l >= 1, and every other eigenvalue has
/// modulus strictly below 1 (with margin tol). e1_basis is an orthonormal
/// basis of the eigenvalue-1 eigenspace; it is empty when the condition
/// fails.
struct ELReport {
  std::vector<Cplx> eigenvalues;
  int l = 0;
  std::vector<CVec> e1_basis;
  bool satisfied = false;
  double tol = 0.0;
};

/// A validated matrix filter: a square trigonometric polynomial together
/// with the dilation N >= 2 of the circle endomorphism x -> N x (mod 1).
/// The QMF residual and the low-pass report are computed once at
/// construction and cached; instances are immutable.
class Filter {
 public:
  explicit Filter(MatTrigPoly m, int dilation, double el_tol = 1e-10, int qmf_grid = 256);

  const MatTrigPoly& poly() const { return poly_; }
  /// Cached adjoint of poly(), shared by the transfer machinery.
  const MatTrigPoly& poly_adjoint() const { return poly_adj_; }
  int dilation() const { return dilation_; }
  Eigen::Index dim() const { return poly_.dim(); }

  double qmf_residual() const { return qmf_residual_; }
  const ELReport& el_report() const { return el_; }

 private:
  MatTrigPoly poly_;
  MatTrigPoly poly_adj_;
  int dilation_;
  double qmf_residual_;
  ELReport el_;
};

/// Eigenvalue analysis of m(0)/sqrt(N) with an explicit tolerance.
ELReport el_condition(const Filter& m, double tol = 1e-10);

}  // namespace mwt
