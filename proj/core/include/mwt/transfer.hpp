#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mwt/filter.hpp"
#include "mwt/trigmat.hpp"

namespace mwt {

/// The transfer operator applied exactly at the coefficient level:
///
///   (R f)(x) = (1/N) sum_{N y = x mod 1} m^*(y) f(y) m(y),
///
/// realized as g = adjoint(m) f m followed by keeping the indices divisible
/// by N. f must be square with f.dim() == m.dim().
MatTrigPoly transfer_apply(const Filter& m, const MatTrigPoly& f);

/// Coefficient sup norm of R h - h.
double harmonic_residual(const Filter& m, const MatTrigPoly& h);

using MatFn = std::function<Mat(double)>;

struct PointwiseOptions {
  /// Preimage enumeration guard: N^k may not exceed this (2^24 by default).
  std::uint64_t max_preimages = std::uint64_t{1} << 24;
};

/// R^k f at a single point, for f given as a callable, by enumerating the
/// N^k inverse branches y = (x + j)/N^k and accumulating the cocycle
/// products m^(k)(y) = m(y) m(Ny) ... m(N^{k-1} y) down the preimage tree.
/// k = 0 returns f(x). Throws when N^k exceeds the enumeration guard.
Mat transfer_apply_pointwise(const Filter& m, const MatFn& f, int k, double x,
                             const PointwiseOptions& opt = {});

/// All iterates (R^0 f)(x), ..., (R^depth f)(x) from one walk of the
/// preimage tree; the shared tree prefix makes this cost O(N^depth) nodes
/// rather than one enumeration per level.
std::vector<Mat> transfer_iterates(const Filter& m, const MatFn& f, int depth, double x,
                                   const PointwiseOptions& opt = {});

/// The exact matrix of R on the coefficient space of square polynomials
/// supported in [-K, K], acting on stacked (vectorized) coefficient columns
/// (c_{-K}, ..., c_K). fixed_basis spans the Hermitian-valued part of the
/// eigenvalue-1 eigenspace (see fixed_space for the normalization).
struct TransitionMatrix {
  int degree_bound = 0;
  Eigen::Index dim = 0;
  Eigen::MatrixXcd matrix;
  std::vector<Cplx> eigenvalues;  // sorted by modulus desc, then re, then im
  std::vector<MatTrigPoly> fixed_basis;
};

/// Smallest K making the degree-K coefficient space R-invariant,
/// ceil(W / (N - 1)) with W the support width of m (equivalently the
/// half-width of the support of adjoint(m) m).
int min_degree_bound(const Filter& m);

/// Stacks the coefficients (c_{-K}, ..., c_K) of f, each column-major.
Eigen::VectorXcd stack_coefficients(const MatTrigPoly& f, int K);
MatTrigPoly unstack_coefficients(const Eigen::VectorXcd& v, int K, Eigen::Index d);

/// The bare matrix of R on stacked coefficients (no spectral analysis).
Eigen::MatrixXcd transition_operator(const Filter& m, int K);

TransitionMatrix transition_matrix(const Filter& m, int K, double tol = 1e-9);

/// A harmonic basis element h (R h = h, Hermitian-valued) together with its
/// diagnostics. positivity_floor is the minimum over a dense midpoint grid
/// of the smallest eigenvalue of h(x).
struct HarmonicElement {
  MatTrigPoly poly;
  double residual = 0.0;
  bool hermitian = false;
  double positivity_floor = 0.0;
};

/// Basis of { h : R h = h, h Hermitian-valued, support in [-K, K] }.
///
/// Basis convention: when the constant identity lies in the fixed space it
/// appears first; the rest is orthonormalized against it in the coefficient
/// inner product. Elements are scaled so the trace of the 0th coefficient
/// equals d, or to unit coefficient Frobenius norm when that trace vanishes.
std::vector<HarmonicElement> fixed_space(const Filter& m, int K, double tol = 1e-9);

/// Lawton-style orthogonality verdict: the fixed space is one-dimensional
/// and spanned by (a multiple of) the constant identity.
bool lawton_orthogonal(const std::vector<HarmonicElement>& basis, double tol = 1e-9);

}  // namespace mwt
