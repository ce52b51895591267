#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mwt/filter.hpp"
#include "mwt/transfer.hpp"
#include "mwt/trigmat.hpp"

namespace mwt {

/// Convergence certificate for the normalized infinite product.
struct ProductReport {
  int kmax_used = 0;
  double last_increment = 0.0;
  bool converged = false;
};

/// The frequency-side scaling map
///
///   P(x) = lim_k N^{-k/2} m(x/N^k) m(x/N^{k-1}) ... m(x/N),
///
/// built iteratively with the leftmost factor added as k grows. Defined on
/// the whole real line (m is evaluated mod 1). Declares convergence only
/// after the argument has contracted into [-1, 1] and three consecutive
/// increments fall below tol; a single small increment can be spurious at
/// integer arguments, where early factors reduce to m(0)/sqrt(N).
///
/// Convergence is guaranteed under the low-pass condition; without it the
/// call throws unless require_el is false.
std::pair<Mat, ProductReport> infinite_product(const Filter& m, double x, double tol = 1e-12,
                                               int kmax = 256, bool require_el = true);

/// Matrix- or vector-valued samples on the N-adic grid x = j / N^scale,
/// j_min <= j <= j_max. Grid indices are exact integers; no floating-point
/// keys are involved.
struct GridFunction {
  enum class Kind { Matrix, Vector };
  int base = 2;
  int scale = 0;
  long long j_min = 0;
  long long j_max = -1;
  Kind kind = Kind::Matrix;
  std::vector<Mat> values;  // index j - j_min; vectors are d x 1 matrices

  double point(long long j) const;
  const Mat& at(long long j) const;
  std::size_t size() const { return values.size(); }
};

/// P on the grid j/N^scale, |x| <= range. Points with N | j reuse the value
/// at j/N through the one-step recursion P(x) = P(x/N) N^{-1/2} m(x/N), so
/// the refinement identity holds on the grid by construction.
GridFunction infinite_product_grid(const Filter& m, int scale, int range, double tol = 1e-12,
                                   int kmax = 256);

/// Which pointwise conjugation turns P into the scaling vector; the adjoint
/// is the native choice here, the transpose variant is exposed for
/// real-coefficient filters written in the transposed convention.
enum class ScalingConvention { Adjoint, Transpose };

/// The frequency-side scaling vector phi(x) = P(x)^* v on the N-adic grid,
/// for v a unit eigenvector of m(0)/sqrt(N) (checked against tol). With
/// l2_normalize (the default) the grid is scaled so the underlying scaling
/// function has unit L2 norm; the raw product normalization has phi(0) = v.
GridFunction scaling_function_grid(const Filter& m, const CVec& v, int scale, int range,
                                   double tol = 1e-10, bool l2_normalize = true,
                                   ScalingConvention convention = ScalingConvention::Adjoint);

/// Sup over refinable grid points (N | j) of
/// || phi(x) - N^{-1/2} m^*(x/N) phi(x/N) ||.
double refinement_residual(const Filter& m, const GridFunction& phihat,
                           ScalingConvention convention = ScalingConvention::Adjoint);

/// Truncation certificate for lattice sums: shells |g| = s are added until
/// the operator-norm increment of the last shell drops below tol or the
/// bound is hit. No analytic decay rate is assumed; the report is the only
/// certificate.
struct LatticeSumReport {
  int shells_used = 0;
  double last_shell_increment = 0.0;
  bool converged = false;
};

/// The raw correlation lattice sum
///
///   h_v(x) = sum_{|g| <= lattice_bound} (P(x+g)^* v)(P(x+g)^* v)^*,
///
/// Hermitian PSD by construction. This normalization pairs with the atom
/// masses P^* P: the sum over an E_1 basis is the harmonic unit that makes
/// the atom/cylinder mass identity exact.
std::pair<Mat, LatticeSumReport> correlation_function_raw(const Filter& m, const CVec& v, double x,
                                                          int lattice_bound, double tol = 1e-12);

/// ||phi_v||^2, the squared L2 norm of the scaling function attached to v,
/// obtained as the mean of the trace of the raw correlation over the torus
/// (an exact quadrature up to the lattice tail).
double scaling_l2_norm_sq(const Filter& m, const CVec& v, int lattice_bound, double tol = 1e-12);

/// The correlation function of the L2-normalized scaling function: the raw
/// lattice sum divided by ||phi_v||^2. Pass norm_sq when it is already known
/// to avoid recomputing it per point.
std::pair<Mat, LatticeSumReport> correlation_function(const Filter& m, const CVec& v, double x,
                                                      int lattice_bound, double tol = 1e-12,
                                                      std::optional<double> norm_sq = std::nullopt);

/// Correlation as a trigonometric polynomial, recovered from grid samples of
/// the lattice sum (degree bounded by the support width of the scaling
/// function). Coefficients carry the lattice-tail error.
MatTrigPoly correlation_polynomial(const Filter& m, const CVec& v, int lattice_bound,
                                   double tol = 1e-12, bool l2_normalized = true);

/// Sum of the raw correlations over an orthonormal E_1 basis: the harmonic
/// unit attached to the filter by the cascade. Requires the low-pass
/// condition.
MatTrigPoly correlation_unit(const Filter& m, int lattice_bound, double tol = 1e-12);

/// Sup over the midpoint grid of || (R^k h)(x) - h(x) || for a callable h;
/// checks harmonicity beyond the polynomial class.
double verify_harmonic_grid(const Filter& m, const MatFn& h, int grid_size, int k = 1,
                            const PointwiseOptions& opt = {});

}  // namespace mwt
