#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mwt/filter.hpp"
#include "mwt/transfer.hpp"
#include "mwt/trigmat.hpp"

namespace mwt {

/// Matrix samples on the midpoint grid x_i = (2i + 1)/(2 size) of the circle.
struct TorusGrid {
  int size = 0;
  std::vector<Mat> values;
  double point(int i) const { return (2.0 * i + 1.0) / (2.0 * size); }
};

/// (1/n) sum_{j<n} R^j f, coefficient-exact. For f inside the invariant
/// coefficient space this converges to the spectral projection of f onto the
/// fixed space of R; eigenvalue-(-1) and transient components die like 1/n.
MatTrigPoly cesaro_average(const Filter& m, const MatTrigPoly& f, long n_terms);

struct StarOptions {
  int depth = 14;
  double tol = 1e-9;
  int grid_size = 256;
  /// Lower bound required of the unit h on grids and along the preimage
  /// tree; below it the iteration refuses to invert h.
  double floor_tol = 1e-6;
  std::uint64_t max_preimages = std::uint64_t{1} << 26;
};

struct StarProductResult {
  TorusGrid value;
  int depth_used = 0;
  double sup_increment = 0.0;
  bool converged = false;
  /// ||R(value) - value|| on the grid, by pointwise transfer.
  double residual = 0.0;
  /// False when h1 or h2 failed the harmonicity check (warning only).
  bool inputs_harmonic = true;
};

/// The product h1 * h2 = lim_k R^k(h1 h^{-1} h2) of harmonic elements,
/// iterated pointwise on a midpoint grid until the successive sup-difference
/// drops below tol or the depth cap is reached. h must be Hermitian-valued
/// and bounded below by floor_tol; a unit that is singular somewhere raises
/// a domain_error ("unit not bounded below") instead of being regularized.
StarProductResult star_product(const Filter& m, const MatTrigPoly& h1, const MatTrigPoly& h2,
                               const MatTrigPoly& h, const StarOptions& opt = {});

struct ProjectionReport {
  bool is_projection = false;
  double idempotency_gap = 0.0;  // ||p * p - p|| on the grid
  double hermitian_gap = 0.0;    // coefficientwise deviation from p = p^*
};

/// p is a projection in the harmonic algebra with unit h iff p * p = p and
/// p is Hermitian-valued, both within tol.
ProjectionReport projection_check(const Filter& m, const MatTrigPoly& p, const MatTrigPoly& h,
                                  double tol, const StarOptions& opt = {});

struct OrthogonalityTable {
  /// norms(i, j) = sup over the grid of ||(b_i * b_j)(x)||.
  Eigen::MatrixXd norms;
  /// gaps(i, i) = ||b_i * b_i - b_i||, gaps(i, j) = ||b_i * b_j|| off the
  /// diagonal; a family of mutually orthogonal projections makes this zero.
  Eigen::MatrixXd gaps;
};

OrthogonalityTable orthogonality_table(const Filter& m, const std::vector<MatTrigPoly>& basis,
                                       const MatTrigPoly& h, const StarOptions& opt = {});

/// Least c >= 0 with -c h(x) <= h0(x) <= c h(x) in the semidefinite order
/// over the uniform grid x = j/grid_size, or nullopt when h(x) has a kernel
/// direction on which h0 does not vanish. The uniform (0-inclusive) grid is
/// used here so that rational zeros of h are realizable as grid points.
std::optional<double> domination_check(const MatTrigPoly& h0, const MatTrigPoly& h, int grid_size,
                                       double kernel_tol = 1e-9);

}  // namespace mwt
