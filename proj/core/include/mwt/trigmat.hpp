#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mwt {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

/// Largest singular value of a (small, dense) complex matrix.
double operator_norm(const Mat& a);

/// Smallest eigenvalue of a Hermitian matrix. The input is symmetrized
/// first, so matrices that are Hermitian only up to roundoff are fine.
double min_eigenvalue_hermitian(const Mat& a);

/// A matrix-valued trigonometric (Laurent) polynomial on the circle,
///
///   p(x) = sum_{k = k_min}^{k_max} c_k e^{2 pi i k x},
///
/// with dense coefficient storage over a tight support interval. The
/// identically zero polynomial has empty support. Coefficients are
/// rows() x cols() complex matrices; filters and harmonic candidates are
/// square, vector-valued sections are d x 1. Values are immutable after
/// construction and all operations are pure, so instances can be shared
/// freely across threads.
class MatTrigPoly {
 public:
  MatTrigPoly() = default;

  /// Builds from the coefficient run c_{k_min}, c_{k_min + 1}, ...
  /// All matrices must share one shape. Exactly-zero leading and trailing
  /// coefficients are trimmed (entrywise threshold 0, so the algebra on
  /// rationals stays exact).
  MatTrigPoly(int k_min, std::vector<Mat> coeffs);

  static MatTrigPoly zero(Eigen::Index rows, Eigen::Index cols);
  static MatTrigPoly constant(const Mat& c0);
  static MatTrigPoly identity(Eigen::Index d);
  static MatTrigPoly monomial(int k, const Mat& ck);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  /// Dimension d of a square polynomial; throws for non-square shapes.
  Eigen::Index dim() const;

  bool is_zero() const { return coeffs_.empty(); }
  /// Tight support bounds. For the zero polynomial k_min() = 0 and
  /// k_max() = -1, so loops over [k_min, k_max] degenerate naturally.
  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(coeffs_.size()) - 1; }
  /// k_max - k_min, or 0 for the zero polynomial.
  int width() const { return is_zero() ? 0 : k_max() - k_min(); }
  std::size_t support_size() const { return coeffs_.size(); }

  /// Coefficient at index k (a zero matrix outside the support).
  Mat coeff(int k) const;

  /// Pointwise value sum_k c_k e^{2 pi i k x}. Periodic in x; the argument
  /// is reduced to [0,1) before evaluation to keep large arguments accurate.
  Mat eval(double x) const;

  /// eval without allocation once `out` has the right shape; hot loops use
  /// this with a reused scratch matrix.
  void eval_into(double x, Mat& out) const;

  /// Pointwise conjugate transpose: adjoint()(x) = p(x)^*. Coefficientwise
  /// c_k^* lands at index -k.
  MatTrigPoly adjoint() const;

  /// Entrywise complex conjugation of the values: conj()(x) = conj(p(x)).
  /// Together with adjoint() this covers both the transpose and the
  /// conjugate-transpose conventions for real-coefficient filters.
  MatTrigPoly conj() const;

  /// Composition with x -> n x (mod 1): index k moves to n k. Requires n >= 1.
  MatTrigPoly dilated(int n) const;

  /// Keeps the coefficients at indices divisible by n and reindexes k -> k/n.
  /// This is the decimation step of the transfer operator.
  MatTrigPoly downsampled(int n) const;

  /// max_k ||c_k||_2 (operator norm per coefficient).
  double coeff_sup_norm() const;
  /// Frobenius norm of the stacked coefficient array.
  double frobenius_norm() const;

  /// True iff max_k ||c_{-k} - c_k^*|| <= tol, i.e. p(x) is Hermitian for
  /// every x.
  bool is_hermitian_valued(double tol = 1e-10) const;

  /// (p + reflected conjugate)/2; exactly Hermitian-valued output.
  MatTrigPoly hermitian_symmetrized() const;

  /// Entries with modulus <= tol set to exact zero, support re-tightened.
  /// Cleans roundoff out of numerically computed polynomials.
  MatTrigPoly chopped(double tol) const;

  MatTrigPoly operator-() const;
  MatTrigPoly& operator+=(const MatTrigPoly& rhs);
  MatTrigPoly& operator-=(const MatTrigPoly& rhs);
  MatTrigPoly& operator*=(Cplx s);

  friend MatTrigPoly operator+(MatTrigPoly a, const MatTrigPoly& b) { return a += b; }
  friend MatTrigPoly operator-(MatTrigPoly a, const MatTrigPoly& b) { return a -= b; }
  friend MatTrigPoly operator*(MatTrigPoly a, Cplx s) { return a *= s; }
  friend MatTrigPoly operator*(Cplx s, MatTrigPoly a) { return a *= s; }

  /// Convolution product: (pq)_k = sum_j p_j q_{k-j}, order preserving.
  /// Requires p.cols() == q.rows().
  friend MatTrigPoly operator*(const MatTrigPoly& p, const MatTrigPoly& q);

  friend bool operator==(const MatTrigPoly& a, const MatTrigPoly& b);

 private:
  void canonicalize();

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  int k_min_ = 0;
  std::vector<Mat> coeffs_;
};

/// Sup over a size-`grid_size` midpoint grid of ||distance to b||, where the
/// distance of two polynomials is measured pointwise in operator norm.
double grid_sup_distance(const MatTrigPoly& a, const MatTrigPoly& b, int grid_size = 256);

/// Minimum over the midpoint grid of the smallest eigenvalue of h(x);
/// witnesses lower bounds h >= c on Hermitian-valued polynomials.
double positivity_floor(const MatTrigPoly& h, int grid_size = 512);

/// Residual of the quadrature-mirror normalization for dilation N,
///
///   sup_x || (1/N) sum_{Ny = x mod 1} m^*(y) m(y) - I ||,
///
/// computed exactly at the coefficient level as ||R(I) - I|| and measured as
/// the sup over a midpoint grid of the operator norm. Zero iff the QMF
/// identity holds for the polynomial m.
double qmf_residual(const MatTrigPoly& m, int N, int grid_size = 256);

}  // namespace mwt
