#include "mwt/trigmat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace mwt {

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double min_eigenvalue_hermitian(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Mat sym = 0.5 * (a + a.adjoint());
  if (sym.rows() == 1) return sym(0, 0).real();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

MatTrigPoly::MatTrigPoly(int k_min, std::vector<Mat> coeffs)
    : k_min_(k_min), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("MatTrigPoly: empty coefficient run");
  rows_ = coeffs_.front().rows();
  cols_ = coeffs_.front().cols();
  if (rows_ <= 0 || cols_ <= 0) throw std::invalid_argument("MatTrigPoly: degenerate coefficient shape");
  for (const Mat& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_)
      throw std::invalid_argument("MatTrigPoly: coefficient shapes differ");
  }
  canonicalize();
}

MatTrigPoly MatTrigPoly::zero(Eigen::Index rows, Eigen::Index cols) {
  MatTrigPoly p;
  p.rows_ = rows;
  p.cols_ = cols;
  return p;
}

MatTrigPoly MatTrigPoly::constant(const Mat& c0) { return monomial(0, c0); }

MatTrigPoly MatTrigPoly::identity(Eigen::Index d) {
  return constant(Mat::Identity(d, d));
}

MatTrigPoly MatTrigPoly::monomial(int k, const Mat& ck) {
  return MatTrigPoly(k, std::vector<Mat>{ck});
}

Eigen::Index MatTrigPoly::dim() const {
  if (!is_square()) throw std::invalid_argument("MatTrigPoly: square polynomial required");
  return rows_;
}

void MatTrigPoly::canonicalize() {
  std::size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead].isZero(0.0)) ++lead;
  if (lead == coeffs_.size()) {
    coeffs_.clear();
    k_min_ = 0;
    return;
  }
  std::size_t tail = coeffs_.size();
  while (tail > lead && coeffs_[tail - 1].isZero(0.0)) --tail;
  if (lead > 0 || tail < coeffs_.size()) {
    coeffs_ = std::vector<Mat>(coeffs_.begin() + static_cast<std::ptrdiff_t>(lead),
                               coeffs_.begin() + static_cast<std::ptrdiff_t>(tail));
    k_min_ += static_cast<int>(lead);
  }
}

Mat MatTrigPoly::coeff(int k) const {
  if (is_zero() || k < k_min() || k > k_max()) return Mat::Zero(rows_, cols_);
  return coeffs_[static_cast<std::size_t>(k - k_min_)];
}

Mat MatTrigPoly::eval(double x) const {
  Mat value(rows_, cols_);
  eval_into(x, value);
  return value;
}

void MatTrigPoly::eval_into(double x, Mat& out) const {
  if (out.rows() != rows_ || out.cols() != cols_) out.resize(rows_, cols_);
  if (is_zero()) {
    out.setZero();
    return;
  }
  const double xr = x - std::floor(x);
  const Cplx z = std::polar(1.0, kTwoPi * xr);
  // Horner walk from k_max down to k_min, then one twist by z^{k_min}.
  out = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
    out *= z;
    out += coeffs_[i];
  }
  const double phase = kTwoPi * xr * k_min_;
  out *= Cplx(std::cos(phase), std::sin(phase));
}

MatTrigPoly MatTrigPoly::adjoint() const {
  if (is_zero()) return zero(cols_, rows_);
  std::vector<Mat> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    out[coeffs_.size() - 1 - i] = coeffs_[i].adjoint();
  return MatTrigPoly(-k_max(), std::move(out));
}

MatTrigPoly MatTrigPoly::conj() const {
  if (is_zero()) return zero(rows_, cols_);
  std::vector<Mat> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    out[coeffs_.size() - 1 - i] = coeffs_[i].conjugate();
  return MatTrigPoly(-k_max(), std::move(out));
}

MatTrigPoly MatTrigPoly::dilated(int n) const {
  if (n < 1) throw std::invalid_argument("MatTrigPoly::dilated: n must be >= 1");
  if (is_zero() || n == 1) return *this;
  const int span = width() * n;
  std::vector<Mat> out(static_cast<std::size_t>(span) + 1, Mat::Zero(rows_, cols_));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i * static_cast<std::size_t>(n)] = coeffs_[i];
  return MatTrigPoly(k_min_ * n, std::move(out));
}

MatTrigPoly MatTrigPoly::downsampled(int n) const {
  if (n < 1) throw std::invalid_argument("MatTrigPoly::downsampled: n must be >= 1");
  if (is_zero() || n == 1) return *this;
  int lo = k_min();
  // First index >= k_min divisible by n.
  int first = (lo % n == 0) ? lo : (lo > 0 ? (lo / n + 1) * n : -((-lo) / n) * n);
  if (first > k_max()) return zero(rows_, cols_);
  std::vector<Mat> out;
  for (int k = first; k <= k_max(); k += n) out.push_back(coeff(k));
  return MatTrigPoly(first / n, std::move(out));
}

double MatTrigPoly::coeff_sup_norm() const {
  double sup = 0.0;
  for (const Mat& c : coeffs_) sup = std::max(sup, operator_norm(c));
  return sup;
}

double MatTrigPoly::frobenius_norm() const {
  double sum = 0.0;
  for (const Mat& c : coeffs_) sum += c.squaredNorm();
  return std::sqrt(sum);
}

bool MatTrigPoly::is_hermitian_valued(double tol) const {
  if (tol < 0) throw std::invalid_argument("is_hermitian_valued: tol must be >= 0");
  if (is_zero()) return true;
  if (!is_square()) return false;
  for (int k = k_min(); k <= k_max(); ++k) {
    if (operator_norm(coeff(-k) - coeff(k).adjoint()) > tol) return false;
  }
  return true;
}

MatTrigPoly MatTrigPoly::hermitian_symmetrized() const {
  if (is_zero()) return *this;
  const int lo = std::min(k_min(), -k_max());
  const int hi = std::max(k_max(), -k_min());
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(hi - lo) + 1);
  for (int k = lo; k <= hi; ++k) out.push_back(0.5 * (coeff(k) + coeff(-k).adjoint()));
  return MatTrigPoly(lo, std::move(out));
}

MatTrigPoly MatTrigPoly::chopped(double tol) const {
  if (is_zero()) return *this;
  std::vector<Mat> out(coeffs_);
  for (Mat& c : out)
    for (Eigen::Index col = 0; col < cols_; ++col)
      for (Eigen::Index row = 0; row < rows_; ++row)
        if (std::abs(c(row, col)) <= tol) c(row, col) = Cplx(0.0, 0.0);
  return MatTrigPoly(k_min_, std::move(out));
}

MatTrigPoly MatTrigPoly::operator-() const {
  MatTrigPoly out = *this;
  for (Mat& c : out.coeffs_) c = -c;
  return out;
}

MatTrigPoly& MatTrigPoly::operator+=(const MatTrigPoly& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("MatTrigPoly: shape mismatch in addition");
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  const int lo = std::min(k_min(), rhs.k_min());
  const int hi = std::max(k_max(), rhs.k_max());
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(hi - lo) + 1);
  for (int k = lo; k <= hi; ++k) out.push_back(coeff(k) + rhs.coeff(k));
  return *this = MatTrigPoly(lo, std::move(out));
}

MatTrigPoly& MatTrigPoly::operator-=(const MatTrigPoly& rhs) { return *this += -rhs; }

MatTrigPoly& MatTrigPoly::operator*=(Cplx s) {
  if (s == Cplx(0.0, 0.0)) return *this = zero(rows_, cols_);
  for (Mat& c : coeffs_) c *= s;
  return *this;
}

MatTrigPoly operator*(const MatTrigPoly& p, const MatTrigPoly& q) {
  if (p.cols() != q.rows())
    throw std::invalid_argument("MatTrigPoly: dimension mismatch in product");
  if (p.is_zero() || q.is_zero()) return MatTrigPoly::zero(p.rows(), q.cols());
  const int lo = p.k_min() + q.k_min();
  const int hi = p.k_max() + q.k_max();
  std::vector<Mat> out(static_cast<std::size_t>(hi - lo) + 1, Mat::Zero(p.rows(), q.cols()));
  for (int i = p.k_min(); i <= p.k_max(); ++i) {
    const Mat& pi = p.coeffs_[static_cast<std::size_t>(i - p.k_min())];
    if (pi.isZero(0.0)) continue;
    for (int j = q.k_min(); j <= q.k_max(); ++j) {
      out[static_cast<std::size_t>(i + j - lo)].noalias() +=
          pi * q.coeffs_[static_cast<std::size_t>(j - q.k_min())];
    }
  }
  return MatTrigPoly(lo, std::move(out));
}

bool operator==(const MatTrigPoly& a, const MatTrigPoly& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  if (a.k_min_ != b.k_min_ || a.coeffs_.size() != b.coeffs_.size()) return false;
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    if (a.coeffs_[i] != b.coeffs_[i]) return false;
  return true;
}

double grid_sup_distance(const MatTrigPoly& a, const MatTrigPoly& b, int grid_size) {
  if (grid_size < 1) throw std::invalid_argument("grid_sup_distance: grid_size must be >= 1");
  double sup = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double x = (2.0 * i + 1.0) / (2.0 * grid_size);
    sup = std::max(sup, operator_norm(a.eval(x) - b.eval(x)));
  }
  return sup;
}

double positivity_floor(const MatTrigPoly& h, int grid_size) {
  if (grid_size < 1) throw std::invalid_argument("positivity_floor: grid_size must be >= 1");
  double floor_value = std::numeric_limits<double>::infinity();
  Mat value(h.rows(), h.cols());
  for (int i = 0; i < grid_size; ++i) {
    const double x = (2.0 * i + 1.0) / (2.0 * grid_size);
    h.eval_into(x, value);
    floor_value = std::min(floor_value, min_eigenvalue_hermitian(value));
  }
  return floor_value;
}

double qmf_residual(const MatTrigPoly& m, int N, int grid_size) {
  if (N < 2) throw std::invalid_argument("qmf_residual: dilation must be >= 2");
  if (grid_size < 1) throw std::invalid_argument("qmf_residual: grid_size must be >= 1");
  const Eigen::Index d = m.dim();
  const MatTrigPoly r_of_identity = (m.adjoint() * m).downsampled(N);
  return grid_sup_distance(r_of_identity, MatTrigPoly::identity(d), grid_size);
}

}  // namespace mwt
