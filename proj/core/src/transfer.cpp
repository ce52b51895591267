#include "mwt/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mwt {
namespace {

std::uint64_t checked_pow(int base, int exp, std::uint64_t guard) {
  std::uint64_t value = 1;
  for (int i = 0; i < exp; ++i) {
    if (value > guard / static_cast<std::uint64_t>(base)) return guard + 1;
    value *= static_cast<std::uint64_t>(base);
  }
  return value;
}

// Depth-first walk of the inverse-branch tree below x. Cocycle products are
// extended on descent, so every node costs one filter evaluation and one
// d x d product regardless of depth.
class PreimageWalk {
 public:
  PreimageWalk(const Filter& m, const MatFn& f, int depth, bool all_levels)
      : m_(m), f_(f), depth_(depth), all_levels_(all_levels) {
    const Eigen::Index d = m_.dim();
    sums_.assign(static_cast<std::size_t>(depth_) + 1, Mat::Zero(d, d));
    scale_.resize(static_cast<std::size_t>(depth_) + 1);
    double s = 1.0;
    for (int k = 0; k <= depth_; ++k, s /= m_.dilation()) scale_[static_cast<std::size_t>(k)] = s;
    cocycle_.assign(static_cast<std::size_t>(depth_) + 1, Mat::Zero(d, d));
    m_value_.resize(d, d);
    t1_.resize(d, d);
    t2_.resize(d, d);
  }

  std::vector<Mat> run(double x) {
    cocycle_[0] = Mat::Identity(m_.dim(), m_.dim());
    descend(0, x);
    return std::move(sums_);
  }

 private:
  void descend(int k, double x) {
    const auto uk = static_cast<std::size_t>(k);
    if (all_levels_ || k == depth_) {
      t1_.noalias() = f_(x) * cocycle_[uk];
      t2_.noalias() = cocycle_[uk].adjoint() * t1_;
      sums_[uk] += scale_[uk] * t2_;
    }
    if (k == depth_) return;
    const int N = m_.dilation();
    for (int digit = 0; digit < N; ++digit) {
      const double child = (x + digit) / N;
      m_.poly().eval_into(child, m_value_);
      cocycle_[uk + 1].noalias() = m_value_ * cocycle_[uk];
      descend(k + 1, child);
    }
  }

  const Filter& m_;
  const MatFn& f_;
  int depth_;
  bool all_levels_;
  std::vector<Mat> sums_;
  std::vector<double> scale_;
  std::vector<Mat> cocycle_;
  Mat m_value_, t1_, t2_;
};

void check_guard(const Filter& m, int k, const PointwiseOptions& opt) {
  if (k < 0) throw std::invalid_argument("transfer: level k must be >= 0");
  if (checked_pow(m.dilation(), k, opt.max_preimages) > opt.max_preimages)
    throw std::domain_error(
        "transfer: preimage enumeration guard exceeded; raise PointwiseOptions::max_preimages to override");
}

void add_kron_transpose_block(Eigen::MatrixXcd& target, Eigen::Index row0, Eigen::Index col0,
                              const Mat& b, const Mat& a) {
  // target block += b^T (x) a, the matrix of X -> a X b on column-stacked X.
  const Eigen::Index d = a.rows();
  for (Eigen::Index i1 = 0; i1 < d; ++i1)
    for (Eigen::Index j1 = 0; j1 < d; ++j1) {
      const Cplx w = b(j1, i1);
      if (w == Cplx(0.0, 0.0)) continue;
      for (Eigen::Index i2 = 0; i2 < d; ++i2)
        for (Eigen::Index j2 = 0; j2 < d; ++j2)
          target(row0 + i1 * d + i2, col0 + j1 * d + j2) += w * a(i2, j2);
    }
}

// Scaling convention for harmonic basis elements: trace of the 0th
// coefficient equal to d when it does not vanish, unit Frobenius norm (with
// a sign fixed by the first nonzero real part in scan order) otherwise.
MatTrigPoly normalize_harmonic(MatTrigPoly p, Eigen::Index d) {
  p = p.chopped(1e-11 * std::max(1.0, p.coeff_sup_norm()));
  const double frob = p.frobenius_norm();
  if (frob == 0.0) return p;
  const double tr0 = p.coeff(0).trace().real();
  if (std::abs(tr0) > 1e-8 * std::max(1.0, frob)) return p * Cplx(static_cast<double>(d) / tr0, 0.0);
  p *= Cplx(1.0 / frob, 0.0);
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const Mat c = p.coeff(k);
    for (Eigen::Index row = 0; row < c.rows(); ++row)
      for (Eigen::Index col = 0; col < c.cols(); ++col) {
        const double re = c(row, col).real();
        if (std::abs(re) > 1e-12) return re < 0 ? p * Cplx(-1.0, 0.0) : p;
      }
  }
  return p;
}

}  // namespace

MatTrigPoly transfer_apply(const Filter& m, const MatTrigPoly& f) {
  if (!f.is_square() || f.dim() != m.dim())
    throw std::invalid_argument("transfer_apply: f must be square with the filter dimension");
  return (m.poly_adjoint() * f * m.poly()).downsampled(m.dilation());
}

double harmonic_residual(const Filter& m, const MatTrigPoly& h) {
  return (transfer_apply(m, h) - h).coeff_sup_norm();
}

Mat transfer_apply_pointwise(const Filter& m, const MatFn& f, int k, double x,
                             const PointwiseOptions& opt) {
  check_guard(m, k, opt);
  PreimageWalk walk(m, f, k, /*all_levels=*/false);
  return walk.run(x)[static_cast<std::size_t>(k)];
}

std::vector<Mat> transfer_iterates(const Filter& m, const MatFn& f, int depth, double x,
                                   const PointwiseOptions& opt) {
  check_guard(m, depth, opt);
  PreimageWalk walk(m, f, depth, /*all_levels=*/true);
  return walk.run(x);
}

int min_degree_bound(const Filter& m) {
  const int W = m.poly().width();
  const int N = m.dilation();
  return (W + N - 2) / (N - 1);
}

Eigen::VectorXcd stack_coefficients(const MatTrigPoly& f, int K) {
  const Eigen::Index d = f.dim();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero((2 * K + 1) * d * d);
  for (int k = -K; k <= K; ++k) {
    const Mat c = f.coeff(k);
    for (Eigen::Index col = 0; col < d; ++col)
      for (Eigen::Index row = 0; row < d; ++row)
        v((k + K) * d * d + col * d + row) = c(row, col);
  }
  return v;
}

MatTrigPoly unstack_coefficients(const Eigen::VectorXcd& v, int K, Eigen::Index d) {
  std::vector<Mat> coeffs;
  coeffs.reserve(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    Mat c(d, d);
    for (Eigen::Index col = 0; col < d; ++col)
      for (Eigen::Index row = 0; row < d; ++row)
        c(row, col) = v((k + K) * d * d + col * d + row);
    coeffs.push_back(std::move(c));
  }
  return MatTrigPoly(-K, std::move(coeffs));
}

Eigen::MatrixXcd transition_operator(const Filter& m, int K) {
  const int bound = min_degree_bound(m);
  if (K < bound)
    throw std::invalid_argument("transition_operator: degree bound " + std::to_string(K) +
                                " is below the invariance bound; minimal admissible K is " +
                                std::to_string(bound));
  const Eigen::Index d = m.dim();
  const int N = m.dilation();
  const Eigen::Index dd = d * d;
  const Eigen::Index n = (2 * K + 1) * dd;
  Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(n, n);
  const MatTrigPoly& mp = m.poly();
  for (int j = -K; j <= K; ++j)
    for (int k = -K; k <= K; ++k)
      for (int t = mp.k_min(); t <= mp.k_max(); ++t) {
        const int s = N * j - k + t;
        if (s < mp.k_min() || s > mp.k_max()) continue;
        add_kron_transpose_block(matrix, (j + K) * dd, (k + K) * dd, mp.coeff(s),
                                 mp.coeff(t).adjoint());
      }
  return matrix;
}

TransitionMatrix transition_matrix(const Filter& m, int K, double tol) {
  const Eigen::Index d = m.dim();
  const Eigen::Index n = (2 * K + 1) * d * d;

  TransitionMatrix out;
  out.degree_bound = K;
  out.dim = d;
  out.matrix = transition_operator(m, K);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(out.matrix, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("transition_matrix: eigensolver failed");
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Cplx u, Cplx v) {
    if (std::abs(u) != std::abs(v)) return std::abs(u) > std::abs(v);
    if (u.real() != v.real()) return u.real() > v.real();
    return u.imag() > v.imag();
  });

  // Kernel of (M - I): the eigenvalue-1 eigenspace.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      out.matrix - Eigen::MatrixXcd::Identity(n, n), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = std::max(tol, tol * sv(0));
  int rank1 = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) ++rank1;
  if (rank1 == 0) return out;

  // Intersect with the Hermitian-valued polynomials. p -> adjoint(p) is an
  // antilinear involution commuting with R, so the eigenspace carries a real
  // form spanned (over the reals) by p + p^adj and i (p - p^adj).
  std::vector<Eigen::VectorXcd> candidates;
  for (Eigen::Index i = n - rank1; i < n; ++i) {
    const MatTrigPoly p = unstack_coefficients(svd.matrixV().col(i), K, d);
    const MatTrigPoly sum = p + p.adjoint();
    const MatTrigPoly diff = (p - p.adjoint()) * Cplx(0.0, 1.0);
    candidates.push_back(stack_coefficients(sum, K));
    candidates.push_back(stack_coefficients(diff, K));
  }
  Eigen::MatrixXd real_candidates(2 * n, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    real_candidates.col(static_cast<Eigen::Index>(c)).head(n) = candidates[c].real();
    real_candidates.col(static_cast<Eigen::Index>(c)).tail(n) = candidates[c].imag();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(real_candidates);
  qr.setThreshold(1e-9);
  const Eigen::Index rank = std::min<Eigen::Index>(qr.rank(), rank1);
  if (rank == 0) return out;
  Eigen::MatrixXd span =
      qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, rank);

  // Deterministic presentation: the constant identity first whenever it lies
  // in the fixed space, the rest orthonormalized behind it.
  Eigen::VectorXcd id_stack = stack_coefficients(MatTrigPoly::identity(d), K);
  Eigen::VectorXd id_real(2 * n);
  id_real.head(n) = id_stack.real();
  id_real.tail(n) = id_stack.imag();
  Eigen::VectorXd id_proj = span * (span.transpose() * id_real);
  std::vector<Eigen::VectorXd> ordered;
  if (id_proj.norm() > 1e-8 && (id_proj - id_real).norm() <= 1e-7 * id_real.norm()) {
    ordered.push_back(id_proj.normalized());
  }
  for (Eigen::Index c = 0; c < rank; ++c) {
    Eigen::VectorXd v = span.col(c);
    for (const auto& b : ordered) v -= b.dot(v) * b;
    if (v.norm() > 1e-8) ordered.push_back(v.normalized());
    if (static_cast<Eigen::Index>(ordered.size()) == rank) break;
  }

  for (const auto& v : ordered) {
    Eigen::VectorXcd u(n);
    u.real() = v.head(n);
    u.imag() = v.tail(n);
    MatTrigPoly p = unstack_coefficients(u, K, d).hermitian_symmetrized();
    out.fixed_basis.push_back(normalize_harmonic(std::move(p), d));
  }
  return out;
}

std::vector<HarmonicElement> fixed_space(const Filter& m, int K, double tol) {
  const TransitionMatrix tm = transition_matrix(m, K, tol);
  std::vector<HarmonicElement> basis;
  basis.reserve(tm.fixed_basis.size());
  for (const MatTrigPoly& p : tm.fixed_basis) {
    HarmonicElement e;
    e.poly = p;
    e.residual = harmonic_residual(m, p);
    e.hermitian = p.is_hermitian_valued(1e-9);
    e.positivity_floor = positivity_floor(p, 512);
    basis.push_back(std::move(e));
  }
  return basis;
}

bool lawton_orthogonal(const std::vector<HarmonicElement>& basis, double tol) {
  if (basis.size() != 1) return false;
  const MatTrigPoly& h = basis[0].poly;
  if (h.is_zero() || h.width() != 0) return false;
  return operator_norm(h.coeff(0) - Mat::Identity(h.dim(), h.dim())) <= tol;
}

}  // namespace mwt
