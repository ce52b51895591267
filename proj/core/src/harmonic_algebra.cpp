#include "mwt/harmonic_algebra.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "mwt/parallel.hpp"

namespace mwt {
namespace {

constexpr const char* kUnitNotBoundedBelow = "unit not bounded below";

// Scalar (d = 1) view of a trig polynomial, for the hot star-product walk.
struct ScalarPoly {
  int k_min = 0;
  std::vector<Cplx> c;

  static ScalarPoly from(const MatTrigPoly& p) {
    ScalarPoly sp;
    sp.k_min = p.k_min();
    for (int k = p.k_min(); k <= p.k_max(); ++k) sp.c.push_back(p.coeff(k)(0, 0));
    return sp;
  }

  // z must be e^{2 pi i x}; |z| = 1 so z^{-1} = conj(z).
  Cplx eval(Cplx z) const {
    if (c.empty()) return Cplx(0.0, 0.0);
    Cplx acc = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * z + c[i];
    if (k_min > 0) {
      for (int t = 0; t < k_min; ++t) acc *= z;
    } else {
      const Cplx zi = std::conj(z);
      for (int t = 0; t < -k_min; ++t) acc *= zi;
    }
    return acc;
  }
};

// One walk of the inverse-branch tree accumulating |m^(k)|^2 g(x_k) per
// level, everything in scalar arithmetic.
class ScalarStarWalk {
 public:
  ScalarStarWalk(const Filter& m, const MatTrigPoly& h1, const MatTrigPoly& h2,
                 const MatTrigPoly& h, int depth, double floor_tol)
      : m_(ScalarPoly::from(m.poly())),
        h1_(ScalarPoly::from(h1)),
        h2_(ScalarPoly::from(h2)),
        h_(ScalarPoly::from(h)),
        N_(m.dilation()),
        depth_(depth),
        floor_tol_(floor_tol) {
    scale_.resize(static_cast<std::size_t>(depth_) + 1);
    double s = 1.0;
    for (int k = 0; k <= depth_; ++k, s /= N_) scale_[static_cast<std::size_t>(k)] = s;
  }

  std::vector<Cplx> run(double x) {
    sums_.assign(static_cast<std::size_t>(depth_) + 1, Cplx(0.0, 0.0));
    const double xr = x - std::floor(x);
    descend(0, xr, std::polar(1.0, kTwoPi * xr), 1.0);
    return sums_;
  }

 private:
  void descend(int k, double x, Cplx z, double weight) {
    const Cplx hv = h_.eval(z);
    if (hv.real() < floor_tol_) throw std::domain_error(kUnitNotBoundedBelow);
    sums_[static_cast<std::size_t>(k)] += (scale_[static_cast<std::size_t>(k)] * weight) *
                                          (h1_.eval(z) * h2_.eval(z) / hv);
    if (k == depth_) return;
    for (int digit = 0; digit < N_; ++digit) {
      const double child = (x + digit) / N_;
      const Cplx zc = std::polar(1.0, kTwoPi * child);
      descend(k + 1, child, zc, weight * std::norm(m_.eval(zc)));
    }
  }

  ScalarPoly m_, h1_, h2_, h_;
  int N_;
  int depth_;
  double floor_tol_;
  std::vector<double> scale_;
  std::vector<Cplx> sums_;
};

// g(x) = h1(x) h(x)^{-1} h2(x) with the inversion guarded by the positivity
// floor; h is never regularized, a singular unit fails loudly.
MatFn make_guarded_product(const MatTrigPoly& h1, const MatTrigPoly& h2, const MatTrigPoly& h,
                           double floor_tol) {
  const Eigen::Index d = h.dim();
  return [&h1, &h2, &h, floor_tol, d, v1 = Mat(d, d), v2 = Mat(d, d), vh = Mat(d, d),
          hinv = Mat(d, d), tmp = Mat(d, d)](double x) mutable -> Mat {
    h1.eval_into(x, v1);
    h2.eval_into(x, v2);
    h.eval_into(x, vh);
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (vh + vh.adjoint())));
    if (es.eigenvalues()(0) < floor_tol) throw std::domain_error(kUnitNotBoundedBelow);
    hinv.noalias() = es.eigenvectors() *
                     es.eigenvalues().cwiseInverse().cast<Cplx>().asDiagonal() *
                     es.eigenvectors().adjoint();
    tmp.noalias() = hinv * v2;
    return v1 * tmp;
  };
}

std::vector<std::vector<Mat>> iterate_on_grid(const Filter& m, const MatTrigPoly& h1,
                                              const MatTrigPoly& h2, const MatTrigPoly& h,
                                              int depth, const StarOptions& opt) {
  const int G = opt.grid_size;
  std::vector<std::vector<Mat>> iterates(static_cast<std::size_t>(G));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const bool scalar = m.dim() == 1;
  parallel_for(0, G, [&](int i) {
    try {
      const double x = (2.0 * i + 1.0) / (2.0 * G);
      if (scalar) {
        ScalarStarWalk walk(m, h1, h2, h, depth, opt.floor_tol);
        const std::vector<Cplx> sums = walk.run(x);
        std::vector<Mat> levels(sums.size());
        for (std::size_t k = 0; k < sums.size(); ++k) {
          levels[k] = Mat(1, 1);
          levels[k](0, 0) = sums[k];
        }
        iterates[static_cast<std::size_t>(i)] = std::move(levels);
      } else {
        const MatFn g = make_guarded_product(h1, h2, h, opt.floor_tol);
        PointwiseOptions popt;
        popt.max_preimages = opt.max_preimages;
        iterates[static_cast<std::size_t>(i)] = transfer_iterates(m, g, depth, x, popt);
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return iterates;
}

std::vector<double> sup_increments(const std::vector<std::vector<Mat>>& iterates, int depth) {
  std::vector<double> delta(static_cast<std::size_t>(depth) + 1, 0.0);
  for (const auto& levels : iterates)
    for (int k = 1; k <= depth; ++k)
      delta[static_cast<std::size_t>(k)] = std::max(
          delta[static_cast<std::size_t>(k)],
          operator_norm(levels[static_cast<std::size_t>(k)] - levels[static_cast<std::size_t>(k - 1)]));
  return delta;
}

}  // namespace

MatTrigPoly cesaro_average(const Filter& m, const MatTrigPoly& f, long n_terms) {
  if (n_terms < 1) throw std::invalid_argument("cesaro_average: n_terms must be >= 1");
  if (!f.is_square() || f.dim() != m.dim())
    throw std::invalid_argument("cesaro_average: f must be square with the filter dimension");
  if (f.is_zero() || n_terms == 1) return f;
  const int K =
      std::max({min_degree_bound(m), f.k_max(), -f.k_min()});
  const Eigen::MatrixXcd op = transition_operator(m, K);
  Eigen::VectorXcd v = stack_coefficients(f, K);
  Eigen::VectorXcd sum = v;
  Eigen::VectorXcd next(v.size());
  for (long j = 1; j < n_terms; ++j) {
    next.noalias() = op * v;
    v.swap(next);
    sum += v;
  }
  sum /= static_cast<double>(n_terms);
  return unstack_coefficients(sum, K, m.dim());
}

StarProductResult star_product(const Filter& m, const MatTrigPoly& h1, const MatTrigPoly& h2,
                               const MatTrigPoly& h, const StarOptions& opt) {
  if (opt.depth < 1 || opt.grid_size < 1)
    throw std::invalid_argument("star_product: depth and grid_size must be >= 1");
  const Eigen::Index d = m.dim();
  if (h1.dim() != d || h2.dim() != d || h.dim() != d)
    throw std::invalid_argument("star_product: dimension mismatch");
  if (!h.is_hermitian_valued(1e-8))
    throw std::invalid_argument("star_product: unit must be Hermitian-valued");
  if (positivity_floor(h, opt.grid_size) < opt.floor_tol)
    throw std::domain_error(kUnitNotBoundedBelow);

  StarProductResult result;
  result.inputs_harmonic =
      harmonic_residual(m, h1) <= 1e-8 && harmonic_residual(m, h2) <= 1e-8;

  // Deepening schedule: cheap shallow passes first, the full depth only when
  // the iteration has not settled. Every pass recomputes from scratch, so
  // the result does not depend on the schedule.
  std::vector<int> schedule;
  for (int D = 6; D < opt.depth; D += 6) schedule.push_back(D);
  schedule.push_back(opt.depth);

  for (int D : schedule) {
    auto iterates = iterate_on_grid(m, h1, h2, h, D + 1, opt);
    const std::vector<double> delta = sup_increments(iterates, D + 1);
    int k_stop = -1;
    for (int k = 1; k <= D; ++k) {
      if (delta[static_cast<std::size_t>(k)] <= opt.tol) {
        k_stop = k;
        break;
      }
    }
    if (k_stop < 0 && D < opt.depth) continue;
    if (k_stop < 0) k_stop = opt.depth;

    result.depth_used = k_stop;
    result.sup_increment = delta[static_cast<std::size_t>(k_stop)];
    result.converged = result.sup_increment <= opt.tol;
    result.residual = delta[static_cast<std::size_t>(k_stop) + 1];
    result.value.size = opt.grid_size;
    result.value.values.reserve(iterates.size());
    for (auto& levels : iterates)
      result.value.values.push_back(std::move(levels[static_cast<std::size_t>(k_stop)]));
    return result;
  }
  throw std::logic_error("star_product: unreachable");
}

ProjectionReport projection_check(const Filter& m, const MatTrigPoly& p, const MatTrigPoly& h,
                                  double tol, const StarOptions& opt) {
  ProjectionReport report;
  const StarProductResult square = star_product(m, p, p, h, opt);
  double gap = 0.0;
  Mat pv(p.rows(), p.cols());
  for (int i = 0; i < square.value.size; ++i) {
    p.eval_into(square.value.point(i), pv);
    gap = std::max(gap, operator_norm(square.value.values[static_cast<std::size_t>(i)] - pv));
  }
  report.idempotency_gap = gap;
  report.hermitian_gap = (p - p.adjoint()).coeff_sup_norm();
  report.is_projection = report.idempotency_gap <= tol && report.hermitian_gap <= tol;
  return report;
}

OrthogonalityTable orthogonality_table(const Filter& m, const std::vector<MatTrigPoly>& basis,
                                       const MatTrigPoly& h, const StarOptions& opt) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  OrthogonalityTable table;
  table.norms = Eigen::MatrixXd::Zero(n, n);
  table.gaps = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const StarProductResult prod =
          star_product(m, basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)], h, opt);
      double norm = 0.0;
      double diag_gap = 0.0;
      Mat bv(m.dim(), m.dim());
      for (int g = 0; g < prod.value.size; ++g) {
        const Mat& value = prod.value.values[static_cast<std::size_t>(g)];
        norm = std::max(norm, operator_norm(value));
        if (i == j) {
          basis[static_cast<std::size_t>(i)].eval_into(prod.value.point(g), bv);
          diag_gap = std::max(diag_gap, operator_norm(value - bv));
        }
      }
      table.norms(i, j) = norm;
      table.gaps(i, j) = (i == j) ? diag_gap : norm;
    }
  return table;
}

std::optional<double> domination_check(const MatTrigPoly& h0, const MatTrigPoly& h, int grid_size,
                                       double kernel_tol) {
  if (grid_size < 1) throw std::invalid_argument("domination_check: grid_size must be >= 1");
  if (!h0.is_hermitian_valued(1e-8) || !h.is_hermitian_valued(1e-8))
    throw std::invalid_argument("domination_check: Hermitian-valued inputs required");
  const Eigen::Index d = h.dim();
  double c = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    const double x = static_cast<double>(j) / grid_size;
    const Mat hx = 0.5 * (h.eval(x) + h.eval(x).adjoint());
    const Mat h0x = 0.5 * (h0.eval(x) + h0.eval(x).adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(hx);
    const auto& lambda = es.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    const double cut = kernel_tol * scale;
    if (lambda(0) < -cut) return std::nullopt;  // h not positive here
    const Mat b = es.eigenvectors().adjoint() * h0x * es.eigenvectors();
    const double h0_scale = std::max(1.0, operator_norm(h0x));
    Eigen::Index n_kernel = 0;
    while (n_kernel < d && lambda(n_kernel) <= cut) ++n_kernel;
    // h0 must vanish on the kernel block and on the cross block.
    for (Eigen::Index r = 0; r < n_kernel; ++r)
      for (Eigen::Index s = 0; s < d; ++s)
        if (std::abs(b(r, s)) > kernel_tol * h0_scale) return std::nullopt;
    if (n_kernel == d) continue;
    const Eigen::Index nr = d - n_kernel;
    Mat reduced(nr, nr);
    for (Eigen::Index r = 0; r < nr; ++r)
      for (Eigen::Index s = 0; s < nr; ++s)
        reduced(r, s) = b(n_kernel + r, n_kernel + s) /
                        std::sqrt(lambda(n_kernel + r) * lambda(n_kernel + s));
    Eigen::SelfAdjointEigenSolver<Mat> pencil(reduced, Eigen::EigenvaluesOnly);
    const double cx = pencil.eigenvalues().cwiseAbs().maxCoeff();
    c = std::max(c, cx);
  }
  return c;
}

}  // namespace mwt
