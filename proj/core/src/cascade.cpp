#include "mwt/cascade.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "mwt/parallel.hpp"

namespace mwt {
namespace {

long long checked_grid_span(int base, int scale, int range) {
  if (scale < 0 || range < 0) throw std::invalid_argument("grid: scale and range must be >= 0");
  long long step = 1;
  for (int s = 0; s < scale; ++s) {
    if (step > (1ll << 60) / base) throw std::invalid_argument("grid: scale too large");
    step *= base;
  }
  if (range != 0 && step > (1ll << 60) / range) throw std::invalid_argument("grid: range too large");
  return step * range;
}

Mat apply_convention(const Mat& p, const CVec& v, ScalingConvention convention) {
  Mat w(p.rows(), 1);
  if (convention == ScalingConvention::Adjoint)
    w.noalias() = p.adjoint() * v;
  else
    w.noalias() = p.transpose() * v;
  return w;
}

std::pair<Mat, LatticeSumReport> lattice_correlation(const Filter& m, const CVec& v, double x,
                                                     int lattice_bound, double tol,
                                                     ScalingConvention convention) {
  if (lattice_bound < 1) throw std::invalid_argument("correlation: lattice_bound must be >= 1");
  const Eigen::Index d = m.dim();
  Mat sum = Mat::Zero(d, d);
  LatticeSumReport report;
  int consecutive = 0;
  for (int shell = 0; shell <= lattice_bound; ++shell) {
    Mat shell_sum = Mat::Zero(d, d);
    for (int sign = 0; sign < (shell == 0 ? 1 : 2); ++sign) {
      const double g = (sign == 0) ? shell : -shell;
      const Mat p = infinite_product(m, x + g).first;
      const Mat w = apply_convention(p, v, convention);
      shell_sum.noalias() += w * w.adjoint();
    }
    sum += shell_sum;
    report.shells_used = shell;
    report.last_shell_increment = operator_norm(shell_sum);
    // Two consecutive negligible shells end the sum; a single small shell
    // can sit on a zero of P while later shells still carry mass.
    consecutive = (report.last_shell_increment <= tol) ? consecutive + 1 : 0;
    if (shell > 0 && consecutive >= 2) {
      report.converged = true;
      break;
    }
  }
  return {sum, report};
}

// Degree bound for correlation polynomials: the scaling function is
// supported on an interval of width W/(N-1), so lags beyond that vanish.
int correlation_degree_bound(const Filter& m) {
  const int W = m.poly().width();
  const int N = m.dilation();
  return (W + N - 2) / (N - 1);
}

MatTrigPoly correlation_polynomial_impl(const Filter& m, const CVec& v, int lattice_bound,
                                        double tol, ScalingConvention convention) {
  const Eigen::Index d = m.dim();
  const int D = correlation_degree_bound(m);
  const int M = 2 * D + 5;
  std::vector<Mat> samples(static_cast<std::size_t>(M));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(0, M, [&](int i) {
    try {
      const double x = (2.0 * i + 1.0) / (2.0 * M);
      samples[static_cast<std::size_t>(i)] =
          lattice_correlation(m, v, x, lattice_bound, tol, convention).first;
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  std::vector<Mat> coeffs;
  coeffs.reserve(static_cast<std::size_t>(2 * D + 1));
  for (int k = -D; k <= D; ++k) {
    Mat c = Mat::Zero(d, d);
    for (int i = 0; i < M; ++i) {
      const double x = (2.0 * i + 1.0) / (2.0 * M);
      c += samples[static_cast<std::size_t>(i)] * std::polar(1.0, -kTwoPi * k * x);
    }
    coeffs.push_back(c / static_cast<double>(M));
  }
  return MatTrigPoly(-D, std::move(coeffs)).hermitian_symmetrized();
}

}  // namespace

std::pair<Mat, ProductReport> infinite_product(const Filter& m, double x, double tol, int kmax,
                                               bool require_el) {
  if (tol < 0 || kmax < 1) throw std::invalid_argument("infinite_product: bad tol or kmax");
  if (require_el && !m.el_report().satisfied)
    throw std::domain_error(
        "infinite_product: low-pass condition E(l) fails; pass require_el = false to override");
  const Eigen::Index d = m.dim();
  const int N = m.dilation();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));

  int k_entry = 0;
  for (double ax = std::abs(x); ax > 1.0; ax /= N) ++k_entry;

  Mat value = Mat::Identity(d, d);
  Mat next(d, d), m_value(d, d);
  ProductReport report;
  double arg = x;
  int consecutive = 0;
  for (int k = 1; k <= kmax; ++k) {
    arg /= N;
    m.poly().eval_into(arg, m_value);
    next.noalias() = (inv_sqrt_n * m_value) * value;
    report.kmax_used = k;
    report.last_increment = operator_norm(next - value);
    value.swap(next);
    consecutive = (report.last_increment <= tol && k >= k_entry) ? consecutive + 1 : 0;
    if (consecutive >= 3) {
      report.converged = true;
      break;
    }
  }
  return {value, report};
}

double GridFunction::point(long long j) const {
  return static_cast<double>(j) / std::pow(static_cast<double>(base), scale);
}

const Mat& GridFunction::at(long long j) const {
  if (j < j_min || j > j_max) throw std::out_of_range("GridFunction: index outside range");
  return values[static_cast<std::size_t>(j - j_min)];
}

GridFunction infinite_product_grid(const Filter& m, int scale, int range, double tol, int kmax) {
  const int N = m.dilation();
  const long long span = checked_grid_span(N, scale, range);
  GridFunction grid;
  grid.base = N;
  grid.scale = scale;
  grid.j_min = -span;
  grid.j_max = span;
  grid.kind = GridFunction::Kind::Matrix;
  grid.values.assign(static_cast<std::size_t>(2 * span + 1), Mat());
  if (!m.el_report().satisfied)
    throw std::domain_error("infinite_product_grid: low-pass condition E(l) fails");

  // Points with N | j follow from the value at j/N by one refinement step;
  // everything else is computed directly, in parallel.
  std::vector<long long> direct;
  for (long long j = -span; j <= span; ++j)
    if (j == 0 || j % N != 0) direct.push_back(j);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(0, static_cast<int>(direct.size()), [&](int i) {
    try {
      const long long j = direct[static_cast<std::size_t>(i)];
      grid.values[static_cast<std::size_t>(j - grid.j_min)] =
          infinite_product(m, grid.point(j), tol, kmax).first;
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  for (long long a = 1; a <= span; ++a)
    for (const long long j : {a, -a}) {
      if (j % N != 0) continue;
      const double parent_point = grid.point(j / N);
      grid.values[static_cast<std::size_t>(j - grid.j_min)] =
          grid.at(j / N) * (inv_sqrt_n * m.poly().eval(parent_point));
    }
  return grid;
}

GridFunction scaling_function_grid(const Filter& m, const CVec& v, int scale, int range, double tol,
                                   bool l2_normalize, ScalingConvention convention) {
  if (v.size() != m.dim()) throw std::invalid_argument("scaling_function_grid: vector size mismatch");
  const Mat low_pass = m.poly().eval(0.0) / std::sqrt(static_cast<double>(m.dilation()));
  if ((low_pass * v - v).norm() > tol * std::max(1.0, v.norm()))
    throw std::invalid_argument("scaling_function_grid: v is not fixed by m(0)/sqrt(N)");

  GridFunction grid = infinite_product_grid(m, scale, range, std::min(tol, 1e-12), 256);
  grid.kind = GridFunction::Kind::Vector;
  for (Mat& value : grid.values) value = apply_convention(value, v, convention);
  if (l2_normalize) {
    const double norm_sq = scaling_l2_norm_sq(m, v, 1000, 1e-13);
    const double factor = 1.0 / std::sqrt(norm_sq);
    for (Mat& value : grid.values) value *= factor;
  }
  return grid;
}

double refinement_residual(const Filter& m, const GridFunction& phihat,
                           ScalingConvention convention) {
  const int N = phihat.base;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  double sup = 0.0;
  for (long long j = phihat.j_min; j <= phihat.j_max; ++j) {
    if (j % N != 0) continue;
    const double parent_point = phihat.point(j) / N;
    const Mat m_value = m.poly().eval(parent_point);
    const Mat factor =
        (convention == ScalingConvention::Adjoint) ? Mat(m_value.adjoint()) : Mat(m_value.transpose());
    const Mat expected = inv_sqrt_n * factor * phihat.at(j / N);
    sup = std::max(sup, operator_norm(phihat.at(j) - expected));
  }
  return sup;
}

std::pair<Mat, LatticeSumReport> correlation_function_raw(const Filter& m, const CVec& v, double x,
                                                          int lattice_bound, double tol) {
  return lattice_correlation(m, v, x, lattice_bound, tol, ScalingConvention::Adjoint);
}

double scaling_l2_norm_sq(const Filter& m, const CVec& v, int lattice_bound, double tol) {
  const int D = correlation_degree_bound(m);
  const int M = std::max(8, 2 * D + 2);
  double mean_trace = 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = (2.0 * i + 1.0) / (2.0 * M);
    mean_trace +=
        lattice_correlation(m, v, x, lattice_bound, tol, ScalingConvention::Adjoint).first.trace().real();
  }
  return mean_trace / M;
}

std::pair<Mat, LatticeSumReport> correlation_function(const Filter& m, const CVec& v, double x,
                                                      int lattice_bound, double tol,
                                                      std::optional<double> norm_sq) {
  auto [sum, report] = correlation_function_raw(m, v, x, lattice_bound, tol);
  const double n2 = norm_sq ? *norm_sq : scaling_l2_norm_sq(m, v, lattice_bound, tol);
  if (n2 <= 0.0) throw std::domain_error("correlation_function: scaling function has zero norm");
  sum /= n2;
  report.last_shell_increment /= n2;
  return {sum, report};
}

MatTrigPoly correlation_polynomial(const Filter& m, const CVec& v, int lattice_bound, double tol,
                                   bool l2_normalized) {
  MatTrigPoly poly = correlation_polynomial_impl(m, v, lattice_bound, tol, ScalingConvention::Adjoint);
  if (l2_normalized) {
    const double n2 = scaling_l2_norm_sq(m, v, lattice_bound, tol);
    if (n2 <= 0.0) throw std::domain_error("correlation_polynomial: scaling function has zero norm");
    poly *= Cplx(1.0 / n2, 0.0);
  }
  return poly;
}

MatTrigPoly correlation_unit(const Filter& m, int lattice_bound, double tol) {
  const ELReport& el = m.el_report();
  if (!el.satisfied) throw std::domain_error("correlation_unit: low-pass condition E(l) fails");
  MatTrigPoly unit = MatTrigPoly::zero(m.dim(), m.dim());
  for (const CVec& v : el.e1_basis)
    unit += correlation_polynomial_impl(m, v, lattice_bound, tol, ScalingConvention::Adjoint);
  return unit;
}

double verify_harmonic_grid(const Filter& m, const MatFn& h, int grid_size, int k,
                            const PointwiseOptions& opt) {
  if (grid_size < 1 || k < 1)
    throw std::invalid_argument("verify_harmonic_grid: grid_size and k must be >= 1");
  std::vector<double> sup(static_cast<std::size_t>(grid_size), 0.0);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(0, grid_size, [&](int i) {
    try {
      const double x = (2.0 * i + 1.0) / (2.0 * grid_size);
      sup[static_cast<std::size_t>(i)] =
          operator_norm(transfer_apply_pointwise(m, h, k, x, opt) - h(x));
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  double result = 0.0;
  for (double s : sup) result = std::max(result, s);
  return result;
}

}  // namespace mwt
