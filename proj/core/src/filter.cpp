#include "mwt/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mwt {
namespace {

ELReport analyze_low_pass(const Mat& a, double tol) {
  ELReport report;
  report.tol = tol;
  const Eigen::Index d = a.rows();

  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("el_condition: eigensolver failed");
  for (Eigen::Index i = 0; i < d; ++i) report.eigenvalues.push_back(es.eigenvalues()(i));
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](Cplx u, Cplx v) {
    if (std::abs(u) != std::abs(v)) return std::abs(u) > std::abs(v);
    if (u.real() != v.real()) return u.real() > v.real();
    return u.imag() > v.imag();
  });

  int algebraic = 0;
  double outside = 0.0;
  for (Cplx lambda : report.eigenvalues) {
    if (std::abs(lambda - Cplx(1.0, 0.0)) <= tol)
      ++algebraic;
    else
      outside = std::max(outside, std::abs(lambda));
  }
  if (algebraic == 0 || outside >= 1.0 - tol) {
    report.l = 0;
    report.satisfied = false;
    return report;
  }

  // Geometric eigenspace of the eigenvalue 1 via the singular values of a - I.
  Eigen::JacobiSVD<Mat> svd(a - Mat::Identity(d, d), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = std::max(tol, tol * sv(0));
  int geometric = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) ++geometric;
  if (geometric != algebraic) {
    report.l = 0;
    report.satisfied = false;
    return report;
  }

  report.l = geometric;
  report.satisfied = true;
  for (Eigen::Index i = d - geometric; i < d; ++i) report.e1_basis.push_back(svd.matrixV().col(i));
  return report;
}

}  // namespace

Filter::Filter(MatTrigPoly m, int dilation, double el_tol, int qmf_grid)
    : poly_(std::move(m)), dilation_(dilation) {
  if (dilation_ < 2) throw std::invalid_argument("Filter: dilation must be >= 2");
  if (!poly_.is_square() || poly_.rows() < 1)
    throw std::invalid_argument("Filter: square nonempty polynomial required");
  poly_adj_ = poly_.adjoint();
  qmf_residual_ = mwt::qmf_residual(poly_, dilation_, qmf_grid);
  el_ = analyze_low_pass(poly_.eval(0.0) / std::sqrt(static_cast<double>(dilation_)), el_tol);
}

ELReport el_condition(const Filter& m, double tol) {
  return analyze_low_pass(m.poly().eval(0.0) / std::sqrt(static_cast<double>(m.dilation())), tol);
}

}  // namespace mwt
