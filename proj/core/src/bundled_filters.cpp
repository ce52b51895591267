#include "mwt/bundled_filters.hpp"

#include <cmath>
#include <stdexcept>

#include "mwt/detail/rng.hpp"

namespace mwt::filters {
namespace {

Mat random_unitary(Eigen::Index n, std::uint64_t& state) {
  Mat g(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      g(r, c) = Cplx(detail::next_gaussian(state), detail::next_gaussian(state));
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ();
}

CVec random_unit_vector(Eigen::Index n, std::uint64_t& state) {
  CVec v(n);
  for (Eigen::Index r = 0; r < n; ++r)
    v(r) = Cplx(detail::next_gaussian(state), detail::next_gaussian(state));
  return v / v.norm();
}

}  // namespace

Filter haar() {
  const double c = std::sqrt(0.5);
  Mat c0(1, 1), c1(1, 1);
  c0(0, 0) = c;
  c1(0, 0) = c;
  return Filter(MatTrigPoly(0, {c0, c1}), 2);
}

Filter stretched_haar() {
  const double c = std::sqrt(0.5);
  Mat ck(1, 1);
  ck(0, 0) = c;
  std::vector<Mat> coeffs(4, Mat::Zero(1, 1));
  coeffs[0] = ck;
  coeffs[3] = ck;
  return Filter(MatTrigPoly(0, std::move(coeffs)), 2);
}

MatTrigPoly stretched_haar_fixed_point() {
  std::vector<Mat> coeffs(5, Mat::Zero(1, 1));
  coeffs[0](0, 0) = 1.0 / 3.0;
  coeffs[1](0, 0) = 2.0 / 3.0;
  coeffs[2](0, 0) = 1.0;
  coeffs[3](0, 0) = 2.0 / 3.0;
  coeffs[4](0, 0) = 1.0 / 3.0;
  return MatTrigPoly(-2, std::move(coeffs));
}

Filter diag_haar_one() {
  const double c = std::sqrt(0.5);
  Mat c0 = Mat::Zero(2, 2), c1 = Mat::Zero(2, 2);
  c0(0, 0) = c;
  c0(1, 1) = 1.0;
  c1(0, 0) = c;
  return Filter(MatTrigPoly(0, {c0, c1}), 2);
}

Filter haar_identity(Eigen::Index d) {
  const double c = std::sqrt(0.5);
  const Mat block = c * Mat::Identity(d, d);
  return Filter(MatTrigPoly(0, {block, block}), 2);
}

Filter random_qmf(Eigen::Index d, int N, int factors, std::uint64_t seed) {
  if (d < 1 || N < 2 || factors < 0) throw std::invalid_argument("random_qmf: bad parameters");
  std::uint64_t state = detail::splitmix64(seed);
  const Eigen::Index nd = d * static_cast<Eigen::Index>(N);

  // Polyphase isometry E(y) as a degree-`factors` matrix polynomial with
  // E(y)^* E(y) = I identically: a product of paraunitary lattice factors
  // (I - P) + e^{2 pi i y} P applied to the first d columns of a unitary.
  std::vector<Mat> poly(1, random_unitary(nd, state).leftCols(d));
  for (int f = 0; f < factors; ++f) {
    const CVec u = random_unit_vector(nd, state);
    const Mat proj = u * u.adjoint();
    const Mat rest = Mat::Identity(nd, nd) - proj;
    std::vector<Mat> next(poly.size() + 1, Mat::Zero(nd, d));
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k].noalias() += rest * poly[k];
      next[k + 1].noalias() += proj * poly[k];
    }
    poly = std::move(next);
  }

  // m coefficients interleave the polyphase rows: c_{i + N j} = block i of
  // the degree-j polyphase coefficient.
  std::vector<Mat> coeffs(static_cast<std::size_t>(N) * poly.size(), Mat::Zero(d, d));
  for (std::size_t j = 0; j < poly.size(); ++j)
    for (int i = 0; i < N; ++i)
      coeffs[static_cast<std::size_t>(i) + static_cast<std::size_t>(N) * j] =
          poly[j].block(i * d, 0, d, d);
  return Filter(MatTrigPoly(0, std::move(coeffs)), N);
}

}  // namespace mwt::filters
