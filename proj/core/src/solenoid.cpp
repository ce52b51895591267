#include "mwt/solenoid.hpp"

#include <cmath>
#include <stdexcept>

#include "mwt/cascade.hpp"
#include "mwt/detail/rng.hpp"

namespace mwt {
namespace {

// Digit string as a base-N integer, g_n = omega_1 + N omega_2 + ... Anchors
// are x_k = (x + g_k)/N^k. Past 2^62 the direct formula would overflow and
// the recursive update takes over (the difference is below double rounding).
double anchor_of(double base, int N, const std::vector<int>& digits, int k,
                 const std::vector<double>& previous) {
  long double g = 0.0L;
  long double pw = 1.0L;
  bool exact = true;
  for (int i = 0; i < k; ++i) {
    g += pw * digits[static_cast<std::size_t>(i)];
    pw *= N;
    if (pw > 4.6e18L) {
      exact = false;
      break;
    }
  }
  if (exact) {
    long double scale = 1.0L;
    for (int i = 0; i < k; ++i) scale *= N;
    return static_cast<double>((static_cast<long double>(base) + g) / scale);
  }
  return (previous[static_cast<std::size_t>(k - 1)] + digits[static_cast<std::size_t>(k - 1)]) / N;
}

}  // namespace

Word make_word(const Filter& m, double base) {
  if (base < 0.0 || base >= 1.0) throw std::invalid_argument("make_word: base must lie in [0,1)");
  Word w;
  w.base = base;
  w.modulus = m.dilation();
  w.anchors = {base};
  w.cocycle = Mat::Identity(m.dim(), m.dim());
  return w;
}

Word extend_word(const Word& w, int digit, const Filter& m) {
  const int N = w.modulus;
  if (m.dilation() != N) throw std::invalid_argument("extend_word: dilation mismatch");
  if (digit < 0 || digit >= N) throw std::invalid_argument("extend_word: digit out of range");
  Word out = w;
  out.digits.push_back(digit);
  out.anchors.push_back(anchor_of(out.base, N, out.digits, out.depth(), out.anchors));
  out.cocycle = m.poly().eval(out.anchors.back()) * w.cocycle;
  return out;
}

Word word_from_digits(const Filter& m, double base, std::span<const int> digits) {
  Word w = make_word(m, base);
  for (int digit : digits) w = extend_word(w, digit, m);
  return w;
}

CylinderMass cylinder_measure(const Filter& m, const MatTrigPoly& h, const Word& w) {
  if (h.dim() != m.dim()) throw std::invalid_argument("cylinder_measure: dimension mismatch");
  CylinderMass out;
  const double scale = std::pow(static_cast<double>(m.dilation()), -w.depth());
  out.mass = scale * (w.cocycle.adjoint() * h.eval(w.anchor()) * w.cocycle);
  out.trace = out.mass.trace().real();
  out.h_harmonic = harmonic_residual(m, h) <= 1e-8;
  return out;
}

Mat martingale_value(const Filter& m, const MatTrigPoly& h, const MatTrigPoly& h0, const Word& w) {
  if (h.dim() != m.dim() || h0.dim() != m.dim())
    throw std::invalid_argument("martingale_value: dimension mismatch");
  const double x = w.anchor();
  const Mat weighted_h = w.cocycle.adjoint() * h.eval(x) * w.cocycle;
  const double denom = weighted_h.trace().real();
  if (!(denom > 0.0)) throw std::domain_error("martingale_value: path outside support");
  return (w.cocycle.adjoint() * h0.eval(x) * w.cocycle) / denom;
}

SampledPath sample_path(const Filter& m, const MatTrigPoly& h, double x, int depth,
                        std::uint64_t seed) {
  if (depth < 0) throw std::invalid_argument("sample_path: depth must be >= 0");
  const int N = m.dilation();
  SampledPath out;
  out.word = make_word(m, x);
  std::uint64_t state = detail::splitmix64(seed);
  std::vector<double> weights(static_cast<std::size_t>(N));
  for (int level = 0; level < depth; ++level) {
    double total = 0.0;
    std::vector<Word> children;
    children.reserve(static_cast<std::size_t>(N));
    for (int digit = 0; digit < N; ++digit) {
      children.push_back(extend_word(out.word, digit, m));
      const Mat& coc = children.back().cocycle;
      const double trace =
          (coc.adjoint() * h.eval(children.back().anchor()) * coc).trace().real();
      weights[static_cast<std::size_t>(digit)] = std::max(trace, 0.0);
      total += weights[static_cast<std::size_t>(digit)];
    }
    int chosen = N - 1;
    const double u = detail::next_unit(state);
    if (total <= 0.0) {
      out.used_uniform_fallback = true;
      chosen = std::min(N - 1, static_cast<int>(u * N));
    } else {
      double acc = 0.0;
      for (int digit = 0; digit < N; ++digit) {
        acc += weights[static_cast<std::size_t>(digit)] / total;
        if (u < acc) {
          chosen = digit;
          break;
        }
      }
    }
    out.word = std::move(children[static_cast<std::size_t>(chosen)]);
  }
  return out;
}

Word uniform_word(const Filter& m, double x, int depth, std::uint64_t seed) {
  if (depth < 0) throw std::invalid_argument("uniform_word: depth must be >= 0");
  const int N = m.dilation();
  Word w = make_word(m, x);
  std::uint64_t state = detail::splitmix64(seed);
  for (int level = 0; level < depth; ++level) {
    const int digit = std::min(N - 1, static_cast<int>(detail::next_unit(state) * N));
    w = extend_word(w, digit, m);
  }
  return w;
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t index) {
  return detail::splitmix64(base_seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
}

Mat atom_mass(const Filter& m, double x, long long g, double tol) {
  const Mat p = infinite_product(m, x + static_cast<double>(g), tol).first;
  return p.adjoint() * p;
}

AtomCylinderComparison atoms_vs_cylinder(const Filter& m, const MatTrigPoly& h, const Word& w,
                                         int truncation, double tol) {
  if (truncation < 0) throw std::invalid_argument("atoms_vs_cylinder: truncation must be >= 0");
  AtomCylinderComparison out;
  out.cylinder = cylinder_measure(m, h, w).mass;

  const int N = m.dilation();
  double g_n = 0.0;
  double stride = 1.0;
  for (int i = 0; i < w.depth(); ++i) {
    g_n += stride * w.digits[static_cast<std::size_t>(i)];
    stride *= N;
  }
  const Eigen::Index d = m.dim();
  out.atom_sum = Mat::Zero(d, d);
  for (long long t = -truncation; t <= truncation; ++t) {
    const double g = g_n + stride * static_cast<double>(t);
    const Mat p = infinite_product(m, w.base + g, tol).first;
    out.atom_sum.noalias() += p.adjoint() * p;
  }
  out.gap = operator_norm(out.cylinder - out.atom_sum);
  return out;
}

Mat cocycle_product(const Filter& m, double y, int k) {
  const Eigen::Index d = m.dim();
  Mat product = Mat::Identity(d, d);
  Mat m_value(d, d), next(d, d);
  double arg = y;
  for (int j = 0; j < k; ++j) {
    m.poly().eval_into(arg, m_value);
    if (j == 0) {
      product = m_value;
    } else {
      next.noalias() = product * m_value;
      product.swap(next);
    }
    arg *= m.dilation();
  }
  return product;
}

Cplx inner_product_level(const Filter& m, const MatTrigPoly& h, const MatTrigPoly& f,
                         const MatTrigPoly& g, int k, int grid_size, const PointwiseOptions& opt) {
  if (k < 0 || grid_size < 1)
    throw std::invalid_argument("inner_product_level: k >= 0 and grid_size >= 1 required");
  const Eigen::Index d = m.dim();
  if (f.rows() != d || f.cols() != 1 || g.rows() != d || g.cols() != 1 || h.dim() != d)
    throw std::invalid_argument("inner_product_level: sections must be d x 1 with matching h");
  // The guard caps the cocycle length like the preimage enumeration it
  // replaces.
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<std::uint64_t>(m.dilation());
    if (count > opt.max_preimages)
      throw std::domain_error("inner_product_level: level guard exceeded");
  }
  Cplx sum(0.0, 0.0);
  for (int i = 0; i < grid_size; ++i) {
    const double y = (2.0 * i + 1.0) / (2.0 * grid_size);
    const Mat coc = cocycle_product(m, y, k);
    const Mat fy = coc * f.eval(y);
    const Mat gy = coc * g.eval(y);
    sum += (fy.adjoint() * h.eval(y) * gy)(0, 0);
  }
  return sum / static_cast<double>(grid_size);
}

}  // namespace mwt
