#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mwt/filter.hpp"
#include "mwt/transfer.hpp"
#include "mwt/trigmat.hpp"

namespace mwt {

/// A finite backward orbit under x -> N x (mod 1): a base point, digits
/// omega_1 ... omega_n choosing the inverse branch (x + omega)/N at every
/// step, the anchors x_0 = x, x_k = (x_{k-1} + omega_k)/N, and the running
/// cocycle m^(n)(x_n) = m(x_n) m(x_{n-1}) ... m(x_1) (identity for the empty
/// word).
///
/// Anchors are recomputed from the base per depth as (x + g_k)/N^k with
/// g_k the digit string read as a base-N integer, so no rounding error
/// accumulates along the word; for N-adic bases and N a power of two they
/// are exact.
struct Word {
  double base = 0.0;
  int modulus = 2;  // N
  std::vector<int> digits;
  std::vector<double> anchors;  // anchors[k] = x_k, size depth() + 1
  Mat cocycle;

  int depth() const { return static_cast<int>(digits.size()); }
  double anchor() const { return anchors.back(); }
};

/// The empty word over the fiber of `base`.
Word make_word(const Filter& m, double base);

/// Appends a digit in {0, ..., N-1}; anchors and the cocycle are extended by
/// m^(n+1)(x_{n+1}) = m(x_{n+1}) m^(n)(x_n).
Word extend_word(const Word& w, int digit, const Filter& m);

Word word_from_digits(const Filter& m, double base, std::span<const int> digits);

/// The operator-valued mass of the cylinder selected by a word,
///
///   P_x(C_{omega_1 ... omega_n}) = N^{-n} (m^(n)^* h m^(n))(x_n),
///
/// with trace the scalar path measure of the cylinder. Harmonicity of h is
/// needed for additivity over children; a failing check only sets the flag.
struct CylinderMass {
  Mat mass;
  double trace = 0.0;
  bool h_harmonic = true;
};

CylinderMass cylinder_measure(const Filter& m, const MatTrigPoly& h, const Word& w);

/// The normalized matrix martingale ratio at the word's depth,
///
///   (m^(k)^* h0 m^(k)) / Tr(m^(k)^* h m^(k))   at x_k.
///
/// Throws "path outside support" when the denominator trace vanishes.
Mat martingale_value(const Filter& m, const MatTrigPoly& h, const MatTrigPoly& h0, const Word& w);

/// Digits drawn with probabilities proportional to the child cylinder
/// traces (the scalar path measure). Fully determined by the seed; when a
/// parent cylinder has zero trace the digits fall back to the uniform
/// distribution and the flag records it.
struct SampledPath {
  Word word;
  bool used_uniform_fallback = false;
};

SampledPath sample_path(const Filter& m, const MatTrigPoly& h, double x, int depth,
                        std::uint64_t seed);

/// A word with independent uniform digits (the Bernoulli sampler).
Word uniform_word(const Filter& m, double x, int depth, std::uint64_t seed);

/// Stream splitting for batch runs: the RNG seed of path `index` under a
/// base seed, a splitmix64 mix so neighbouring indices decorrelate.
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t index);

/// Mass of the atom over the lattice translate g of x: P(x+g)^* P(x+g).
/// Requires the low-pass condition.
Mat atom_mass(const Filter& m, double x, long long g, double tol = 1e-12);

/// Compares the cylinder mass of a word with the sum of the atoms it
/// contains. Atoms sit at lattice translates g = g_n + N^n t of the base
/// point, where g_n is the word's digit string as a base-N integer; the two
/// agree exactly when h is the correlation unit of the cascade, and the gap
/// decreases as the truncation grows.
struct AtomCylinderComparison {
  Mat atom_sum;
  Mat cylinder;
  double gap = 0.0;  // ||cylinder - atom_sum||
};

AtomCylinderComparison atoms_vs_cylinder(const Filter& m, const MatTrigPoly& h, const Word& w,
                                         int truncation, double tol = 1e-12);

/// The level-k inner product of two vector-valued sections f, g (d x 1
/// trigonometric polynomials),
///
///   <f, g>_k = integral of N^{-k} sum_{N^k y = x} <m^(k)(y) f(y), h(y) m^(k)(y) g(y)> dmu(x),
///
/// which strong invariance of the normalized Lebesgue measure collapses to a
/// single midpoint quadrature of <m^(k) f, h m^(k) g>. The quadrature is
/// exact once grid_size exceeds the bandwidth of the integrand.
Cplx inner_product_level(const Filter& m, const MatTrigPoly& h, const MatTrigPoly& f,
                         const MatTrigPoly& g, int k, int grid_size,
                         const PointwiseOptions& opt = {});

/// The ordered cocycle product m^(k)(y) = m(y) m(N y) ... m(N^{k-1} y).
Mat cocycle_product(const Filter& m, double y, int k);

}  // namespace mwt
