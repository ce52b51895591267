#pragma once

#include <cstdint>

#include "mwt/filter.hpp"
#include "mwt/trigmat.hpp"

namespace mwt::filters {

/// m(x) = (1 + e^{2 pi i x}) / sqrt(2), N = 2. Orthogonal; the fixed space
/// of its transfer operator is spanned by the constants.
Filter haar();

/// m(x) = (1 + e^{2 pi i 3 x}) / sqrt(2), N = 2. QMF but non-orthogonal:
/// the fixed space is two-dimensional.
Filter stretched_haar();

/// The closed-form second fixed point of stretched_haar(),
/// 1 + (4/3) cos(2 pi x) + (2/3) cos(4 pi x).
MatTrigPoly stretched_haar_fixed_point();

/// diag((1 + e^{2 pi i x})/sqrt(2), 1), d = 2, N = 2. The two diagonal
/// dynamics have mutually singular path measures, which makes the
/// martingale ratios collapse along generic paths.
Filter diag_haar_one();

/// ((1 + e^{2 pi i x})/sqrt(2)) I_d: a d-dimensional low-pass filter whose
/// eigenvalue-1 eigenspace is all of C^d.
Filter haar_identity(Eigen::Index d);

/// A random exact-QMF filter built from a seeded paraunitary polyphase
/// lattice: E(x) = prod_i (I - P_i + e^{2 pi i x} P_i) U0 restricted to its
/// first d columns, with P_i random rank-one orthogonal projections and U0 a
/// random unitary. `factors` controls the polynomial degree.
Filter random_qmf(Eigen::Index d, int N, int factors, std::uint64_t seed);

}  // namespace mwt::filters
