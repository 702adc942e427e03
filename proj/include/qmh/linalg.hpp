#pragma once

// Dense exact linear algebra over Q — just enough to express forms in finite
// monomial bases. No pivoting heuristics are needed over an exact field; the
// pivot order is deterministic (first nonzero in column order).

#include <optional>
#include <vector>

#include "qmh/rational.hpp"

namespace qmh {

using RatMatrix = std::vector<std::vector<Rational>>;

// Solves A x = b exactly (A is rows x cols, all rows the same length).
// Returns nullopt when the system is inconsistent; when underdetermined,
// non-pivot variables are set to 0.
std::optional<std::vector<Rational>> solve_rational(RatMatrix a,
                                                    std::vector<Rational> b);

}  // namespace qmh
