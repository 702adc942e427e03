#pragma once

// Quasimodular forms as polynomials in the weight-2 Eisenstein series:
// F = sum_i a_i g^i with modular coefficients a_i of weight k - 2i, the
// formal variable g standing for G2. The coefficient-wise slash keeps g
// inert; the operator calculus (D, W_k, E, T_k^l, X, Y) manipulates the
// coefficient list symbolically; decompose reverses the expansion map at
// level 1 where Q[G2, G4, G6] gives a computable monomial basis.

#include <vector>

#include "qmh/formexpr.hpp"
#include "qmh/mat2q.hpp"
#include "qmh/puiseux.hpp"
#include "qmh/rng.hpp"

namespace qmh {

struct QuasiModularForm {
  long level = 1;
  long weight = 0;
  // a_0 .. a_s with weight(a_i) = weight - 2i; empty for the zero form
  // (the trailing coefficient of a nonzero form is nonzero).
  std::vector<FormExpr> coeffs;

  long depth() const {
    return coeffs.empty() ? 0 : static_cast<long>(coeffs.size()) - 1;
  }
  bool is_zero() const { return coeffs.empty(); }
};

// Canonicalizing constructor: validates coefficient weights (WeightMismatch)
// and strips trailing zero coefficients. Zero detection is structural plus
// an expansion probe at a fixed internal precision, which is conclusive for
// every coefficient the operator calculus produces at the levels the suites
// use.
QuasiModularForm qm_make(long level, long weight,
                         std::vector<FormExpr> coeffs);
QuasiModularForm qm_zero(long level, long weight);
// Depth-0 embedding of a modular expression (level taken from the atom).
QuasiModularForm qm_from_modular(const FormExpr& f);
// The quasimodular atom itself: weight 2, depth 1, coefficients [0, 1].
QuasiModularForm qm_g2();

// The expansion sum_i expand(a_i) G2^i, realized as a FormExpr with the
// actual weight-2 atom substituted for g (for expansion and display only;
// the slash of this expression is NOT the coefficient-wise ||).
FormExpr qm_to_form_expr(const QuasiModularForm& f);
PuiseuxSeries qm_expand(const QuasiModularForm& f, Frac prec);

// Coefficient-wise equality of expansions at the given precision.
bool qm_equal(const QuasiModularForm& a, const QuasiModularForm& b,
              Frac prec);

QuasiModularForm qm_add(const QuasiModularForm& a, const QuasiModularForm& b);
QuasiModularForm qm_scale(const CycRational& c, const QuasiModularForm& f);
QuasiModularForm qm_scale(const Rational& c, const QuasiModularForm& f);
QuasiModularForm qm_mul(const QuasiModularForm& a, const QuasiModularForm& b);

// f || alpha = sum_i (a_i slashed in weight k - 2i) g^i. The level of the
// result tracks the levels of the slashed coefficients. det(alpha) > 0.
QuasiModularForm qm_dslash(const QuasiModularForm& f, const Mat2Q& alpha,
                           Frac prec_hint = Frac(32, 1));

// Derivations and weight operators on the g-polynomial:
//   D: differentiates g with D(g) = -(5/24) G4 + (1/2) g^2 (coefficients
//      inert); weight +2, depth at most +1.
//   W_k (k >= 1): sum_i i a_i g^(i + k - 2); weight +(2k - 4).
//   E: multiplication by G4; weight +4.
//   T_k^l = E^l W_k.
//   X: Serre derivative on each coefficient (g inert); weight +2.
//   Y: multiplies a_i by (k - 2i)/2 (half the coefficient weight).
QuasiModularForm op_D(const QuasiModularForm& f);
QuasiModularForm op_W(long k, const QuasiModularForm& f);
QuasiModularForm op_E(const QuasiModularForm& f);
QuasiModularForm op_T(long k, long l, const QuasiModularForm& f);
QuasiModularForm op_X(const QuasiModularForm& f);
QuasiModularForm op_Y(const QuasiModularForm& f);

// Inverts the expansion map at level 1: finds modular coefficients a_i
// (polynomials in G4, G6) of weight k - 2i, depth <= depth_bound, whose
// g-polynomial reproduces the series. Errors: NotDecomposable when the
// series is not such an expansion (inconsistent system, non-integral
// exponents, irrational coefficients); InsufficientPrecision when too few
// terms are known to pin the coefficients down.
QuasiModularForm decompose(const PuiseuxSeries& series, long weight,
                           long depth_bound);

// Random level-1 form of the given weight and depth bound (test helper);
// coefficients are small random combinations of the G4/G6 monomial basis.
QuasiModularForm qm_random(RandomSource& rs, long weight, long depth_bound);

std::string qm_to_string(const QuasiModularForm& f);

}  // namespace qmh
