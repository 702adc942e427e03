#pragma once

// Quasimodular Hecke operators: finitely supported covariant functions
// F: Gamma(N)\GL2+(Q) -> quasimodular forms with F_(alpha gamma) =
// F_alpha || sigma gamma sigma^-1 for gamma in Gamma(N) and a unimodular
// twist sigma. Support is stored on canonical double-coset bases; values
// on the rest of each right orbit are derived through the covariance rule.
// The layer provides the convolution products * (over the full support)
// and *^r (over the unimodular cosets), the module action on forms, the
// depth-0 embedding of classical Hecke operators, and pointwise lifts of
// the derivation calculus.

#include <string>
#include <utility>
#include <vector>

#include "qmh/lattice.hpp"
#include "qmh/mat2q.hpp"
#include "qmh/quasimod.hpp"

namespace qmh {

struct HeckeSupportEntry {
  CosetKey key;            // canonical base of the right orbit
  Mat2Q rep;               // key.representative()
  QuasiModularForm value;  // F at that coset
};

struct TwistedHeckeOp {
  long level = 1;
  Mat2Q twist = mat2q(1, 0, 0, 1);  // unimodular
  std::vector<HeckeSupportEntry> bases;

  bool is_zero() const { return bases.empty(); }
};

// Builds an operator from coset assignments (matrix with positive
// determinant, value). Each assignment is transported to its orbit's
// canonical base; overlapping assignments must agree and every base value
// must be consistent under sampled stabilizer returns, else
// CovarianceViolation. Orbit closure is bounded by `guard`
// (GuardExceeded).
TwistedHeckeOp make_op(long level, const Mat2Q& twist,
                       const std::vector<std::pair<Mat2Q, QuasiModularForm>>&
                           assignments,
                       int samples = 25, unsigned long long seed = 20240815,
                       long guard = kDefaultOrbitGuard);

// F_alpha: the value at the left coset of alpha (zero off support).
QuasiModularForm evaluate(const TwistedHeckeOp& F, const Mat2Q& alpha);

// All left cosets in the support: (key, representative) pairs, base order
// then orbit order.
std::vector<std::pair<CosetKey, Mat2Q>> support_left_cosets(
    const TwistedHeckeOp& F);
long support_coset_count(const TwistedHeckeOp& F);

// Convolution (F*G)_alpha = sum_beta F_beta (G_(alpha beta^-1) || beta)
// over the support of F. Twist-1 operators of equal level only.
TwistedHeckeOp star(const TwistedHeckeOp& F, const TwistedHeckeOp& G);

// Restricted convolution over beta in Gamma(N)\SL2(Z) (same formula,
// finite unimodular sum). Twist-1 operators of equal level only.
TwistedHeckeOp star_r(const TwistedHeckeOp& F, const TwistedHeckeOp& G);

// Module action F*f = sum_beta F_beta (f || beta); the sum is
// Gamma(N)-covariant again (level field of the result is N).
QuasiModularForm act_on_form(const TwistedHeckeOp& F,
                             const QuasiModularForm& f);

// Classical normalization: the determinant-normalized slash scales the
// weight-k action on determinant-n cosets by n^(1 - k/2) relative to
// classical Hecke eigenvalues, so multiply by n^(k/2 - 1) to compare.
Rational hecke_classical_scale(long n, long weight);

// Embedding of depth-0 (modular-valued) operators; DepthNotZero otherwise.
TwistedHeckeOp embed_modular(
    long level,
    const std::vector<std::pair<Mat2Q, QuasiModularForm>>& assignments);

// The classical T_n: constant value 1 on every determinant-n coset.
// tn_op(1) is the unit e of the convolution.
TwistedHeckeOp tn_op(long n, long level, long guard = kDefaultOrbitGuard);
TwistedHeckeOp identity_op(long level);

// Linear structure (equal level and twist required).
TwistedHeckeOp op_add(const TwistedHeckeOp& F, const TwistedHeckeOp& G);
TwistedHeckeOp op_scale(const Rational& c, const TwistedHeckeOp& F);
TwistedHeckeOp op_sub(const TwistedHeckeOp& F, const TwistedHeckeOp& G);

// Support-table equality at the given expansion precision.
bool op_equal(const TwistedHeckeOp& F, const TwistedHeckeOp& G, Frac prec);

// Pointwise lifts of the coefficient calculus to operators:
//   lift_D/lift_W/lift_E/lift_T/lift_X/lift_Y apply the corresponding
//   operator to every value; lift_phi(m) multiplies F_alpha by
//   nu^(m)_(alpha sigma^-1); lift_delta(n >= 1) multiplies F_alpha by
//   X^(n-1)(mu_(alpha sigma^-1)).
TwistedHeckeOp lift_D(const TwistedHeckeOp& F);
TwistedHeckeOp lift_W(long k, const TwistedHeckeOp& F);
TwistedHeckeOp lift_E(const TwistedHeckeOp& F);
TwistedHeckeOp lift_T(long k, long l, const TwistedHeckeOp& F);
TwistedHeckeOp lift_phi(long m, const TwistedHeckeOp& F);
TwistedHeckeOp lift_X(const TwistedHeckeOp& F);
TwistedHeckeOp lift_Y(const TwistedHeckeOp& F);
TwistedHeckeOp lift_delta(long n, const TwistedHeckeOp& F);

std::string op_to_string(const TwistedHeckeOp& F);

}  // namespace qmh
