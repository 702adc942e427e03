#pragma once

// Modular forms as immutable, slash-aware expression DAGs.
//
// Atoms: level-1 Eisenstein series G_K, the discriminant Delta and its
// inverse, level-N Eisenstein row-class atoms EisN, and cocycle derivative
// atoms MuDeriv = X^j(mu_delta). Composites: sums, products, scalar
// multiples, raw expansion leaves, and the symbolic Serre derivative SerreX.
// Every node knows its weight, its level, and a lower bound for its leading
// exponent; exact q-expansions at any requested precision are computed on
// demand and cached per node (atoms are interned, so caches accumulate).
//
// The slash action here is determinant-normalized:
//
//     (f ⫽_w alpha)(z) = det(alpha)^(w/2) (cz+d)^(-w) f(alpha z),
//
// under which scalar matrices act trivially, the slash is multiplicative on
// products, and the mu/nu cocycle identities and the X-vs-slash commutation
// law hold exactly (all weights are even, so det^(w/2) stays rational).
// The action is closed on the atom algebra: unimodular matrices reindex
// EisN and relabel MuDeriv; integral triangular matrices expand EisN into
// finite class sums one level deeper, act on MuDeriv through the cocycle
// recursion, and act on Delta through its G4/G6 polynomial. Expansion
// leaves only accept matrices that fix them (level membership) or
// substitutions; everything else raises UnknownTransformation.

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmh/cyclotomic.hpp"
#include "qmh/mat2q.hpp"
#include "qmh/puiseux.hpp"

namespace qmh {

enum class FormKind {
  Zero,          // the zero form of a declared weight
  Const,         // a cyclotomic-rational constant (weight 0)
  Eis1,          // level-1 Eisenstein series G_K (K even >= 2; K = 2 is the
                 // quasimodular atom, fixed only by translations)
  Delta,         // normalized discriminant q prod (1-q^n)^24
  DeltaInverse,  // 1/Delta (weight -12, Laurent tail from q^-1)
  EisN,          // level-N Eisenstein row-class atom, k even >= 4
  MuDeriv,       // X^j(mu_delta) for a primitive triangular delta
  SerreX,        // X(child), kept symbolic (child involves level-N atoms)
  Expansion,     // raw series leaf with declared weight and level
  Sum,
  Product,
  Scale,
};

// Stable tag, also used by serialization ("EIS1", "DELTA", ...).
const char* form_kind_name(FormKind k);

class FormExprNode;
using FormExpr = std::shared_ptr<const FormExprNode>;

// Level-N Eisenstein atom: weight k, row class (c, d) mod N. The class is
// stored canonically: entries in [0, N), the lexicographically smaller of
// {v, -v} (the two index the same function for even k).
struct EisNData {
  long k = 4;
  long c = 0;
  long d = 0;
  long N = 1;
};

// X^j(mu_delta) for delta = [a b; 0 d], primitive (gcd(a,b,d) = 1,
// 0 <= b < d, a, d > 0, ad > 1). Weight 2j + 2, level ad.
struct MuData {
  long a = 1;
  long b = 0;
  long d = 1;
  long j = 0;
};

class FormExprNode {
 public:
  FormKind kind = FormKind::Zero;
  long weight = 0;
  // Invariance level: slashing by Gamma(level) fixes the node, and expansion
  // exponent denominators divide it. 0 means "translations only" (leaves
  // produced from the quasimodular G2 atom, which has no congruence
  // invariance group).
  long level = 1;
  // Lower bound for the leading exponent of the expansion (structural, used
  // to budget precision through products).
  Frac lead_lb{0, 1};

  long eis_k = 0;              // Eis1
  EisNData eisn_data{};        // EisN
  MuData mu_data{};            // MuDeriv
  CycRational scalar_value;    // Scale
  PuiseuxSeries leaf_series;   // Expansion
  std::vector<FormExpr> children;  // Sum, Product, Scale(1), SerreX(1)

  // q-expansion with every exponent < prec exact. The returned precision is
  // exactly `prec` except when a stored Expansion leaf caps it. Cached per
  // node (best precision so far); thread-safe.
  PuiseuxSeries expand(Frac prec) const;

 private:
  PuiseuxSeries compute(Frac prec) const;

  mutable std::mutex cache_mutex_;
  mutable std::optional<PuiseuxSeries> cache_;
};

// ---------------------------------------------------------------------------
// Construction (all canonicalizing; atoms are interned).

FormExpr fe_zero(long weight);
FormExpr fe_const(const CycRational& c);
FormExpr fe_const(const Rational& c);
// K even >= 2 (OddWeight otherwise; InvalidArgument below 2).
FormExpr fe_eis1(long K);
FormExpr fe_delta();
FormExpr fe_delta_inverse();
// k even >= 4 (OddWeight / InvalidArgument), N >= 1. (c, d) is reduced mod N
// and canonicalized; N = 1 collapses to 2 * G_k.
FormExpr fe_eisn(long k, long c, long d, long N);
// X^j(mu_delta) as an atom; delta is any positive-determinant rational
// matrix (NotPositiveDet otherwise). Collapses to the zero form when the
// primitive triangular part of delta is trivial (mu vanishes on scalar
// multiples of unimodular matrices).
FormExpr fe_mu_deriv(const Mat2Q& delta, long j);
// Raw leaf; weight must be even, level >= 0 (0 = translations only).
FormExpr fe_expansion(PuiseuxSeries s, long weight, long level);
// Sum of equal-weight forms (WeightMismatch otherwise); zero children are
// dropped, nested sums are flattened.
FormExpr fe_sum(std::vector<FormExpr> children);
// Product; weights add, nested products are flattened, constants and scalar
// factors are hoisted, any zero factor absorbs.
FormExpr fe_product(std::vector<FormExpr> children);
FormExpr fe_scale(const CycRational& c, FormExpr f);
FormExpr fe_scale(const Rational& c, FormExpr f);
// f^e for e >= 0 (InvalidArgument otherwise; e = 0 gives the constant 1).
FormExpr fe_pow(const FormExpr& f, long e);

// The Serre derivative X = theta + 2k G2 (weight k -> k+2), dispatched
// eagerly where a closed form exists: X(G4) = (7/10) G6, X(G6) = (400/7)
// G4^2, X(G_K) through the G4/G6 polynomial for K >= 8, X(Delta) =
// X(1/Delta) = 0, X(X^j mu) = X^(j+1) mu, Leibniz through sums, products
// and scalars, theta + 2k G2 on raw leaves; level-N Eisenstein content
// stays symbolic as a SerreX node.
FormExpr fe_serre_x(const FormExpr& f);

// ---------------------------------------------------------------------------
// Queries.

PuiseuxSeries fe_expand(const FormExpr& f, Frac prec);
// Expansion equality with every exponent < min(prec, leaf caps) compared.
bool fe_equal_at(const FormExpr& a, const FormExpr& b, Frac prec);
bool fe_zero_at(const FormExpr& f, Frac prec);
// Compact structural rendering (atoms by name, composites parenthesized).
std::string fe_to_string(const FormExpr& f);

// ---------------------------------------------------------------------------
// Slash.

struct SlashResult {
  FormExpr expr;
  // True when every step used a symbolic rule; false when any step
  // substituted into a stored q-expansion (the result is then a leaf whose
  // precision is capped by what was expanded).
  bool exact = true;
};

// f ⫽ alpha for det(alpha) > 0 (NotPositiveDet otherwise). prec_hint sizes
// the expansions of leaves produced by substitution fallbacks; symbolic
// results are precision-polymorphic and ignore it. UnknownTransformation
// when a leaf (or the G2 atom) meets a matrix it cannot absorb.
SlashResult slash(const FormExpr& f, const Mat2Q& alpha,
                  Frac prec_hint = Frac(32, 1));

// ---------------------------------------------------------------------------
// Cocycles.

// mu_alpha = (1/6) theta log((Delta ⫽ alpha) / Delta) as an exact expression
// (a MuDeriv atom, or the zero form on scalar multiples of SL2(Z)).
FormExpr fe_mu_expr(const Mat2Q& alpha);
// nu_alpha^(m) = -(5/24) (G4^m ⫽ alpha - G4^m), weight 4m, exact.
FormExpr fe_nu_expr(const Mat2Q& alpha, long m);

PuiseuxSeries mu(const Mat2Q& alpha, Frac prec);
PuiseuxSeries nu(const Mat2Q& alpha, long m, Frac prec);

// ---------------------------------------------------------------------------
// Level-1 Eisenstein structure: G_K as a polynomial in G4, G6.

// Monomials (a, b) with 4a + 6b = K, a, b >= 0 (deterministic order).
std::vector<std::array<long, 2>> g46_monomials(long K);
// G_K = sum c_(a,b) G4^a G6^b for K even >= 4; solved once from expansions
// and cached (e.g. G8 = 120 G4^2, G10 = (5040/11) G4 G6).
using G46Poly = std::vector<std::pair<std::array<long, 2>, Rational>>;
const G46Poly& eis1_g46(long K);
FormExpr g46_poly_expr(const G46Poly& poly);

// ---------------------------------------------------------------------------
// Named constructors matching the public operation surface. The prec
// argument warms the atom's expansion cache; expressions themselves are
// precision-polymorphic.

FormExpr eisenstein(long K, Frac prec);
FormExpr delta(Frac prec);

}  // namespace qmh
