#pragma once

// Truncated Puiseux series in q with cyclotomic-rational coefficients:
// finitely many terms c * q^(n/denom) plus an explicit precision bound
// ("every exponent < prec is accurate"). Negative exponents are allowed
// (Laurent tails, e.g. 1/Delta). Zero coefficients are never stored, and the
// exponent denominator is canonicalized to the smallest compatible value, so
// the representation of a given mathematical truncation is unique.

#include <map>
#include <optional>
#include <string>

#include "qmh/cyclotomic.hpp"
#include "qmh/rational.hpp"

namespace qmh {

class PuiseuxSeries {
 public:
  PuiseuxSeries() = default;  // zero series with prec 0 (knows nothing)

  PuiseuxSeries(long denom, std::map<long, CycRational> terms, Frac prec);

  static PuiseuxSeries zero(Frac prec) { return PuiseuxSeries(1, {}, prec); }
  static PuiseuxSeries constant(const CycRational& c, Frac prec);
  static PuiseuxSeries monomial(const CycRational& c, Frac e, Frac prec);

  long denom() const { return denom_; }
  const std::map<long, CycRational>& terms() const { return terms_; }
  Frac prec() const { return prec_; }

  // Zero *to this precision*.
  bool is_zero() const { return terms_.empty(); }

  // Lowest stored exponent, if any term survives.
  std::optional<Frac> leading() const;
  // Lower bound for the true leading exponent: leading() or prec().
  Frac lead_or_prec() const;

  CycRational coeff(Frac e) const;

  // Representation with a specific exponent denominator (multiple of denom()).
  PuiseuxSeries with_denom(long M2) const;
  PuiseuxSeries truncated(Frac prec) const;

 private:
  long denom_ = 1;
  std::map<long, CycRational> terms_;  // exponent numerator -> coefficient
  Frac prec_{0, 1};
};

PuiseuxSeries qs_add(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries qs_sub(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries qs_neg(const PuiseuxSeries& a);
PuiseuxSeries qs_scale(const PuiseuxSeries& a, const CycRational& c);
PuiseuxSeries qs_mul(const PuiseuxSeries& a, const PuiseuxSeries& b);

// theta = q d/dq.
PuiseuxSeries qs_theta(const PuiseuxSeries& a);

// Throws DivisionByZeroSeries when b has no nonzero term below its precision.
PuiseuxSeries qs_div(const PuiseuxSeries& a, const PuiseuxSeries& b);

// q |-> zeta_d^b * q^r (the substitution induced by z |-> (a z + b)/d with
// r = a/d; r and (b, d) are passed independently since r is in lowest terms).
// Requires r > 0.
PuiseuxSeries qs_compose_scale(const PuiseuxSeries& a, Frac r, long b, long d);

// Multiply by q^e (exact, no precision change beyond the shift).
PuiseuxSeries qs_shift(const PuiseuxSeries& a, Frac e);

// Integer powers; negative exponents go through qs_div.
PuiseuxSeries qs_pow(const PuiseuxSeries& a, long e);

// Equality of all terms below min(prec_a, prec_b). Precision values
// themselves are not compared.
bool qs_equal_shared(const PuiseuxSeries& a, const PuiseuxSeries& b);

// Canonical rendering, e.g. "1/240 + q + 9q^2 + 28q^3 + 73q^4",
// "q - 24q^2 + 252q^3", "-1/12 - 2q^(1/2) - 2q". Zero renders as "0".
std::string qs_to_string(const PuiseuxSeries& a);

}  // namespace qmh
