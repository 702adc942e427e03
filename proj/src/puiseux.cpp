#include "qmh/puiseux.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace qmh {
namespace {

// gcd of denom and all exponent numerators, for canonical shrinking.
long shrink_gcd(long denom, const std::map<long, CycRational>& terms) {
  long g = denom;
  for (const auto& [n, c] : terms) {
    (void)c;
    g = std::gcd(g, n < 0 ? -n : n);
    if (g == 1) break;
  }
  return g == 0 ? denom : g;
}

}  // namespace

PuiseuxSeries::PuiseuxSeries(long denom, std::map<long, CycRational> terms,
                             Frac prec)
    : denom_(denom), terms_(std::move(terms)), prec_(prec) {
  require(denom_ >= 1, Errc::InvalidArgument, "series denominator must be >= 1");
  // Drop zero coefficients and terms at/above the precision bound.
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.is_zero() || !(Frac(it->first, denom_) < prec_)) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  if (terms_.empty()) {
    denom_ = 1;
    return;
  }
  long g = shrink_gcd(denom_, terms_);
  if (g > 1) {
    std::map<long, CycRational> shrunk;
    for (auto& [n, c] : terms_) shrunk.emplace(n / g, std::move(c));
    terms_ = std::move(shrunk);
    denom_ /= g;
  }
}

PuiseuxSeries PuiseuxSeries::constant(const CycRational& c, Frac prec) {
  std::map<long, CycRational> t;
  if (!c.is_zero()) t.emplace(0, c);
  return PuiseuxSeries(1, std::move(t), prec);
}

PuiseuxSeries PuiseuxSeries::monomial(const CycRational& c, Frac e, Frac prec) {
  std::map<long, CycRational> t;
  if (!c.is_zero()) t.emplace(e.n, c);
  return PuiseuxSeries(static_cast<long>(e.d), std::move(t), prec);
}

std::optional<Frac> PuiseuxSeries::leading() const {
  if (terms_.empty()) return std::nullopt;
  return Frac(terms_.begin()->first, denom_);
}

Frac PuiseuxSeries::lead_or_prec() const {
  auto l = leading();
  return l ? *l : prec_;
}

CycRational PuiseuxSeries::coeff(Frac e) const {
  // e = n/denom_ must be representable on our grid to be stored.
  if (denom_ % e.d != 0) return CycRational();
  long n = static_cast<long>(e.n * (denom_ / e.d));
  auto it = terms_.find(n);
  return it == terms_.end() ? CycRational() : it->second;
}

PuiseuxSeries PuiseuxSeries::with_denom(long M2) const {
  require(M2 % denom_ == 0, Errc::InvalidArgument,
          "with_denom target must be a multiple of the current denominator");
  if (M2 == denom_) return *this;
  long s = M2 / denom_;
  PuiseuxSeries out;
  out.denom_ = M2;
  out.prec_ = prec_;
  for (const auto& [n, c] : terms_) out.terms_.emplace(n * s, c);
  return out;
}

PuiseuxSeries PuiseuxSeries::truncated(Frac prec) const {
  return PuiseuxSeries(denom_, terms_, frac_min(prec, prec_));
}

PuiseuxSeries qs_add(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  long M = std::lcm(a.denom(), b.denom());
  PuiseuxSeries ae = a.with_denom(M), be = b.with_denom(M);
  std::map<long, CycRational> terms = ae.terms();
  for (const auto& [n, c] : be.terms()) {
    auto [it, fresh] = terms.emplace(n, c);
    if (!fresh) it->second += c;
  }
  return PuiseuxSeries(M, std::move(terms), frac_min(a.prec(), b.prec()));
}

PuiseuxSeries qs_neg(const PuiseuxSeries& a) {
  std::map<long, CycRational> terms;
  for (const auto& [n, c] : a.terms()) terms.emplace(n, -c);
  return PuiseuxSeries(a.denom(), std::move(terms), a.prec());
}

PuiseuxSeries qs_sub(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  return qs_add(a, qs_neg(b));
}

PuiseuxSeries qs_scale(const PuiseuxSeries& a, const CycRational& c) {
  if (c.is_zero()) return PuiseuxSeries::zero(a.prec());
  std::map<long, CycRational> terms;
  for (const auto& [n, t] : a.terms()) terms.emplace(n, c * t);
  return PuiseuxSeries(a.denom(), std::move(terms), a.prec());
}

PuiseuxSeries qs_mul(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  // prec = min over operands of (own prec + other's leading exponent): the
  // first unknown coefficient of one factor pollutes exponents from
  // (other's lead + own prec) upward.
  Frac prec = frac_min(a.prec() + b.lead_or_prec(), b.prec() + a.lead_or_prec());
  if (a.is_zero() || b.is_zero()) return PuiseuxSeries::zero(prec);
  long M = std::lcm(a.denom(), b.denom());
  PuiseuxSeries ae = a.with_denom(M), be = b.with_denom(M);
  std::map<long, CycRational> terms;
  for (const auto& [na, ca] : ae.terms()) {
    for (const auto& [nb, cb] : be.terms()) {
      long n = na + nb;
      if (!(Frac(n, M) < prec)) {
        // both maps ascend in exponent; later nb only grow
        break;
      }
      CycRational prod = ca * cb;
      if (prod.is_zero()) continue;
      auto [it, fresh] = terms.emplace(n, prod);
      if (!fresh) it->second += prod;
    }
  }
  return PuiseuxSeries(M, std::move(terms), prec);
}

PuiseuxSeries qs_theta(const PuiseuxSeries& a) {
  std::map<long, CycRational> terms;
  for (const auto& [n, c] : a.terms()) {
    if (n == 0) continue;
    terms.emplace(n, rat(n, a.denom()) * c);
  }
  return PuiseuxSeries(a.denom(), std::move(terms), a.prec());
}

PuiseuxSeries qs_div(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  auto lead_b = b.leading();
  if (!lead_b)
    fail(Errc::DivisionByZeroSeries,
         "divisor vanishes identically to its precision (prec " +
             b.prec().str() + ")");
  Frac eb = *lead_b;
  Frac ea = a.lead_or_prec();
  // c = a / b known so far as the first error term of either operand allows:
  // from a: prec_a - eb; from b: prec_b - eb + (ea - eb).
  Frac prec = frac_min(a.prec() - eb, b.prec() - eb - eb + ea);
  if (a.is_zero()) return PuiseuxSeries::zero(prec);

  long M = std::lcm(a.denom(), b.denom());
  // Also make the result exponents and prec representable on a common grid.
  M = std::lcm(M, static_cast<long>(eb.d));
  PuiseuxSeries ae = a.with_denom(M), be = b.with_denom(M);
  long shift = static_cast<long>(eb.n * (M / eb.d));  // eb on grid M

  // u = b shifted down by eb (unit with nonzero constant term u0).
  std::map<long, CycRational> u;
  for (const auto& [n, c] : be.terms()) u.emplace(n - shift, c);
  const CycRational u0inv = u.at(0).inverse();

  // A = a shifted down by eb; solve c * u = A coefficientwise, ascending.
  std::map<long, CycRational> A;
  for (const auto& [n, c] : ae.terms()) A.emplace(n - shift, c);

  std::map<long, CycRational> out;
  long n_lo = A.begin()->first;
  // Result exponents live in [n_lo, prec) on grid M.
  for (long n = n_lo; Frac(n, M) < prec; ++n) {
    CycRational rhs;
    auto itA = A.find(n);
    if (itA != A.end()) rhs = itA->second;
    for (const auto& [m, cm] : out) {
      if (m >= n) break;
      auto itu = u.find(n - m);
      if (itu != u.end()) rhs -= cm * itu->second;
    }
    if (!rhs.is_zero()) out.emplace(n, rhs * u0inv);
  }
  return PuiseuxSeries(M, std::move(out), prec);
}

PuiseuxSeries qs_compose_scale(const PuiseuxSeries& a, Frac r, long b, long d) {
  require(r.n > 0, Errc::InvalidArgument, "compose_scale ratio must be positive");
  require(d >= 1, Errc::InvalidArgument, "compose_scale root order must be >= 1");
  long M = a.denom();
  long M_out = M * static_cast<long>(r.d);
  long phase_order = M * d;
  std::map<long, CycRational> terms;
  for (const auto& [n, c] : a.terms()) {
    // q^(n/M) |-> zeta_d^(b n / M) q^(n r / M) = zeta_{Md}^{nb} q^{n r.n/(M r.d)}
    CycRational phase =
        CycRational::root_of_unity(phase_order, mod_pos(static_cast<long long>(n) * b, phase_order));
    auto [it, fresh] = terms.emplace(n * r.n, c * phase);
    (void)it;
    require(fresh, Errc::InvalidArgument, "compose_scale exponent collision");
  }
  return PuiseuxSeries(M_out, std::move(terms), a.prec() * r);
}

PuiseuxSeries qs_shift(const PuiseuxSeries& a, Frac e) {
  long M = std::lcm(a.denom(), static_cast<long>(e.d));
  PuiseuxSeries ae = a.with_denom(M);
  long sh = static_cast<long>(e.n * (M / e.d));
  std::map<long, CycRational> terms;
  for (const auto& [n, c] : ae.terms()) terms.emplace(n + sh, c);
  return PuiseuxSeries(M, std::move(terms), a.prec() + e);
}

PuiseuxSeries qs_pow(const PuiseuxSeries& a, long e) {
  if (e < 0) {
    PuiseuxSeries one = PuiseuxSeries::constant(cyc(1), a.prec());
    return qs_pow(qs_div(one, a), -e);
  }
  if (e == 0) return PuiseuxSeries::constant(cyc(1), a.prec());
  PuiseuxSeries acc = a;
  for (long i = 1; i < e; ++i) acc = qs_mul(acc, a);
  return acc;
}

bool qs_equal_shared(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  Frac p = frac_min(a.prec(), b.prec());
  long M = std::lcm(a.denom(), b.denom());
  PuiseuxSeries ae = a.with_denom(M), be = b.with_denom(M);
  auto ita = ae.terms().begin(), itb = be.terms().begin();
  while (ita != ae.terms().end() || itb != be.terms().end()) {
    long na = ita != ae.terms().end() ? ita->first
                                      : std::numeric_limits<long>::max();
    long nb = itb != be.terms().end() ? itb->first
                                      : std::numeric_limits<long>::max();
    long n = std::min(na, nb);
    if (!(Frac(n, M) < p)) break;
    if (na < nb) {
      if (!ita->second.is_zero()) return false;
      ++ita;
    } else if (nb < na) {
      if (!itb->second.is_zero()) return false;
      ++itb;
    } else {
      if (ita->second != itb->second) return false;
      ++ita;
      ++itb;
    }
  }
  return true;
}

std::string qs_to_string(const PuiseuxSeries& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, c] : a.terms()) {
    Frac e(n, a.denom());
    bool negative = false;
    std::string coeff_str;
    if (c.is_rational()) {
      Rational r = c.to_rational();
      if (r < 0) {
        negative = true;
        r = -r;
      }
      bool unit = (r == 1) && e.n != 0;
      coeff_str = unit ? "" : rat_str(r);
    } else {
      coeff_str = c.to_string();  // parenthesized
    }
    if (first) {
      if (negative) os << "-";
      first = false;
    } else {
      os << (negative ? " - " : " + ");
    }
    os << coeff_str;
    if (e.n != 0) {
      if (e.is_integer()) {
        if (e.n == 1)
          os << "q";
        else
          os << "q^" << e.n;
      } else {
        os << "q^(" << e.str() << ")";
      }
    } else if (coeff_str.empty()) {
      os << "1";
    }
  }
  return os.str();
}

}  // namespace qmh
