#include "qmh/quasimod.hpp"

#include <numeric>
#include <sstream>
#include <utility>

#include "qmh/error.hpp"
#include "qmh/linalg.hpp"

namespace qmh {
namespace {

// Level bookkeeping: 0 means "translation-invariant only" and absorbs;
// otherwise levels combine by lcm.
long combine_level(long x, long y) {
  if (x == 0 || y == 0) return 0;
  return x / std::gcd(x, y) * y;
}

// Probe precision for structural zero tests on coefficients. Conclusive
// for the modular coefficients the calculus produces at small level
// (a nonzero form of the relevant weight and level has a nonzero term
// well inside this window); cheap enough to run on every construction.
const Frac kZeroProbe(24, 1);

bool coeff_is_zero(const FormExpr& c) {
  if (c == nullptr) return true;
  if (c->kind == FormKind::Zero) return true;
  if (c->kind == FormKind::Const) return c->scalar_value.is_zero();
  return fe_zero_at(c, kZeroProbe);
}

bool structurally_zero(const FormExpr& c) {
  return c == nullptr || c->kind == FormKind::Zero ||
         (c->kind == FormKind::Const && c->scalar_value.is_zero());
}

FormExpr g2_atom() { return fe_eis1(2); }
FormExpr g4_atom() { return fe_eis1(4); }

// Sum a list of same-weight terms, or the zero expression of that weight.
FormExpr sum_or_zero(std::vector<FormExpr> terms, long weight) {
  if (terms.empty()) return fe_zero(weight);
  return fe_sum(std::move(terms));
}

long form_level(const std::vector<FormExpr>& coeffs, long fallback) {
  bool any = false;
  long lvl = 1;
  for (const auto& c : coeffs) {
    if (structurally_zero(c)) continue;
    lvl = combine_level(lvl, c->level);
    any = true;
  }
  return any ? lvl : fallback;
}

}  // namespace

QuasiModularForm qm_make(long level, long weight,
                         std::vector<FormExpr> coeffs) {
  require(level >= 0, Errc::InvalidArgument, "level must be >= 0");
  for (size_t i = 0; i < coeffs.size(); ++i) {
    long want = weight - 2 * static_cast<long>(i);
    if (structurally_zero(coeffs[i])) {
      coeffs[i] = fe_zero(want);
      continue;
    }
    require(coeffs[i]->weight == want, Errc::WeightMismatch,
            "coefficient " + std::to_string(i) + " has weight " +
                std::to_string(coeffs[i]->weight) + ", expected " +
                std::to_string(want));
  }
  while (!coeffs.empty() && coeff_is_zero(coeffs.back())) coeffs.pop_back();
  QuasiModularForm f;
  f.level = level;
  f.weight = weight;
  f.coeffs = std::move(coeffs);
  return f;
}

QuasiModularForm qm_zero(long level, long weight) {
  return qm_make(level, weight, {});
}

QuasiModularForm qm_from_modular(const FormExpr& f) {
  require(f != nullptr, Errc::InvalidArgument, "null operand");
  return qm_make(f->level, f->weight, {f});
}

QuasiModularForm qm_g2() {
  return qm_make(1, 2, {fe_zero(2), fe_const(rat(1))});
}

FormExpr qm_to_form_expr(const QuasiModularForm& f) {
  if (f.is_zero()) return fe_zero(f.weight);
  std::vector<FormExpr> terms;
  for (size_t i = 0; i < f.coeffs.size(); ++i) {
    if (structurally_zero(f.coeffs[i])) continue;
    terms.push_back(fe_product(
        {f.coeffs[i], fe_pow(g2_atom(), static_cast<long>(i))}));
  }
  return sum_or_zero(std::move(terms), f.weight);
}

PuiseuxSeries qm_expand(const QuasiModularForm& f, Frac prec) {
  return fe_expand(qm_to_form_expr(f), prec);
}

bool qm_equal(const QuasiModularForm& a, const QuasiModularForm& b,
              Frac prec) {
  if (!a.is_zero() && !b.is_zero() && a.weight != b.weight) return false;
  size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  for (size_t i = 0; i < n; ++i) {
    bool ha = i < a.coeffs.size() && !structurally_zero(a.coeffs[i]);
    bool hb = i < b.coeffs.size() && !structurally_zero(b.coeffs[i]);
    if (!ha && !hb) continue;
    if (ha && hb) {
      if (!fe_equal_at(a.coeffs[i], b.coeffs[i], prec)) return false;
    } else {
      const FormExpr& c = ha ? a.coeffs[i] : b.coeffs[i];
      if (!fe_zero_at(c, prec)) return false;
    }
  }
  return true;
}

QuasiModularForm qm_add(const QuasiModularForm& a, const QuasiModularForm& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  require(a.weight == b.weight, Errc::WeightMismatch,
          "cannot add weights " + std::to_string(a.weight) + " and " +
              std::to_string(b.weight));
  size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  std::vector<FormExpr> coeffs;
  for (size_t i = 0; i < n; ++i) {
    long w = a.weight - 2 * static_cast<long>(i);
    std::vector<FormExpr> terms;
    if (i < a.coeffs.size() && !structurally_zero(a.coeffs[i]))
      terms.push_back(a.coeffs[i]);
    if (i < b.coeffs.size() && !structurally_zero(b.coeffs[i]))
      terms.push_back(b.coeffs[i]);
    coeffs.push_back(sum_or_zero(std::move(terms), w));
  }
  return qm_make(combine_level(a.level, b.level), a.weight,
                 std::move(coeffs));
}

QuasiModularForm qm_scale(const CycRational& c, const QuasiModularForm& f) {
  std::vector<FormExpr> coeffs;
  for (const auto& a : f.coeffs) coeffs.push_back(fe_scale(c, a));
  return qm_make(f.level, f.weight, std::move(coeffs));
}

QuasiModularForm qm_scale(const Rational& c, const QuasiModularForm& f) {
  return qm_scale(cyc(c), f);
}

QuasiModularForm qm_mul(const QuasiModularForm& a, const QuasiModularForm& b) {
  long weight = a.weight + b.weight;
  long level = combine_level(a.level, b.level);
  if (a.is_zero() || b.is_zero()) return qm_zero(level, weight);
  size_t n = a.coeffs.size() + b.coeffs.size() - 1;
  std::vector<FormExpr> coeffs;
  for (size_t m = 0; m < n; ++m) {
    std::vector<FormExpr> terms;
    for (size_t i = 0; i < a.coeffs.size(); ++i) {
      if (m < i || m - i >= b.coeffs.size()) continue;
      size_t j = m - i;
      if (structurally_zero(a.coeffs[i]) || structurally_zero(b.coeffs[j]))
        continue;
      terms.push_back(fe_product({a.coeffs[i], b.coeffs[j]}));
    }
    coeffs.push_back(
        sum_or_zero(std::move(terms), weight - 2 * static_cast<long>(m)));
  }
  return qm_make(level, weight, std::move(coeffs));
}

QuasiModularForm qm_dslash(const QuasiModularForm& f, const Mat2Q& alpha,
                           Frac prec_hint) {
  std::vector<FormExpr> coeffs;
  for (const auto& a : f.coeffs)
    coeffs.push_back(slash(a, alpha, prec_hint).expr);
  long level = form_level(coeffs, f.level);
  return qm_make(level, f.weight, std::move(coeffs));
}

QuasiModularForm op_D(const QuasiModularForm& f) {
  // D(a g^i) = i a g^(i-1) D(g) with D(g) = -(5/24) G4 + (1/2) g^2.
  long weight = f.weight + 2;
  if (f.is_zero()) return qm_zero(f.level, weight);
  size_t n = f.coeffs.size() + 1;
  std::vector<std::vector<FormExpr>> terms(n);
  for (size_t i = 1; i < f.coeffs.size(); ++i) {
    if (structurally_zero(f.coeffs[i])) continue;
    long li = static_cast<long>(i);
    terms[i - 1].push_back(fe_scale(
        rat(-5 * li, 24), fe_product({f.coeffs[i], g4_atom()})));
    terms[i + 1].push_back(fe_scale(rat(li, 2), f.coeffs[i]));
  }
  std::vector<FormExpr> coeffs;
  for (size_t m = 0; m < n; ++m)
    coeffs.push_back(sum_or_zero(std::move(terms[m]),
                                 weight - 2 * static_cast<long>(m)));
  return qm_make(f.level, weight, std::move(coeffs));
}

QuasiModularForm op_W(long k, const QuasiModularForm& f) {
  require(k >= 1, Errc::InvalidArgument, "W_k requires k >= 1");
  long weight = f.weight + 2 * k - 4;
  if (f.is_zero()) return qm_zero(f.level, weight);
  size_t n = f.coeffs.size() + static_cast<size_t>(k) - 1;
  std::vector<FormExpr> coeffs(n);
  for (size_t m = 0; m < n; ++m)
    coeffs[m] = fe_zero(weight - 2 * static_cast<long>(m));
  for (size_t i = 1; i < f.coeffs.size(); ++i) {
    if (structurally_zero(f.coeffs[i])) continue;
    size_t target = i + static_cast<size_t>(k) - 2;
    coeffs[target] = fe_scale(rat(static_cast<long>(i)), f.coeffs[i]);
  }
  return qm_make(f.level, weight, std::move(coeffs));
}

QuasiModularForm op_E(const QuasiModularForm& f) {
  std::vector<FormExpr> coeffs;
  for (const auto& a : f.coeffs) {
    if (structurally_zero(a))
      coeffs.push_back(fe_zero(a->weight + 4));
    else
      coeffs.push_back(fe_product({g4_atom(), a}));
  }
  return qm_make(f.level, f.weight + 4, std::move(coeffs));
}

QuasiModularForm op_T(long k, long l, const QuasiModularForm& f) {
  require(k >= 1, Errc::InvalidArgument, "T_k^l requires k >= 1");
  require(l >= 0, Errc::InvalidArgument, "T_k^l requires l >= 0");
  QuasiModularForm out = op_W(k, f);
  for (long i = 0; i < l; ++i) out = op_E(out);
  return out;
}

QuasiModularForm op_X(const QuasiModularForm& f) {
  std::vector<FormExpr> coeffs;
  for (const auto& a : f.coeffs) coeffs.push_back(fe_serre_x(a));
  return qm_make(f.level, f.weight + 2, std::move(coeffs));
}

QuasiModularForm op_Y(const QuasiModularForm& f) {
  std::vector<FormExpr> coeffs;
  for (size_t i = 0; i < f.coeffs.size(); ++i) {
    long w = f.weight - 2 * static_cast<long>(i);
    coeffs.push_back(fe_scale(rat(w, 2), f.coeffs[i]));
  }
  return qm_make(f.level, f.weight, std::move(coeffs));
}

QuasiModularForm decompose(const PuiseuxSeries& series, long weight,
                           long depth_bound) {
  require(depth_bound >= 0, Errc::InvalidArgument, "depth bound must be >= 0");

  // A level-1 expansion has nonnegative integer exponents and rational
  // coefficients. (Term keys are numerators over the series denominator.)
  for (const auto& [num, c] : series.terms()) {
    if (c.is_zero()) continue;
    bool integral = num >= 0 && num % series.denom() == 0;
    require(integral, Errc::NotDecomposable,
            "series has a term with a non-integral or negative exponent");
    require(c.is_rational(), Errc::NotDecomposable,
            "series has an irrational coefficient");
  }

  // Unknowns: one per (depth i, level-1 monomial of weight k - 2i).
  struct Unknown {
    long i, a, b;  // G4^a G6^b at depth i
  };
  std::vector<Unknown> unknowns;
  for (long i = 0; i <= depth_bound; ++i) {
    long w = weight - 2 * i;
    if (w < 0 || w % 2 != 0) continue;
    for (const auto& mon : g46_monomials(w))
      unknowns.push_back({i, mon[0], mon[1]});
  }

  long u = static_cast<long>(unknowns.size());
  if (u == 0) {
    require(series.is_zero(), Errc::NotDecomposable,
            "no quasimodular forms of this weight and depth exist");
    return qm_zero(1, weight);
  }

  // Rows available: coefficients of q^0 .. q^(m-1) are determined when
  // m <= prec.
  long avail = 0;
  while (avail < u + 6 && frac_cmp(Frac(avail + 1, 1), series.prec()) <= 0)
    ++avail;
  require(avail >= u + 2, Errc::InsufficientPrecision,
          "need at least " + std::to_string(u + 2) +
              " expansion terms, series determines " + std::to_string(avail));
  long rows = avail;

  RatMatrix mat(rows, std::vector<Rational>(unknowns.size()));
  std::vector<Rational> rhs(rows);
  std::vector<PuiseuxSeries> cols;
  for (const auto& un : unknowns) {
    FormExpr mono = fe_product({fe_pow(g4_atom(), un.a),
                                fe_pow(fe_eis1(6), un.b),
                                fe_pow(g2_atom(), un.i)});
    cols.push_back(fe_expand(mono, Frac(rows, 1)));
  }
  for (long r = 0; r < rows; ++r) {
    for (size_t cidx = 0; cidx < cols.size(); ++cidx)
      mat[r][cidx] = cols[cidx].coeff(Frac(r, 1)).to_rational();
    rhs[r] = series.coeff(Frac(r, 1)).to_rational();
  }
  auto sol = solve_rational(mat, rhs);
  require(sol.has_value(), Errc::NotDecomposable,
          "series is not a quasimodular expansion of this weight and depth");

  std::vector<std::vector<FormExpr>> terms(
      static_cast<size_t>(depth_bound) + 1);
  for (size_t idx = 0; idx < unknowns.size(); ++idx) {
    const Rational& x = (*sol)[idx];
    if (x == 0) continue;
    const Unknown& un = unknowns[idx];
    FormExpr mono = fe_product(
        {fe_pow(g4_atom(), un.a), fe_pow(fe_eis1(6), un.b)});
    terms[static_cast<size_t>(un.i)].push_back(fe_scale(x, mono));
  }
  std::vector<FormExpr> coeffs;
  for (long i = 0; i <= depth_bound; ++i)
    coeffs.push_back(
        sum_or_zero(std::move(terms[static_cast<size_t>(i)]), weight - 2 * i));
  QuasiModularForm out = qm_make(1, weight, std::move(coeffs));

  // Confirm against the full given precision, not just the solved rows.
  PuiseuxSeries diff = qs_sub(series, qm_expand(out, series.prec()));
  require(diff.is_zero(), Errc::NotDecomposable,
          "series deviates from the fitted quasimodular expansion");
  return out;
}

QuasiModularForm qm_random(RandomSource& rs, long weight, long depth_bound) {
  require(weight >= 0 && weight % 2 == 0, Errc::InvalidArgument,
          "random forms require even nonnegative weight");
  std::vector<FormExpr> coeffs;
  for (long i = 0; i <= depth_bound; ++i) {
    long w = weight - 2 * i;
    if (w < 0) break;
    std::vector<FormExpr> terms;
    for (const auto& mon : g46_monomials(w)) {
      if (rs.coin()) continue;
      Rational c = rs.nonzero_rational(6, 4);
      terms.push_back(fe_scale(
          c, fe_product({fe_pow(g4_atom(), mon[0]),
                         fe_pow(fe_eis1(6), mon[1])})));
    }
    coeffs.push_back(sum_or_zero(std::move(terms), w));
  }
  return qm_make(1, weight, std::move(coeffs));
}

std::string qm_to_string(const QuasiModularForm& f) {
  if (f.is_zero())
    return "0  [weight " + std::to_string(f.weight) + ", level " +
           std::to_string(f.level) + "]";
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < f.coeffs.size(); ++i) {
    if (structurally_zero(f.coeffs[i])) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << fe_to_string(f.coeffs[i]) << ")";
    if (i == 1) os << "*G2";
    if (i > 1) os << "*G2^" << i;
  }
  os << "  [weight " << f.weight << ", level " << f.level << ", depth "
     << f.depth() << "]";
  return os.str();
}

}  // namespace qmh
