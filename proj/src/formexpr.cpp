#include "qmh/formexpr.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qmh/lattice.hpp"
#include "qmh/linalg.hpp"

namespace qmh {

namespace {

// ---------------------------------------------------------------------------
// Node creation / interning.

std::shared_ptr<FormExprNode> new_node(FormKind kind, long weight, long level,
                                       Frac lead_lb) {
  auto n = std::make_shared<FormExprNode>();
  n->kind = kind;
  n->weight = weight;
  n->level = level;
  n->lead_lb = lead_lb;
  return n;
}

std::mutex g_intern_mutex;
std::map<long, FormExpr>& eis1_interned() {
  static std::map<long, FormExpr> m;
  return m;
}
std::map<std::array<long, 4>, FormExpr>& eisn_interned() {
  static std::map<std::array<long, 4>, FormExpr> m;
  return m;
}
std::map<std::array<long, 4>, FormExpr>& mu_interned() {
  static std::map<std::array<long, 4>, FormExpr> m;
  return m;
}

// Level combination: 0 means "translations only" and is absorbing.
long combine_level(long x, long y) {
  if (x == 0 || y == 0) return 0;
  long g = std::gcd(x, y);
  return (x / g) * y;
}

// ---------------------------------------------------------------------------
// Series kernels.

// sum of d^(K-1) over divisors d of n.
Rational sigma_power(long n, long K) {
  Rational s = 0;
  for (long dv = 1; dv * dv <= n; ++dv) {
    if (n % dv != 0) continue;
    s += rat_pow(rat(dv), K - 1);
    long other = n / dv;
    if (other != dv) s += rat_pow(rat(other), K - 1);
  }
  return s;
}

// G_K = -B_K/(2K) + sum_n sigma_(K-1)(n) q^n.
PuiseuxSeries eis1_series(long K, Frac prec) {
  std::map<long, CycRational> terms;
  if (frac_cmp(Frac(0, 1), prec) < 0) {
    Rational c0 = -bernoulli(K) / rat(2 * K);
    terms[0] = cyc(c0);
  }
  for (long n = 1; frac_cmp(Frac(n, 1), prec) < 0; ++n) {
    terms[n] = cyc(sigma_power(n, K));
  }
  return PuiseuxSeries(1, std::move(terms), prec);
}

// q prod_(n>=1) (1 - q^n)^24 via the pentagonal number expansion of the
// product (independent of the Eisenstein layer; the G4/G6 polynomial
// identity for Delta is verified by tests, not used as its definition).
PuiseuxSeries delta_series(Frac prec) {
  Frac eta_prec = prec - Frac(1, 1);
  std::map<long, CycRational> terms;
  if (frac_cmp(Frac(0, 1), eta_prec) < 0) terms[0] = cyc(1);
  for (long m = 1;; ++m) {
    long e1 = m * (3 * m - 1) / 2;
    long e2 = m * (3 * m + 1) / 2;
    if (frac_cmp(Frac(e1, 1), eta_prec) >= 0) break;
    CycRational sgn = cyc(m % 2 == 0 ? 1 : -1);
    terms[e1] = sgn;
    if (frac_cmp(Frac(e2, 1), eta_prec) < 0) terms[e2] = sgn;
  }
  PuiseuxSeries eta(1, std::move(terms), eta_prec);
  return qs_shift(qs_pow(eta, 24), Frac(1, 1));
}

// Polynomials A_k with P_k(xi) = A_k(xi) / (xi - 1)^k, where P_k is the
// rational function giving the constant terms of the level-N atoms:
// A_1 = (xi + 1)/2 and A_(k+1) = xi (A_k' (xi - 1) - k A_k).
// (P_2 = -xi/(xi-1)^2, and P_k(xi) = xi d/dxi P_(k-1).)
const std::vector<Rational>& eisn_apoly(long k) {
  static std::mutex mu;
  static std::map<long, std::vector<Rational>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<Rational> a = {rat(1, 2), rat(1, 2)};  // A_1, ascending
  for (long step = 1; step < k; ++step) {
    // d = A' * (xi - 1) - step * A, then multiply by xi (degree shift).
    std::vector<Rational> d(a.size() + 1, rat(0));
    for (size_t i = 1; i < a.size(); ++i) {
      Rational der = rat(static_cast<long>(i)) * a[i];  // coeff of xi^(i-1)
      d[i] += der;       // * xi
      d[i - 1] -= der;   // * (-1)
    }
    for (size_t i = 0; i < a.size(); ++i) d[i] -= rat(step) * a[i];
    std::vector<Rational> shifted(d.size() + 1, rat(0));
    for (size_t i = 0; i < d.size(); ++i) shifted[i + 1] = d[i];
    while (shifted.size() > 1 && shifted.back() == 0) shifted.pop_back();
    a = std::move(shifted);
  }
  return cache.emplace(k, std::move(a)).first->second;
}

CycRational cyc_pow(const CycRational& x, long e) {
  CycRational r = cyc(1);
  for (long i = 0; i < e; ++i) r = r * x;
  return r;
}

// P_k evaluated at the N-th root of unity zeta^dbar (dbar != 0 mod N).
CycRational eisn_pk(long k, long N, long dbar) {
  CycRational zeta = CycRational::root_of_unity(N, dbar);
  const std::vector<Rational>& a = eisn_apoly(k);
  CycRational num = cyc(0);
  for (size_t i = a.size(); i-- > 0;) num = num * zeta + cyc(a[i]);
  CycRational den = cyc_pow(zeta - cyc(1), k);
  return num * den.inverse();
}

// Expansion of the level-N atom: constant term by class position, and
// coefficient of q^(j/N) summing m^(k-1) zeta_N^(+-m dbar) over divisor
// splittings j = m c with c = +-cbar mod N.
PuiseuxSeries eisn_series(long k, long cbar, long dbar, long N, Frac prec) {
  std::map<long, CycRational> terms;
  if (frac_cmp(Frac(0, 1), prec) < 0) {
    if (cbar == 0 && dbar == 0) {
      terms[0] = cyc(-bernoulli(k) / rat(k));
    } else if (cbar == 0) {
      terms[0] = cyc(-1) * eisn_pk(k, N, dbar);
    }
  }
  for (long j = 1; frac_cmp(Frac(j, N), prec) < 0; ++j) {
    CycRational acc = cyc(0);
    for (long c = 1; c <= j; ++c) {
      if (j % c != 0) continue;
      long m = j / c;
      Rational mk = rat_pow(rat(m), k - 1);
      if (mod_pos(c - cbar, N) == 0)
        acc = acc + mk * CycRational::root_of_unity(N, mod_pos(m * dbar, N));
      if (mod_pos(c + cbar, N) == 0)
        acc = acc + mk * CycRational::root_of_unity(N, mod_pos(-m * dbar, N));
    }
    if (!acc.is_zero()) terms[j] = acc;
  }
  return PuiseuxSeries(N, std::move(terms), prec);
}

FormExpr fe_one() { return fe_const(rat(1)); }

}  // namespace

// ---------------------------------------------------------------------------

const char* form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::Zero: return "ZERO";
    case FormKind::Const: return "CONST";
    case FormKind::Eis1: return "EIS1";
    case FormKind::Delta: return "DELTA";
    case FormKind::DeltaInverse: return "DELTAINV";
    case FormKind::EisN: return "EISN";
    case FormKind::MuDeriv: return "MUDERIV";
    case FormKind::SerreX: return "SERREX";
    case FormKind::Expansion: return "EXPANSION";
    case FormKind::Sum: return "SUM";
    case FormKind::Product: return "PRODUCT";
    case FormKind::Scale: return "SCALE";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expansion engine.

PuiseuxSeries FormExprNode::expand(Frac prec) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_ && frac_cmp(cache_->prec(), prec) >= 0)
      return cache_->truncated(prec);
  }
  PuiseuxSeries fresh = compute(prec);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!cache_ || frac_cmp(cache_->prec(), fresh.prec()) < 0) cache_ = fresh;
  return fresh.truncated(prec);
}

PuiseuxSeries FormExprNode::compute(Frac prec) const {
  switch (kind) {
    case FormKind::Zero:
      return PuiseuxSeries::zero(prec);
    case FormKind::Const:
      return PuiseuxSeries::constant(scalar_value, prec);
    case FormKind::Eis1:
      return eis1_series(eis_k, prec);
    case FormKind::Delta:
      return delta_series(prec);
    case FormKind::DeltaInverse: {
      Frac inner = prec + Frac(2, 1);
      PuiseuxSeries d = fe_delta()->expand(inner);
      return qs_div(PuiseuxSeries::constant(cyc(1), inner), d);
    }
    case FormKind::EisN:
      return eisn_series(eisn_data.k, eisn_data.c, eisn_data.d, eisn_data.N,
                         prec);
    case FormKind::MuDeriv: {
      const MuData& md = mu_data;
      Frac inner = prec * Frac(md.d, md.a);
      PuiseuxSeries e2_big =
          qs_scale(fe_eis1(2)->expand(inner), cyc(-24));
      PuiseuxSeries e2 = qs_scale(fe_eis1(2)->expand(prec), cyc(-24));
      PuiseuxSeries sub = qs_compose_scale(e2_big, Frac(md.a, md.d), md.b, md.d);
      PuiseuxSeries s = qs_scale(
          qs_sub(qs_scale(sub, cyc(rat(md.a, md.d))), e2), cyc(rat(1, 6)));
      PuiseuxSeries g2 = fe_eis1(2)->expand(prec);
      for (long i = 0; i < md.j; ++i) {
        long w = 2 * i + 2;
        s = qs_add(qs_theta(s), qs_scale(qs_mul(g2, s), cyc(rat(2 * w))));
      }
      return s;
    }
    case FormKind::SerreX: {
      const FormExpr& child = children[0];
      PuiseuxSeries cs = child->expand(prec);
      Frac g2_prec = prec - frac_min(child->lead_lb, Frac(0, 1));
      PuiseuxSeries g2 = fe_eis1(2)->expand(g2_prec);
      long w = child->weight;
      return qs_add(qs_theta(cs), qs_scale(qs_mul(g2, cs), cyc(rat(2 * w))));
    }
    case FormKind::Expansion:
      return leaf_series.truncated(prec);
    case FormKind::Sum: {
      PuiseuxSeries acc = children[0]->expand(prec);
      for (size_t i = 1; i < children.size(); ++i)
        acc = qs_add(acc, children[i]->expand(prec));
      return acc;
    }
    case FormKind::Product: {
      // Budget: child i expands at prec - (sum of the other leading bounds),
      // so the folded product ends with every exponent < prec exact.
      PuiseuxSeries acc =
          children[0]->expand(prec - (lead_lb - children[0]->lead_lb));
      for (size_t i = 1; i < children.size(); ++i) {
        acc = qs_mul(acc, children[i]->expand(
                              prec - (lead_lb - children[i]->lead_lb)));
      }
      return acc;
    }
    case FormKind::Scale:
      return qs_scale(children[0]->expand(prec), scalar_value);
  }
  throw Error(Errc::InvalidArgument, "unreachable form kind");
}

// ---------------------------------------------------------------------------
// Factories.

FormExpr fe_zero(long weight) {
  return new_node(FormKind::Zero, weight, 1, Frac(0, 1));
}

FormExpr fe_const(const CycRational& c) {
  if (c.is_zero()) return fe_zero(0);
  auto n = new_node(FormKind::Const, 0, 1, Frac(0, 1));
  n->scalar_value = c;
  return n;
}

FormExpr fe_const(const Rational& c) { return fe_const(cyc(c)); }

FormExpr fe_eis1(long K) {
  require(K % 2 == 0, Errc::OddWeight, "Eisenstein weight must be even");
  require(K >= 2, Errc::InvalidArgument, "Eisenstein weight must be >= 2");
  std::lock_guard<std::mutex> lock(g_intern_mutex);
  auto& cache = eis1_interned();
  auto it = cache.find(K);
  if (it != cache.end()) return it->second;
  auto n = new_node(FormKind::Eis1, K, 1, Frac(0, 1));
  n->eis_k = K;
  cache.emplace(K, n);
  return n;
}

FormExpr fe_delta() {
  std::lock_guard<std::mutex> lock(g_intern_mutex);
  static FormExpr node = new_node(FormKind::Delta, 12, 1, Frac(1, 1));
  return node;
}

FormExpr fe_delta_inverse() {
  std::lock_guard<std::mutex> lock(g_intern_mutex);
  static FormExpr node = new_node(FormKind::DeltaInverse, -12, 1, Frac(-1, 1));
  return node;
}

FormExpr fe_eisn(long k, long c, long d, long N) {
  require(k % 2 == 0, Errc::OddWeight, "Eisenstein weight must be even");
  require(k >= 4, Errc::InvalidArgument,
          "level-N Eisenstein atoms need weight >= 4");
  require(N >= 1, Errc::InvalidArgument, "level must be >= 1");
  if (N == 1) return fe_scale(rat(2), fe_eis1(k));
  c = mod_pos(c, N);
  d = mod_pos(d, N);
  long nc = mod_pos(-c, N), nd = mod_pos(-d, N);
  if (std::make_pair(nc, nd) < std::make_pair(c, d)) {
    c = nc;
    d = nd;
  }
  std::lock_guard<std::mutex> lock(g_intern_mutex);
  auto& cache = eisn_interned();
  std::array<long, 4> key{k, c, d, N};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto n = new_node(FormKind::EisN, k, N, Frac(0, 1));
  n->eisn_data = EisNData{k, c, d, N};
  cache.emplace(key, n);
  return n;
}

FormExpr fe_mu_deriv(const Mat2Q& delta, long j) {
  require(j >= 0, Errc::InvalidArgument, "derivative order must be >= 0");
  HnfDecomposition h = hnf_decompose(delta);
  if (h.a == 1 && h.d == 1) return fe_zero(2 * j + 2);
  std::lock_guard<std::mutex> lock(g_intern_mutex);
  auto& cache = mu_interned();
  std::array<long, 4> key{h.a, h.b, h.d, j};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto n = new_node(FormKind::MuDeriv, 2 * j + 2, h.a * h.d, Frac(0, 1));
  n->mu_data = MuData{h.a, h.b, h.d, j};
  cache.emplace(key, n);
  return n;
}

FormExpr fe_expansion(PuiseuxSeries s, long weight, long level) {
  require(weight % 2 == 0, Errc::InvalidArgument,
          "expansion leaves carry even weight");
  require(level >= 0, Errc::InvalidArgument, "level must be >= 0");
  auto n = new_node(FormKind::Expansion, weight, level, s.lead_or_prec());
  n->leaf_series = std::move(s);
  return n;
}

FormExpr fe_sum(std::vector<FormExpr> children) {
  std::vector<FormExpr> kept;
  bool saw_any = false;
  long first_weight = 0;
  for (auto& c : children) {
    require(c != nullptr, Errc::InvalidArgument, "null operand");
    if (!saw_any) {
      saw_any = true;
      first_weight = c->weight;
    }
    if (c->kind == FormKind::Zero) continue;
    if (c->kind == FormKind::Sum) {
      kept.insert(kept.end(), c->children.begin(), c->children.end());
    } else {
      kept.push_back(c);
    }
  }
  if (kept.empty()) return fe_zero(saw_any ? first_weight : 0);
  long w = kept[0]->weight;
  long level = 1;
  Frac lb = kept[0]->lead_lb;
  for (const auto& c : kept) {
    require(c->weight == w, Errc::WeightMismatch,
            "sum of forms of different weights");
    level = combine_level(level, c->level);
    lb = frac_min(lb, c->lead_lb);
  }
  if (kept.size() == 1) return kept[0];
  auto n = new_node(FormKind::Sum, w, level, lb);
  n->children = std::move(kept);
  return n;
}

FormExpr fe_product(std::vector<FormExpr> children) {
  std::vector<FormExpr> work(children.rbegin(), children.rend());
  std::vector<FormExpr> kept;
  CycRational scalar = cyc(1);
  bool zero_seen = false;
  long total_weight = 0;
  while (!work.empty()) {
    FormExpr c = work.back();
    work.pop_back();
    require(c != nullptr, Errc::InvalidArgument, "null operand");
    switch (c->kind) {
      case FormKind::Zero:
        zero_seen = true;
        total_weight += c->weight;
        break;
      case FormKind::Const:
        scalar = scalar * c->scalar_value;
        break;
      case FormKind::Scale:
        scalar = scalar * c->scalar_value;
        work.push_back(c->children[0]);
        break;
      case FormKind::Product:
        for (auto it = c->children.rbegin(); it != c->children.rend(); ++it)
          work.push_back(*it);
        break;
      default:
        kept.push_back(c);
        total_weight += c->weight;
        break;
    }
  }
  if (zero_seen || scalar.is_zero()) return fe_zero(total_weight);
  if (kept.empty()) return fe_const(scalar);
  FormExpr core;
  if (kept.size() == 1) {
    core = kept[0];
  } else {
    long level = 1;
    Frac lb(0, 1);
    for (const auto& c : kept) {
      level = combine_level(level, c->level);
      lb = lb + c->lead_lb;
    }
    auto n = new_node(FormKind::Product, total_weight, level, lb);
    n->children = std::move(kept);
    core = n;
  }
  return fe_scale(scalar, core);
}

FormExpr fe_scale(const CycRational& c, FormExpr f) {
  require(f != nullptr, Errc::InvalidArgument, "null operand");
  if (c.is_zero() || f->kind == FormKind::Zero) return fe_zero(f->weight);
  if (c.is_rational() && c.to_rational() == 1) return f;
  if (f->kind == FormKind::Scale)
    return fe_scale(c * f->scalar_value, f->children[0]);
  if (f->kind == FormKind::Const) return fe_const(c * f->scalar_value);
  auto n = new_node(FormKind::Scale, f->weight, f->level, f->lead_lb);
  n->scalar_value = c;
  n->children = {std::move(f)};
  return n;
}

FormExpr fe_scale(const Rational& c, FormExpr f) {
  return fe_scale(cyc(c), std::move(f));
}

FormExpr fe_pow(const FormExpr& f, long e) {
  require(e >= 0, Errc::InvalidArgument, "negative form powers not supported");
  if (e == 0) return fe_one();
  return fe_product(std::vector<FormExpr>(static_cast<size_t>(e), f));
}

// ---------------------------------------------------------------------------
// Serre derivative.

FormExpr fe_serre_x(const FormExpr& f) {
  require(f != nullptr, Errc::InvalidArgument, "null operand");
  switch (f->kind) {
    case FormKind::Zero:
      return fe_zero(f->weight + 2);
    case FormKind::Const:
      return fe_zero(2);
    case FormKind::Eis1: {
      long K = f->eis_k;
      if (K == 2)
        return fe_sum({fe_scale(rat(5, 6), fe_eis1(4)),
                       fe_scale(rat(2), fe_pow(fe_eis1(2), 2))});
      if (K == 4) return fe_scale(rat(7, 10), fe_eis1(6));
      if (K == 6) return fe_scale(rat(400, 7), fe_pow(fe_eis1(4), 2));
      return fe_serre_x(g46_poly_expr(eis1_g46(K)));
    }
    case FormKind::Delta:
      return fe_zero(14);
    case FormKind::DeltaInverse:
      return fe_zero(-10);
    case FormKind::EisN:
    case FormKind::SerreX: {
      auto n = new_node(FormKind::SerreX, f->weight + 2, f->level, f->lead_lb);
      n->children = {f};
      return n;
    }
    case FormKind::MuDeriv:
      return fe_mu_deriv(
          mat2q(f->mu_data.a, f->mu_data.b, 0, f->mu_data.d),
          f->mu_data.j + 1);
    case FormKind::Expansion: {
      const PuiseuxSeries& s = f->leaf_series;
      Frac g2_prec = s.prec() - frac_min(s.lead_or_prec(), Frac(0, 1));
      PuiseuxSeries g2 = fe_eis1(2)->expand(g2_prec);
      PuiseuxSeries out = qs_add(
          qs_theta(s), qs_scale(qs_mul(g2, s), cyc(rat(2 * f->weight))));
      return fe_expansion(std::move(out), f->weight + 2, f->level);
    }
    case FormKind::Sum: {
      std::vector<FormExpr> parts;
      parts.reserve(f->children.size());
      for (const auto& c : f->children) parts.push_back(fe_serre_x(c));
      return fe_sum(std::move(parts));
    }
    case FormKind::Product: {
      std::vector<FormExpr> parts;
      for (size_t i = 0; i < f->children.size(); ++i) {
        std::vector<FormExpr> factors = f->children;
        factors[i] = fe_serre_x(f->children[i]);
        parts.push_back(fe_product(std::move(factors)));
      }
      return fe_sum(std::move(parts));
    }
    case FormKind::Scale:
      return fe_scale(f->scalar_value, fe_serre_x(f->children[0]));
  }
  throw Error(Errc::InvalidArgument, "unreachable form kind");
}

// ---------------------------------------------------------------------------
// Queries.

PuiseuxSeries fe_expand(const FormExpr& f, Frac prec) {
  require(f != nullptr, Errc::InvalidArgument, "null operand");
  return f->expand(prec);
}

bool fe_equal_at(const FormExpr& a, const FormExpr& b, Frac prec) {
  return qs_equal_shared(fe_expand(a, prec), fe_expand(b, prec));
}

bool fe_zero_at(const FormExpr& f, Frac prec) {
  return fe_expand(f, prec).is_zero();
}

std::string fe_to_string(const FormExpr& f) {
  if (f == nullptr) return "<null>";
  std::ostringstream os;
  switch (f->kind) {
    case FormKind::Zero:
      os << "0";
      break;
    case FormKind::Const:
      os << f->scalar_value.to_string();
      break;
    case FormKind::Eis1:
      os << "G" << f->eis_k;
      break;
    case FormKind::Delta:
      os << "DELTA";
      break;
    case FormKind::DeltaInverse:
      os << "DELTA^-1";
      break;
    case FormKind::EisN:
      os << "E[" << f->eisn_data.k << ";(" << f->eisn_data.c << ","
         << f->eisn_data.d << ");" << f->eisn_data.N << "]";
      break;
    case FormKind::MuDeriv:
      os << "Mu";
      if (f->mu_data.j > 0) os << "^(" << f->mu_data.j << ")";
      os << "[" << f->mu_data.a << "," << f->mu_data.b << ";" << f->mu_data.d
         << "]";
      break;
    case FormKind::SerreX:
      os << "X(" << fe_to_string(f->children[0]) << ")";
      break;
    case FormKind::Expansion:
      os << "{w=" << f->weight << ",L=" << f->level << ": "
         << qs_to_string(f->leaf_series) << "}";
      break;
    case FormKind::Sum: {
      os << "(";
      for (size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << " + ";
        os << fe_to_string(f->children[i]);
      }
      os << ")";
      break;
    }
    case FormKind::Product: {
      for (size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << "*";
        os << fe_to_string(f->children[i]);
      }
      break;
    }
    case FormKind::Scale:
      os << f->scalar_value.to_string() << "*" << fe_to_string(f->children[0]);
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Slash.

namespace {

// u = +-T^t exactly when c = 0 and the diagonal entries are equal signs;
// the translation amount is sign * b.
bool translation_amount(const Mat2Q& u, long* t) {
  if (!(u.c == 0) || !u.is_integral()) return false;
  if (u.a == 1 && u.d == 1) {
    *t = static_cast<long>(u.b.get_num().get_si());
    return true;
  }
  if (u.a == -1 && u.d == -1) {
    *t = -static_cast<long>(u.b.get_num().get_si());
    return true;
  }
  return false;
}

SlashResult slash_unimodular(const FormExpr& f, const Mat2Q& u,
                             Frac prec_hint);
SlashResult slash_triangular(const FormExpr& f, long a, long b, long d,
                             Frac prec_hint);

// The finite class sum implementing EisN(k, v, N) ⫽ t for an integral
// primitive triangular t of determinant n: the matrix partitions the
// depth-Nn row classes over v's fiber into exactly n classes, each hit
// once, with an overall factor n^(-k/2) from the normalization.
FormExpr eisn_class_sum(long k, long c0, long d0, long N, long a, long b,
                        long d) {
  long n = a * d;
  long NN = N * n;
  std::set<std::pair<long, long>> raw;
  for (long u1 = 0; u1 < n; ++u1) {
    for (long u2 = 0; u2 < n; ++u2) {
      long rc = mod_pos((c0 + N * u1) * a, NN);
      long rd = mod_pos((c0 + N * u1) * b + (d0 + N * u2) * d, NN);
      raw.insert({rc, rd});
    }
  }
  require(static_cast<long>(raw.size()) == n, Errc::InvalidArgument,
          "internal error: Eisenstein class sum has wrong size");
  std::vector<FormExpr> parts;
  parts.reserve(raw.size());
  for (const auto& [rc, rd] : raw) parts.push_back(fe_eisn(k, rc, rd, NN));
  return fe_scale(rat_pow(rat(n), -k / 2), fe_sum(std::move(parts)));
}

SlashResult slash_unimodular(const FormExpr& f, const Mat2Q& u,
                             Frac prec_hint) {
  if (u.is_scalar()) return {f, true};
  switch (f->kind) {
    case FormKind::Zero:
    case FormKind::Const:
    case FormKind::Delta:
    case FormKind::DeltaInverse:
      return {f, true};
    case FormKind::Eis1: {
      if (f->eis_k >= 4) return {f, true};
      if (u.c == 0) return {f, true};  // +-T^b fixes G2
      throw Error(Errc::UnknownTransformation,
                  "G2 is fixed only by translations among unimodular "
                  "matrices");
    }
    case FormKind::EisN: {
      const EisNData& e = f->eisn_data;
      long ua = static_cast<long>(u.a.get_num().get_si());
      long ub = static_cast<long>(u.b.get_num().get_si());
      long uc = static_cast<long>(u.c.get_num().get_si());
      long ud = static_cast<long>(u.d.get_num().get_si());
      long nc = mod_pos(e.c * ua + e.d * uc, e.N);
      long nd = mod_pos(e.c * ub + e.d * ud, e.N);
      return {fe_eisn(e.k, nc, nd, e.N), true};
    }
    case FormKind::MuDeriv: {
      Mat2Q dm = mat2q(f->mu_data.a, f->mu_data.b, 0, f->mu_data.d);
      return {fe_mu_deriv(dm * u, f->mu_data.j), true};
    }
    case FormKind::SerreX: {
      SlashResult rc = slash_unimodular(f->children[0], u, prec_hint);
      return {fe_serre_x(rc.expr), rc.exact};
    }
    case FormKind::Expansion: {
      if (f->level > 0 &&
          (gamma_membership(u, f->level) ||
           gamma_membership(rat(-1) * u, f->level)))
        return {f, true};
      long t = 0;
      if (translation_amount(u, &t)) {
        PuiseuxSeries s = qs_compose_scale(f->leaf_series, Frac(1, 1), t, 1);
        return {fe_expansion(std::move(s), f->weight, f->level), false};
      }
      throw Error(Errc::UnknownTransformation,
                  "expansion leaf meets a matrix outside its level group");
    }
    case FormKind::Sum: {
      std::vector<FormExpr> parts;
      bool exact = true;
      for (const auto& c : f->children) {
        SlashResult r = slash_unimodular(c, u, prec_hint);
        exact = exact && r.exact;
        parts.push_back(r.expr);
      }
      return {fe_sum(std::move(parts)), exact};
    }
    case FormKind::Product: {
      std::vector<FormExpr> parts;
      bool exact = true;
      for (const auto& c : f->children) {
        SlashResult r = slash_unimodular(c, u, prec_hint);
        exact = exact && r.exact;
        parts.push_back(r.expr);
      }
      return {fe_product(std::move(parts)), exact};
    }
    case FormKind::Scale: {
      SlashResult r = slash_unimodular(f->children[0], u, prec_hint);
      return {fe_scale(f->scalar_value, r.expr), r.exact};
    }
  }
  throw Error(Errc::InvalidArgument, "unreachable form kind");
}

SlashResult slash_triangular(const FormExpr& f, long a, long b, long d,
                             Frac prec_hint) {
  long n = a * d;
  switch (f->kind) {
    case FormKind::Zero:
    case FormKind::Const:
      return {f, true};
    case FormKind::Eis1: {
      long K = f->eis_k;
      if (K == 2) {
        // G2 ⫽ t = (a/d) G2(zeta_d^b q^(a/d)): a quasimodular leaf fixed
        // only by translations (level 0).
        Frac inner = prec_hint * Frac(d, a);
        PuiseuxSeries g2 = fe_eis1(2)->expand(inner);
        PuiseuxSeries sub = qs_compose_scale(g2, Frac(a, d), b, d);
        return {fe_expansion(qs_scale(sub, cyc(rat(a, d))), 2, 0), false};
      }
      return {fe_scale(rat(1, 2), eisn_class_sum(K, 0, 0, 1, a, b, d)), true};
    }
    case FormKind::Delta: {
      // Slash through Delta = 8000 G4^3 - 147 G6^2 (the slash is
      // multiplicative, so the polynomial transports it symbolically).
      FormExpr g4s = slash_triangular(fe_eis1(4), a, b, d, prec_hint).expr;
      FormExpr g6s = slash_triangular(fe_eis1(6), a, b, d, prec_hint).expr;
      return {fe_sum({fe_scale(rat(8000), fe_pow(g4s, 3)),
                      fe_scale(rat(-147), fe_pow(g6s, 2))}),
              true};
    }
    case FormKind::DeltaInverse: {
      Frac inner = prec_hint * Frac(d, a);
      PuiseuxSeries s = fe_delta_inverse()->expand(inner);
      PuiseuxSeries sub = qs_compose_scale(s, Frac(a, d), b, d);
      PuiseuxSeries out = qs_scale(sub, cyc(rat_pow(rat(a, d), -6)));
      return {fe_expansion(std::move(out), -12, n), false};
    }
    case FormKind::EisN: {
      const EisNData& e = f->eisn_data;
      return {eisn_class_sum(e.k, e.c, e.d, e.N, a, b, d), true};
    }
    case FormKind::MuDeriv: {
      // Cocycle: mu_delta ⫽ t = mu_(delta t) - mu_t, then j applications of
      // the X-vs-slash law X(g) ⫽ t = X(g ⫽ t) - (w/2) mu_t (g ⫽ t).
      Mat2Q dm = mat2q(f->mu_data.a, f->mu_data.b, 0, f->mu_data.d);
      Mat2Q tm = mat2q(a, b, 0, d);
      FormExpr mu_t = fe_mu_deriv(tm, 0);
      FormExpr s = fe_sum(
          {fe_mu_deriv(dm * tm, 0), fe_scale(rat(-1), mu_t)});
      for (long i = 1; i <= f->mu_data.j; ++i)
        s = fe_sum({fe_serre_x(s),
                    fe_scale(rat(-i), fe_product({mu_t, s}))});
      return {s, true};
    }
    case FormKind::SerreX: {
      const FormExpr& child = f->children[0];
      SlashResult rc = slash_triangular(child, a, b, d, prec_hint);
      FormExpr mu_t = fe_mu_deriv(mat2q(a, b, 0, d), 0);
      return {fe_sum({fe_serre_x(rc.expr),
                      fe_scale(rat(-child->weight, 2),
                               fe_product({mu_t, rc.expr}))}),
              rc.exact};
    }
    case FormKind::Expansion: {
      PuiseuxSeries sub =
          qs_compose_scale(f->leaf_series, Frac(a, d), b, d);
      PuiseuxSeries out =
          qs_scale(sub, cyc(rat_pow(rat(a, d), f->weight / 2)));
      long level = f->level == 0 ? 0 : f->level * n;
      return {fe_expansion(std::move(out), f->weight, level), false};
    }
    case FormKind::Sum: {
      std::vector<FormExpr> parts;
      bool exact = true;
      for (const auto& c : f->children) {
        SlashResult r = slash_triangular(c, a, b, d, prec_hint);
        exact = exact && r.exact;
        parts.push_back(r.expr);
      }
      return {fe_sum(std::move(parts)), exact};
    }
    case FormKind::Product: {
      std::vector<FormExpr> parts;
      bool exact = true;
      for (const auto& c : f->children) {
        SlashResult r = slash_triangular(c, a, b, d, prec_hint);
        exact = exact && r.exact;
        parts.push_back(r.expr);
      }
      return {fe_product(std::move(parts)), exact};
    }
    case FormKind::Scale: {
      SlashResult r = slash_triangular(f->children[0], a, b, d, prec_hint);
      return {fe_scale(f->scalar_value, r.expr), r.exact};
    }
  }
  throw Error(Errc::InvalidArgument, "unreachable form kind");
}

}  // namespace

SlashResult slash(const FormExpr& f, const Mat2Q& alpha, Frac prec_hint) {
  require(f != nullptr, Errc::InvalidArgument, "null operand");
  require(alpha.det() > 0, Errc::NotPositiveDet,
          "slash requires positive determinant");
  if (alpha.is_scalar()) return {f, true};
  HnfDecomposition h = hnf_decompose(alpha);
  SlashResult out{f, true};
  if (!h.u.is_identity()) out = slash_unimodular(out.expr, h.u, prec_hint);
  if (h.a != 1 || h.b != 0 || h.d != 1) {
    SlashResult t = slash_triangular(out.expr, h.a, h.b, h.d, prec_hint);
    out = {t.expr, out.exact && t.exact};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cocycles.

FormExpr fe_mu_expr(const Mat2Q& alpha) { return fe_mu_deriv(alpha, 0); }

FormExpr fe_nu_expr(const Mat2Q& alpha, long m) {
  require(m >= 0, Errc::InvalidArgument, "nu order must be >= 0");
  if (m == 0) return fe_zero(0);
  FormExpr g4m = fe_pow(fe_eis1(4), m);
  SlashResult s = slash(g4m, alpha);
  return fe_scale(rat(-5, 24),
                  fe_sum({s.expr, fe_scale(rat(-1), g4m)}));
}

PuiseuxSeries mu(const Mat2Q& alpha, Frac prec) {
  return fe_expand(fe_mu_expr(alpha), prec);
}

PuiseuxSeries nu(const Mat2Q& alpha, long m, Frac prec) {
  return fe_expand(fe_nu_expr(alpha, m), prec);
}

// ---------------------------------------------------------------------------
// Level-1 Eisenstein structure.

std::vector<std::array<long, 2>> g46_monomials(long K) {
  require(K >= 0 && K % 2 == 0, Errc::InvalidArgument,
          "monomial weight must be even and >= 0");
  std::vector<std::array<long, 2>> out;
  for (long b = 0; 6 * b <= K; ++b) {
    long rem = K - 6 * b;
    if (rem % 4 == 0) out.push_back({rem / 4, b});
  }
  return out;
}

const G46Poly& eis1_g46(long K) {
  require(K % 2 == 0, Errc::OddWeight, "Eisenstein weight must be even");
  require(K >= 4, Errc::InvalidArgument, "Eisenstein weight must be >= 4");
  static std::mutex mu_;
  static std::map<long, G46Poly> cache;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache.find(K);
    if (it != cache.end()) return it->second;
  }
  std::vector<std::array<long, 2>> mons = g46_monomials(K);
  long dim = static_cast<long>(mons.size());
  long rows = dim + 3;
  Frac prec(rows, 1);
  std::vector<PuiseuxSeries> cols;
  cols.reserve(mons.size());
  for (const auto& [ea, eb] : mons) {
    FormExpr mon =
        fe_product({fe_pow(fe_eis1(4), ea), fe_pow(fe_eis1(6), eb)});
    cols.push_back(fe_expand(mon, prec));
  }
  PuiseuxSeries target = fe_expand(fe_eis1(K), prec);
  RatMatrix mat(rows, std::vector<Rational>(mons.size()));
  std::vector<Rational> rhs(rows);
  for (long i = 0; i < rows; ++i) {
    for (size_t jm = 0; jm < mons.size(); ++jm) {
      CycRational cc = cols[jm].coeff(Frac(i, 1));
      mat[i][jm] = cc.to_rational();
    }
    rhs[i] = target.coeff(Frac(i, 1)).to_rational();
  }
  auto sol = solve_rational(mat, rhs);
  require(sol.has_value(), Errc::InvalidArgument,
          "internal error: Eisenstein polynomial solve failed");
  G46Poly poly;
  for (size_t jm = 0; jm < mons.size(); ++jm)
    if ((*sol)[jm] != 0) poly.emplace_back(mons[jm], (*sol)[jm]);
  // Independent check a few coefficients past the solve window.
  require(fe_equal_at(g46_poly_expr(poly), fe_eis1(K), Frac(rows + 4, 1)),
          Errc::InvalidArgument,
          "internal error: Eisenstein polynomial verification failed");
  std::lock_guard<std::mutex> lock(mu_);
  return cache.emplace(K, std::move(poly)).first->second;
}

FormExpr g46_poly_expr(const G46Poly& poly) {
  std::vector<FormExpr> parts;
  parts.reserve(poly.size());
  for (const auto& [mon, coeff] : poly) {
    parts.push_back(fe_scale(
        coeff,
        fe_product({fe_pow(fe_eis1(4), mon[0]), fe_pow(fe_eis1(6), mon[1])})));
  }
  return fe_sum(std::move(parts));
}

// ---------------------------------------------------------------------------
// Named constructors.

FormExpr eisenstein(long K, Frac prec) {
  FormExpr f = fe_eis1(K);
  f->expand(prec);
  return f;
}

FormExpr delta(Frac prec) {
  FormExpr f = fe_delta();
  f->expand(prec);
  return f;
}

}  // namespace qmh
