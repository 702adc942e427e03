#include "qmh/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qmh {
namespace {

using Poly = std::vector<Rational>;  // ascending coefficients

void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  poly_trim(out);
  return out;
}

// Exact division; asserts zero remainder (used for cyclotomic factor removal).
Poly poly_div_exact(Poly num, const Poly& den) {
  require(!den.empty(), Errc::InvalidArgument, "polynomial division by zero");
  Poly quot(num.size() >= den.size() ? num.size() - den.size() + 1 : 0,
            Rational(0));
  while (num.size() >= den.size() && !num.empty()) {
    size_t shift = num.size() - den.size();
    Rational c = num.back() / den.back();
    quot[shift] = c;
    for (size_t j = 0; j < den.size(); ++j) num[shift + j] -= c * den[j];
    poly_trim(num);
  }
  require(num.empty(), Errc::InvalidArgument,
          "inexact polynomial division in cyclotomic setup");
  return quot;
}

// Remainder of p modulo a monic polynomial m.
Poly poly_mod_monic(Poly p, const Poly& m) {
  size_t deg_m = m.size() - 1;
  poly_trim(p);
  while (p.size() > deg_m) {
    size_t shift = p.size() - 1 - deg_m;
    Rational c = p.back();
    for (size_t j = 0; j < m.size(); ++j) p[shift + j] -= c * m[j];
    poly_trim(p);
  }
  return p;
}

// Extended gcd in Q[x]: returns (g, u) with u*a = g (mod b), g monic gcd.
std::pair<Poly, Poly> poly_half_gcdext(Poly a, Poly b) {
  Poly u0 = {Rational(1)}, u1 = {};
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    // Divide a by b: a = q*b + r.
    Poly r = a;
    Poly q(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
    while (r.size() >= b.size() && !r.empty()) {
      size_t shift = r.size() - b.size();
      Rational c = r.back() / b.back();
      q[shift] = c;
      for (size_t j = 0; j < b.size(); ++j) r[shift + j] -= c * b[j];
      poly_trim(r);
    }
    poly_trim(q);
    // (a, b) <- (b, r); (u0, u1) <- (u1, u0 - q*u1)
    Poly qu1 = poly_mul(q, u1);
    Poly next = u0;
    next.resize(std::max(next.size(), qu1.size()), Rational(0));
    for (size_t i = 0; i < qu1.size(); ++i) next[i] -= qu1[i];
    poly_trim(next);
    u0 = u1;
    u1 = next;
    a = b;
    b = r;
  }
  // Normalize gcd to monic.
  if (!a.empty() && a.back() != 1) {
    Rational lead = a.back();
    for (auto& c : a) c /= lead;
    for (auto& c : u0) c /= lead;
  }
  return {a, u0};
}

std::vector<long> divisors(long m) {
  std::vector<long> out;
  for (long d = 1; d * d <= m; ++d) {
    if (m % d == 0) {
      out.push_back(d);
      if (d != m / d) out.push_back(m / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::mutex g_cyc_mutex;
std::map<long, Poly> g_cyc_polys;

const Poly& cyclotomic_poly_locked(long M) {
  auto it = g_cyc_polys.find(M);
  if (it != g_cyc_polys.end()) return it->second;
  // Phi_M = (x^M - 1) / prod_{d | M, d < M} Phi_d.
  Poly p(M + 1, Rational(0));
  p[0] = rat(-1);
  p[M] = rat(1);
  for (long d : divisors(M)) {
    if (d == M) continue;
    p = poly_div_exact(std::move(p), cyclotomic_poly_locked(d));
  }
  return g_cyc_polys.emplace(M, std::move(p)).first->second;
}

}  // namespace

long euler_phi(long m) {
  require(m >= 1, Errc::InvalidArgument, "euler_phi of non-positive integer");
  long result = m;
  long n = m;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

const std::vector<Rational>& CycRational::cyclotomic_poly(long M) {
  require(M >= 1, Errc::InvalidArgument, "cyclotomic polynomial index >= 1");
  std::lock_guard<std::mutex> lock(g_cyc_mutex);
  return cyclotomic_poly_locked(M);
}

CycRational CycRational::root_of_unity(long M, long long k) {
  require(M >= 1, Errc::InvalidArgument, "root_of_unity conductor >= 1");
  long kk = static_cast<long>(mod_pos(k, M));
  const Poly& phi = cyclotomic_poly(M);
  long deg = static_cast<long>(phi.size()) - 1;
  Poly x(kk + 1, Rational(0));
  x[kk] = rat(1);
  x = poly_mod_monic(std::move(x), phi);
  x.resize(deg, Rational(0));
  return CycRational(M, std::move(x));
}

bool CycRational::is_zero() const {
  for (const auto& c : coords_)
    if (c != 0) return false;
  return true;
}

bool CycRational::is_rational() const {
  for (size_t i = 1; i < coords_.size(); ++i)
    if (coords_[i] != 0) return false;
  return true;
}

Rational CycRational::to_rational() const {
  require(is_rational(), Errc::InvalidArgument,
          "cyclotomic value is not rational");
  return coords_[0];
}

CycRational CycRational::embedded(long M2) const {
  require(M2 % conductor_ == 0, Errc::InvalidArgument,
          "embedding target must be a multiple of the conductor");
  if (M2 == conductor_) return *this;
  const Poly& phi2 = cyclotomic_poly(M2);
  long deg2 = static_cast<long>(phi2.size()) - 1;
  long s = M2 / conductor_;
  // acc = sum_i coords_[i] * x^(s*i) mod Phi_M2, built with an incremental
  // power ladder.
  Poly acc(deg2, Rational(0));
  Poly power = {rat(1)};  // x^(s*i), reduced
  Poly step(s + 1, Rational(0));
  step[s] = rat(1);
  step = poly_mod_monic(std::move(step), phi2);
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] != 0) {
      for (size_t j = 0; j < power.size(); ++j) acc[j] += coords_[i] * power[j];
    }
    if (i + 1 < coords_.size())
      power = poly_mod_monic(poly_mul(power, step), phi2);
  }
  acc.resize(deg2, Rational(0));
  return CycRational(M2, std::move(acc));
}

CycRational operator+(const CycRational& a, const CycRational& b) {
  long M = std::lcm(a.conductor_, b.conductor_);
  CycRational ae = a.embedded(M), be = b.embedded(M);
  for (size_t i = 0; i < ae.coords_.size(); ++i) ae.coords_[i] += be.coords_[i];
  return ae;
}

CycRational operator-(const CycRational& a, const CycRational& b) {
  long M = std::lcm(a.conductor_, b.conductor_);
  CycRational ae = a.embedded(M), be = b.embedded(M);
  for (size_t i = 0; i < ae.coords_.size(); ++i) ae.coords_[i] -= be.coords_[i];
  return ae;
}

CycRational operator-(const CycRational& a) {
  CycRational out = a;
  for (auto& c : out.coords_) c = -c;
  return out;
}

CycRational operator*(const CycRational& a, const CycRational& b) {
  // Fast path: rational scalar times anything avoids polynomial work.
  if (a.conductor_ == 1) {
    CycRational out = b;
    for (auto& c : out.coords_) c *= a.coords_[0];
    return out;
  }
  if (b.conductor_ == 1) {
    CycRational out = a;
    for (auto& c : out.coords_) c *= b.coords_[0];
    return out;
  }
  long M = std::lcm(a.conductor_, b.conductor_);
  CycRational ae = a.embedded(M), be = b.embedded(M);
  Poly prod = poly_mul(ae.coords_, be.coords_);
  prod = poly_mod_monic(std::move(prod), CycRational::cyclotomic_poly(M));
  prod.resize(euler_phi(M), Rational(0));
  return CycRational(M, std::move(prod));
}

CycRational operator*(const Rational& a, const CycRational& b) {
  return CycRational(a) * b;
}

bool operator==(const CycRational& a, const CycRational& b) {
  long M = std::lcm(a.conductor_, b.conductor_);
  CycRational ae = a.embedded(M), be = b.embedded(M);
  return ae.coords_ == be.coords_;
}

CycRational CycRational::inverse() const {
  require(!is_zero(), Errc::InvalidArgument, "inverse of zero");
  if (is_rational()) {
    return CycRational(Rational(1) / coords_[0]).embedded(conductor_);
  }
  Poly p = coords_;
  auto [g, u] = poly_half_gcdext(p, cyclotomic_poly(conductor_));
  require(g.size() == 1, Errc::InvalidArgument,
          "element not invertible (unexpected gcd)");
  Poly inv = u;
  for (auto& c : inv) c /= g[0];
  inv = poly_mod_monic(std::move(inv), cyclotomic_poly(conductor_));
  inv.resize(coords_.size(), Rational(0));
  return CycRational(conductor_, std::move(inv));
}

std::string CycRational::to_string() const {
  if (is_rational()) return rat_str(coords_[0]);
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] == 0) continue;
    Rational c = coords_[i];
    if (first) {
      if (c < 0) {
        os << "-";
        c = -c;
      }
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    if (i == 0) {
      os << rat_str(c);
    } else {
      if (c != 1) os << rat_str(c) << "*";
      os << "z" << conductor_;
      if (i > 1) os << "^" << i;
    }
  }
  os << ")";
  return os.str();
}

}  // namespace qmh
