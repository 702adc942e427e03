#pragma once

// Exact rational scalars (GMP-backed) plus a small machine-word fraction type
// used for series exponents and precision bounds.

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <string>

#include "qmh/error.hpp"

namespace qmh {

using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
  require(d != 0, Errc::InvalidArgument, "rational with zero denominator");
  Rational x(n, d);
  x.canonicalize();
  return x;
}

inline bool rat_is_integer(const Rational& r) { return r.get_den() == 1; }

// e may be negative (then r must be nonzero).
Rational rat_pow(const Rational& r, long e);

// Canonical "p" / "-p/q" form, denominator omitted when 1.
std::string rat_str(const Rational& r);

// Parses "p", "-p", "p/q". Throws ParseError.
Rational rat_parse(const std::string& s);

// Exact Bernoulli numbers, B1 = -1/2 convention. Cached.
Rational bernoulli(long n);

// ---------------------------------------------------------------------------
// Frac: a small exact fraction on machine words. Used for Puiseux exponents
// and precision bounds, where magnitudes stay tiny. Always normalized with
// d > 0 and gcd(|n|, d) = 1.
struct Frac {
  long long n = 0;
  long long d = 1;

  Frac() = default;
  Frac(long long num, long long den) : n(num), d(den) { normalize(); }

  void normalize() {
    require(d != 0, Errc::InvalidArgument, "Frac with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
  }

  bool is_integer() const { return d == 1; }
  std::string str() const {
    if (d == 1) return std::to_string(n);
    return std::to_string(n) + "/" + std::to_string(d);
  }
  Rational to_rational() const { return rat(static_cast<long>(n), static_cast<long>(d)); }
};

inline Frac frac(long long n, long long d = 1) { return Frac(n, d); }

inline Frac operator+(const Frac& a, const Frac& b) {
  return Frac(a.n * b.d + b.n * a.d, a.d * b.d);
}
inline Frac operator-(const Frac& a, const Frac& b) {
  return Frac(a.n * b.d - b.n * a.d, a.d * b.d);
}
inline Frac operator-(const Frac& a) { return Frac(-a.n, a.d); }
inline Frac operator*(const Frac& a, const Frac& b) {
  return Frac(a.n * b.n, a.d * b.d);
}
inline Frac operator*(const Frac& a, long long k) { return Frac(a.n * k, a.d); }

inline int frac_cmp(const Frac& a, const Frac& b) {
  // Magnitudes are tiny; 128-bit cross products cannot overflow.
  __int128 lhs = static_cast<__int128>(a.n) * b.d;
  __int128 rhs = static_cast<__int128>(b.n) * a.d;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}
inline bool operator<(const Frac& a, const Frac& b) { return frac_cmp(a, b) < 0; }
inline bool operator<=(const Frac& a, const Frac& b) { return frac_cmp(a, b) <= 0; }
inline bool operator>(const Frac& a, const Frac& b) { return frac_cmp(a, b) > 0; }
inline bool operator>=(const Frac& a, const Frac& b) { return frac_cmp(a, b) >= 0; }
inline bool operator==(const Frac& a, const Frac& b) { return a.n == b.n && a.d == b.d; }
inline bool operator!=(const Frac& a, const Frac& b) { return !(a == b); }
inline Frac frac_min(const Frac& a, const Frac& b) { return a < b ? a : b; }
inline Frac frac_max(const Frac& a, const Frac& b) { return a < b ? b : a; }

// Positive modulus for machine integers.
inline long long mod_pos(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace qmh
