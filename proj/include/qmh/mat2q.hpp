#pragma once

// 2x2 matrices over Q. Everything in the coset layer and the slash calculus
// funnels through this type; entries stay exact rationals.

#include <array>
#include <string>

#include "qmh/rational.hpp"

namespace qmh {

struct Mat2Q {
  Rational a, b, c, d;  // [a b; c d]

  Rational det() const { return a * d - b * c; }
  bool is_integral() const {
    return rat_is_integer(a) && rat_is_integer(b) && rat_is_integer(c) &&
           rat_is_integer(d);
  }
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
  bool is_unimodular() const { return is_integral() && det() == 1; }
  bool is_scalar() const { return b == 0 && c == 0 && a == d; }
  bool is_upper_triangular() const { return c == 0; }

  Mat2Q inverse() const {
    Rational dt = det();
    require(dt != 0, Errc::InvalidArgument, "inverse of singular matrix");
    return Mat2Q{d / dt, -b / dt, -c / dt, a / dt};
  }

  std::string str() const {
    return "[" + rat_str(a) + " " + rat_str(b) + "; " + rat_str(c) + " " +
           rat_str(d) + "]";
  }
};

inline Mat2Q operator*(const Mat2Q& x, const Mat2Q& y) {
  return Mat2Q{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
               x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2Q operator*(const Rational& s, const Mat2Q& y) {
  return Mat2Q{s * y.a, s * y.b, s * y.c, s * y.d};
}

inline bool operator==(const Mat2Q& x, const Mat2Q& y) {
  return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
}
inline bool operator!=(const Mat2Q& x, const Mat2Q& y) { return !(x == y); }

// Total order (for deterministic containers).
inline bool operator<(const Mat2Q& x, const Mat2Q& y) {
  if (int c0 = cmp(x.a, y.a); c0 != 0) return c0 < 0;
  if (int c1 = cmp(x.b, y.b); c1 != 0) return c1 < 0;
  if (int c2 = cmp(x.c, y.c); c2 != 0) return c2 < 0;
  return cmp(x.d, y.d) < 0;
}

inline Mat2Q mat2q(long a, long b, long c, long d) {
  return Mat2Q{rat(a), rat(b), rat(c), rat(d)};
}

inline Mat2Q mat_identity() { return mat2q(1, 0, 0, 1); }
inline Mat2Q mat_S() { return mat2q(0, -1, 1, 0); }
inline Mat2Q mat_T() { return mat2q(1, 1, 0, 1); }

}  // namespace qmh
