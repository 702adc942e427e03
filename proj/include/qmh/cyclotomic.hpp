#pragma once

// Exact elements of cyclotomic fields Q(zeta_M), represented on the power
// basis 1, z, ..., z^(phi(M)-1) modulo the M-th cyclotomic polynomial.
// Conductors grow lazily: binary operations embed both operands into
// Q(zeta_lcm(M1,M2)). Conductors are never shrunk, so the representation of
// a value depends (deterministically) on the operation history; equality
// compares after embedding into the join field, which is history-free.

#include <vector>

#include "qmh/rational.hpp"

namespace qmh {

long euler_phi(long m);

class CycRational {
 public:
  CycRational() : conductor_(1), coords_(1, Rational(0)) {}
  explicit CycRational(const Rational& r) : conductor_(1), coords_(1, r) {}
  explicit CycRational(long n) : conductor_(1), coords_(1, rat(n)) {}

  // zeta_M^k (k taken mod M).
  static CycRational root_of_unity(long M, long long k);

  long conductor() const { return conductor_; }
  const std::vector<Rational>& coords() const { return coords_; }

  bool is_zero() const;
  bool is_rational() const;
  Rational to_rational() const;  // requires is_rational()

  // Embeds into Q(zeta_M2); requires conductor() | M2.
  CycRational embedded(long M2) const;

  CycRational inverse() const;  // requires nonzero

  std::string to_string() const;

  // The M-th cyclotomic polynomial, monic, ascending coefficients,
  // degree phi(M). Cached.
  static const std::vector<Rational>& cyclotomic_poly(long M);

  friend CycRational operator+(const CycRational& a, const CycRational& b);
  friend CycRational operator-(const CycRational& a, const CycRational& b);
  friend CycRational operator*(const CycRational& a, const CycRational& b);
  friend CycRational operator-(const CycRational& a);
  friend bool operator==(const CycRational& a, const CycRational& b);
  friend bool operator!=(const CycRational& a, const CycRational& b) {
    return !(a == b);
  }

  CycRational& operator+=(const CycRational& b) { return *this = *this + b; }
  CycRational& operator-=(const CycRational& b) { return *this = *this - b; }
  CycRational& operator*=(const CycRational& b) { return *this = *this * b; }

 private:
  CycRational(long conductor, std::vector<Rational> coords)
      : conductor_(conductor), coords_(std::move(coords)) {}

  long conductor_;
  std::vector<Rational> coords_;  // size phi(conductor_)
};

inline CycRational cyc(const Rational& r) { return CycRational(r); }
inline CycRational cyc(long n) { return CycRational(n); }

CycRational operator*(const Rational& a, const CycRational& b);

}  // namespace qmh
