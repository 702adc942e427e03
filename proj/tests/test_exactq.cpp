// Exact scalar and series layer: rationals, cyclotomic rationals, truncated
// Puiseux series. The series oracles are classical q-expansions (divisor
// sums, Ramanujan tau) frozen by hand.

#include <map>

#include "doctest.h"
#include "qmh/cyclotomic.hpp"
#include "qmh/puiseux.hpp"
#include "qmh/rational.hpp"
#include "qmh/rng.hpp"

using namespace qmh;

namespace {

// tau(1..8); enough for every check here.
const long kTau[] = {1, -24, 252, -1472, 4830, -6048, -16744, 84480};

PuiseuxSeries delta_series(long prec) {
  std::map<long, CycRational> t;
  for (long n = 1; n <= 8 && n < prec; ++n) t.emplace(n, cyc(rat(kTau[n - 1])));
  REQUIRE(prec <= 9);  // oracle table bound
  return PuiseuxSeries(1, std::move(t), frac(prec));
}

long sigma(long k, long n) {
  long s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      long p = 1;
      for (long i = 0; i < k; ++i) p *= d;
      s += p;
    }
  return s;
}

PuiseuxSeries random_series(RandomSource& rs, long denom, long lo, long prec_num,
                            bool cyclotomic) {
  std::map<long, CycRational> t;
  long nterms = rs.range(0, 6);
  for (long i = 0; i < nterms; ++i) {
    long n = rs.range(lo, prec_num - 1);
    CycRational c = cyc(rs.rational(8, 4));
    if (cyclotomic && rs.coin())
      c += cyc(rs.rational(5, 3)) * CycRational::root_of_unity(8, rs.range(1, 7));
    t[n] += c;
  }
  return PuiseuxSeries(denom, std::move(t), frac(prec_num, denom));
}

}  // namespace

TEST_CASE("bernoulli numbers") {
  CHECK(bernoulli(0) == rat(1));
  CHECK(bernoulli(1) == rat(-1, 2));
  CHECK(bernoulli(2) == rat(1, 6));
  CHECK(bernoulli(3) == rat(0));
  CHECK(bernoulli(4) == rat(-1, 30));
  CHECK(bernoulli(6) == rat(1, 42));
  CHECK(bernoulli(8) == rat(-1, 30));
  CHECK(bernoulli(10) == rat(5, 66));
  CHECK(bernoulli(12) == rat(-691, 2730));
}

TEST_CASE("rational helpers") {
  CHECK(rat_str(rat(-3, 6)) == "-1/2");
  CHECK(rat_str(rat(4, 2)) == "2");
  CHECK(rat_parse("-7/3") == rat(-7, 3));
  CHECK(rat_parse("11") == rat(11));
  CHECK_THROWS_AS(rat_parse("1/0"), Error);
  CHECK_THROWS_AS(rat_parse("x"), Error);
  CHECK(rat_pow(rat(2, 3), -2) == rat(9, 4));
  CHECK(rat_pow(rat(5), 0) == rat(1));
}

TEST_CASE("frac arithmetic") {
  CHECK(frac(2, 4) == frac(1, 2));
  CHECK(frac(1, 2) + frac(1, 3) == frac(5, 6));
  CHECK(frac(1, 2) * frac(2, 3) == frac(1, 3));
  CHECK(frac(-1, 2) < frac(0));
  CHECK(frac(3, 2).str() == "3/2");
  CHECK(frac(0, 5).d == 1);
  CHECK(frac_min(frac(1, 3), frac(1, 4)) == frac(1, 4));
}

TEST_CASE("cyclotomic basics") {
  CycRational z4 = CycRational::root_of_unity(4, 1);
  CHECK((z4 * z4) == cyc(-1));
  CHECK((z4 * z4).is_rational());
  CHECK((z4 * z4).to_rational() == rat(-1));

  CycRational z6 = CycRational::root_of_unity(6, 1);
  CHECK(z6 * z6 == z6 - cyc(1));  // Phi_6 = x^2 - x + 1

  CycRational z3 = CycRational::root_of_unity(3, 1);
  CHECK(cyc(1) + z3 + z3 * z3 == CycRational());
  // Cross-conductor identity zeta_3 = zeta_6^2.
  CHECK(z3 == z6 * z6);
  // zeta_2 = -1 is rational.
  CHECK(CycRational::root_of_unity(2, 1) == cyc(-1));
  CHECK(CycRational::root_of_unity(5, 0) == cyc(1));
}

TEST_CASE("cyclotomic inverse and random field ops") {
  RandomSource rs(7321);
  for (int trial = 0; trial < 40; ++trial) {
    long M = rs.pick<long>({3, 4, 5, 6, 8, 12});
    CycRational a = cyc(rs.rational(6, 3));
    for (int j = 0; j < 2; ++j)
      a += cyc(rs.rational(6, 3)) * CycRational::root_of_unity(M, rs.range(0, M - 1));
    if (a.is_zero()) continue;
    CHECK(a * a.inverse() == cyc(1));
  }
  // Distributivity / associativity spot checks across conductors.
  for (int trial = 0; trial < 40; ++trial) {
    CycRational a = CycRational::root_of_unity(rs.range(1, 10), rs.range(0, 9)) *
                    cyc(rs.rational(5, 4));
    CycRational b = CycRational::root_of_unity(rs.range(1, 10), rs.range(0, 9)) *
                    cyc(rs.rational(5, 4));
    CycRational c = CycRational::root_of_unity(rs.range(1, 10), rs.range(0, 9)) *
                    cyc(rs.rational(5, 4));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("series construction canonicalizes") {
  // Integer exponents fed with denominator 4 shrink back to denominator 1.
  std::map<long, CycRational> t{{4, cyc(1)}, {8, cyc(2)}};
  PuiseuxSeries s(4, t, frac(3));
  CHECK(s.denom() == 1);
  CHECK(s.terms().size() == 2);
  CHECK(s.coeff(frac(1)) == cyc(1));
  CHECK(s.coeff(frac(2)) == cyc(2));
  CHECK(s.coeff(frac(1, 2)).is_zero());

  // Terms at/above prec are dropped; zero coefficients are dropped.
  std::map<long, CycRational> t2{{0, CycRational()}, {5, cyc(1)}};
  PuiseuxSeries s2(1, t2, frac(4));
  CHECK(s2.is_zero());
}

TEST_CASE("series multiplication: delta squared") {
  PuiseuxSeries d = delta_series(6);
  PuiseuxSeries dd = qs_mul(d, d);
  // prec = min(6+1, 6+1) = 7
  CHECK(dd.prec() == frac(7));
  CHECK(dd.coeff(frac(1)).is_zero());
  CHECK(dd.coeff(frac(2)) == cyc(1));
  CHECK(dd.coeff(frac(3)) == cyc(-48));            // 2*tau(2)
  CHECK(dd.coeff(frac(4)) == cyc(rat(1080)));      // 2*252 + 576
  CHECK(dd.coeff(frac(5)) == cyc(rat(-2944 + 2 * -24 * 252)));  // 2*tau(4)+2*tau(2)tau(3)
}

TEST_CASE("series division: theta(delta)/delta is E2") {
  PuiseuxSeries d = delta_series(9);
  PuiseuxSeries e2 = qs_div(qs_theta(d), d);
  // E2 = 1 - 24 sum sigma_1(n) q^n.
  CHECK(e2.prec() == frac(8));
  CHECK(e2.coeff(frac(0)) == cyc(1));
  for (long n = 1; n < 8; ++n)
    CHECK(e2.coeff(frac(n)) == cyc(rat(-24 * sigma(1, n))));
}

TEST_CASE("series division guards") {
  PuiseuxSeries z = PuiseuxSeries::zero(frac(5));
  PuiseuxSeries one = PuiseuxSeries::constant(cyc(1), frac(5));
  CHECK_THROWS_AS(qs_div(one, z), Error);
  try {
    qs_div(one, z);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DivisionByZeroSeries);
  }
  // Dividing zero by a unit keeps it zero with sensible precision.
  PuiseuxSeries q = qs_div(z, one);
  CHECK(q.is_zero());
  CHECK(q.prec() == frac(5));
}

TEST_CASE("compose_scale: q maps to -q^(1/2)") {
  PuiseuxSeries d = delta_series(5);
  // z |-> (z+1)/2: r = 1/2, root (1,2): q^n |-> zeta_2^n q^(n/2).
  PuiseuxSeries s = qs_compose_scale(d, frac(1, 2), 1, 2);
  CHECK(s.denom() == 2);
  CHECK(s.prec() == frac(5, 2));
  CHECK(s.coeff(frac(1, 2)) == cyc(-1));
  CHECK(s.coeff(frac(1)) == cyc(-24));
  CHECK(s.coeff(frac(3, 2)) == cyc(-252));
  CHECK(s.coeff(frac(2)) == cyc(-1472));

  // Quarter roots produce honest zeta_4 phases.
  PuiseuxSeries s4 = qs_compose_scale(d, frac(1, 4), 1, 4);
  CHECK(s4.coeff(frac(1, 4)) == CycRational::root_of_unity(4, 1));
  CHECK(s4.coeff(frac(1, 2)) == cyc(24));  // tau(2)*zeta_4^2
}

TEST_CASE("series ring properties (random)") {
  RandomSource rs(424242);
  for (int trial = 0; trial < 60; ++trial) {
    long denom = rs.pick<long>({1, 2, 3, 4});
    PuiseuxSeries a = random_series(rs, denom, 0, 10 * denom, true);
    PuiseuxSeries b = random_series(rs, denom, 0, 10 * denom, true);
    PuiseuxSeries c = random_series(rs, denom, 0, 10 * denom, true);
    CHECK(qs_equal_shared(qs_mul(a, qs_add(b, c)),
                          qs_add(qs_mul(a, b), qs_mul(a, c))));
    CHECK(qs_equal_shared(qs_mul(qs_mul(a, b), c), qs_mul(a, qs_mul(b, c))));
    CHECK(qs_equal_shared(qs_mul(a, b), qs_mul(b, a)));
    // theta is a derivation.
    CHECK(qs_equal_shared(qs_theta(qs_mul(a, b)),
                          qs_add(qs_mul(qs_theta(a), b), qs_mul(a, qs_theta(b)))));
  }
}

TEST_CASE("division round-trip (random)") {
  RandomSource rs(515151);
  for (int trial = 0; trial < 40; ++trial) {
    long denom = rs.pick<long>({1, 2, 3});
    PuiseuxSeries a = random_series(rs, denom, -2 * denom, 8 * denom, true);
    PuiseuxSeries b = random_series(rs, denom, -denom, 8 * denom, true);
    if (!b.leading()) continue;
    PuiseuxSeries q = qs_div(a, b);
    CHECK(qs_equal_shared(qs_mul(q, b), a));
  }
}

TEST_CASE("compose_scale composes multiplicatively (random)") {
  RandomSource rs(616161);
  for (int trial = 0; trial < 20; ++trial) {
    PuiseuxSeries a = random_series(rs, 2, 0, 16, false);
    // Two successive substitutions with trivial phases multiply the ratios.
    PuiseuxSeries s1 = qs_compose_scale(qs_compose_scale(a, frac(1, 2), 0, 1),
                                        frac(3, 1), 0, 1);
    PuiseuxSeries s2 = qs_compose_scale(a, frac(3, 2), 0, 1);
    CHECK(qs_equal_shared(s1, s2));
  }
}

TEST_CASE("series rendering") {
  // G4-style: 1/240 + q + 9q^2 + 28q^3 + 73q^4.
  std::map<long, CycRational> g4;
  g4.emplace(0, cyc(rat(1, 240)));
  for (long n = 1; n <= 4; ++n) g4.emplace(n, cyc(rat(sigma(3, n))));
  CHECK(qs_to_string(PuiseuxSeries(1, g4, frac(5))) ==
        "1/240 + q + 9q^2 + 28q^3 + 73q^4");

  CHECK(qs_to_string(delta_series(4)) == "q - 24q^2 + 252q^3");
  CHECK(qs_to_string(PuiseuxSeries::zero(frac(3))) == "0");

  std::map<long, CycRational> mu{{-1, cyc(rat(-1, 12))}, {6, cyc(-2)}};
  CHECK(qs_to_string(PuiseuxSeries(12, mu, frac(2))) ==
        "-1/12q^(-1/12) - 2q^(1/2)");

  std::map<long, CycRational> m2{{0, cyc(rat(-1, 12))}, {1, cyc(-2)}};
  CHECK(qs_to_string(PuiseuxSeries(2, m2, frac(2))) == "-1/12 - 2q^(1/2)");
}

TEST_CASE("shared-precision equality semantics") {
  std::map<long, CycRational> t1{{0, cyc(1)}, {3, cyc(5)}};
  PuiseuxSeries a(1, t1, frac(4));
  std::map<long, CycRational> t2{{0, cyc(1)}};
  PuiseuxSeries b(1, t2, frac(2));
  // They agree below exponent 2.
  CHECK(qs_equal_shared(a, b));
  std::map<long, CycRational> t3{{1, cyc(1)}};
  PuiseuxSeries c(1, t3, frac(2));
  CHECK(!qs_equal_shared(a, c));
}

TEST_CASE("rng determinism") {
  RandomSource r1(99), r2(99);
  for (int i = 0; i < 100; ++i) CHECK(r1.below(1000) == r2.below(1000));
  RandomSource r3(100);
  bool same = true;
  RandomSource r4(99);
  for (int i = 0; i < 20; ++i) same = same && (r3.below(1000) == r4.below(1000));
  CHECK(!same);
}
