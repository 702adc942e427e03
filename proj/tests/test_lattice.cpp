// Coset layer: Hermite decomposition, coset keys, orbits, Hecke cosets,
// membership and sampling.

#include <set>

#include "doctest.h"
#include "qmh/lattice.hpp"

using namespace qmh;

TEST_CASE("hermite decomposition basics") {
  // [0 -2; 1 0] = U * T with U = [0 -1; 1 0], T = [1 0; 0 2].
  HnfDecomposition h = hnf_decompose(mat2q(0, -2, 1, 0));
  CHECK(h.u == mat2q(0, -1, 1, 0));
  CHECK(h.t == mat2q(1, 0, 0, 2));
  CHECK(h.scale == 1);

  // Scalar content is split off.
  HnfDecomposition h2 = hnf_decompose(mat2q(2, 0, 0, 2));
  CHECK(h2.scale == 2);
  CHECK(h2.a == 1);
  CHECK(h2.d == 1);

  // Rational entries.
  Mat2Q m = Mat2Q{rat(1, 2), rat(0), rat(0), rat(3, 2)};
  HnfDecomposition h3 = hnf_decompose(m);
  CHECK(h3.scale == rat(1, 2));
  CHECK(h3.a == 1);
  CHECK(h3.d == 3);
  CHECK(h3.u * h3.t == m);
}

TEST_CASE("hermite decomposition rejects bad determinants") {
  CHECK_THROWS_AS(hnf_decompose(mat2q(1, 0, 0, -1)), Error);
  CHECK_THROWS_AS(hnf_decompose(mat2q(1, 2, 2, 4)), Error);
  try {
    hnf_decompose(mat2q(0, 1, 1, 0));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotPositiveDet);
  }
}

TEST_CASE("hermite decomposition round-trips (random)") {
  RandomSource rs(2024);
  for (int trial = 0; trial < 60; ++trial) {
    Mat2Q gamma = random_sl2z(rs, rs.range(0, 8));
    Mat2Q t = random_upper_triangular(rs, 5, trial % 2 == 0);
    Mat2Q m = gamma * t;
    HnfDecomposition h = hnf_decompose(m);
    CHECK(h.u * h.t == m);
    CHECK(h.u.is_unimodular());
    CHECK(h.a > 0);
    CHECK(h.d > 0);
    CHECK(h.b >= 0);
    CHECK(h.b < h.d);
    CHECK(std::gcd(std::gcd(h.a, h.b), h.d) == 1);
    CHECK(h.scale > 0);
  }
}

TEST_CASE("sl2 group orders") {
  CHECK(sl2_order(1) == 1);
  CHECK(sl2_order(2) == 6);
  CHECK(sl2_order(3) == 24);
  CHECK(sl2_order(4) == 48);
  CHECK(sl2_order(6) == 144);
  CHECK(sl2_order(12) == 1152);
  CHECK(static_cast<long>(sl2_mod(2).elements.size()) == 6);
  CHECK(static_cast<long>(sl2_mod(3).elements.size()) == 24);
}

TEST_CASE("sl2 lift is exact for all classes mod 3 and mod 4") {
  for (long N : {2L, 3L, 4L, 5L}) {
    for (const auto& g : sl2_mod(N).elements) {
      Mat2Q lifted = sl2_lift(g, N);
      CHECK(lifted.det() == 1);
      CHECK(sl2_reduce(lifted, N) == g);
    }
  }
  CHECK(sl2_lift({1 % 1, 0, 0, 1 % 1}, 1) == mat_identity());
  // Identity class lifts to the identity matrix (witness hygiene).
  CHECK(sl2_lift({1, 0, 0, 1}, 5) == mat_identity());
}

TEST_CASE("coset keys are left-invariant") {
  RandomSource rs(77);
  Mat2Q m = mat2q(1, 0, 0, 2);
  CosetKey k1 = coset_key(m, 1);
  CHECK(k1.a == 1);
  CHECK(k1.b == 0);
  CHECK(k1.d == 2);
  for (int i = 0; i < 20; ++i) {
    Mat2Q gamma = random_sl2z(rs, rs.range(1, 8));
    CHECK(coset_key(gamma * m, 1) == k1);
  }
  // At level 2 the unimodular class matters.
  CosetKey k2 = coset_key(m, 2);
  for (int i = 0; i < 20; ++i) {
    Mat2Q gamma = random_gamma(rs, 2, rs.range(1, 6));
    CHECK(coset_key(gamma * m, 2) == k2);
  }
  CHECK(coset_key(mat_S() * m, 2) != k2);
  // Representative reconstructs the same key.
  CHECK(coset_key(k2.representative(), 2) == k2);
  CHECK(coset_key(k1.representative(), 1) == k1);
}

TEST_CASE("hecke coset counts") {
  CHECK(hecke_coset_reps(1, 1).size() == 1);
  CHECK(hecke_coset_reps(2, 1).size() == 3);
  CHECK(hecke_coset_reps(4, 1).size() == 7);
  CHECK(hecke_coset_reps(6, 1).size() == 12);
  CHECK(hecke_coset_reps(12, 1).size() == 28);
  CHECK(hecke_coset_reps(2, 2).size() == 18);
  CHECK(hecke_coset_reps(3, 2).size() == 24);
  CHECK_THROWS_AS(hecke_coset_reps(12, 1, 10), Error);
  // Every returned key has the right determinant and level.
  for (const CosetKey& k : hecke_coset_reps(4, 1)) {
    CHECK(k.det() == 4);
    CHECK(k.level == 1);
  }
}

TEST_CASE("right orbit of the det-2 coset at level 1") {
  CosetKey k = coset_key(mat2q(1, 0, 0, 2), 1);
  const RightOrbit& orbit = right_orbit(k);
  CHECK(orbit.entries.size() == 3);
  // The three classical T_2 cosets.
  std::set<std::array<long, 3>> hnfs;
  for (const auto& [key, w] : orbit.entries) {
    (void)w;
    hnfs.insert({key.a, key.b, key.d});
  }
  CHECK(hnfs == std::set<std::array<long, 3>>{{1, 0, 2}, {1, 1, 2}, {2, 0, 1}});
  // Base is minimal and carries the identity witness.
  CHECK(orbit.entries[0].first == orbit.base);
  CHECK(orbit.entries[0].second == mat_identity());
  // Witnesses reproduce their keys from the base representative.
  Mat2Q base_rep = orbit.base.representative();
  for (const auto& [key, w] : orbit.entries) {
    CHECK(gamma_membership(w, 1));
    CHECK(coset_key(base_rep * w, 1) == key);
  }
}

TEST_CASE("right orbits partition the hecke cosets (level 2, det 3)") {
  auto all = hecke_coset_reps(3, 2);
  std::set<CosetKey> seen;
  std::set<CosetKey> bases;
  for (const CosetKey& k : all) {
    const RightOrbit& orbit = right_orbit(k);
    bases.insert(orbit.base);
    for (const auto& [key, w] : orbit.entries) {
      Mat2Q base_rep = orbit.base.representative();
      CHECK(gamma_membership(w, 2));
      CHECK(coset_key(base_rep * w, 2) == key);
      seen.insert(key);
    }
  }
  // The orbits cover all cosets exactly.
  CHECK(seen == std::set<CosetKey>(all.begin(), all.end()));
  // And distinct bases give disjoint orbits of total size = coset count.
  size_t total = 0;
  for (const CosetKey& b : bases) total += right_orbit(b).entries.size();
  CHECK(total == all.size());
}

TEST_CASE("orbit guard trips") {
  CosetKey k = coset_key(mat2q(1, 0, 0, 6), 2);
  CHECK_THROWS_AS(right_orbit(k, 5), Error);
  try {
    right_orbit(k, 5);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GuardExceeded);
  }
}

TEST_CASE("unimodular cosets and membership") {
  CHECK(unimodular_coset_reps(1).size() == 1);
  CHECK(unimodular_coset_reps(2).size() == 6);
  for (const Mat2Q& u : unimodular_coset_reps(2)) CHECK(u.is_unimodular());

  CHECK(gamma_membership(mat_identity(), 7));
  CHECK(gamma_membership(mat2q(1, 2, 0, 1), 2));
  CHECK(!gamma_membership(mat2q(1, 1, 0, 1), 2));
  CHECK(!gamma_membership(mat2q(1, 0, 0, 2), 1));
  CHECK(gamma_membership(mat2q(-5, 3, 3, -2), 1));
  CHECK(gamma_membership(mat2q(4, 9, 3, 7), 3));  // = I mod 3, det 28-27=1
}

TEST_CASE("gamma sampling lands in gamma (random)") {
  RandomSource rs(31337);
  for (long N : {1L, 2L, 3L, 5L}) {
    bool nontrivial = false;
    for (int i = 0; i < 25; ++i) {
      Mat2Q g = random_gamma(rs, N, rs.range(2, 8));
      CHECK(gamma_membership(g, N));
      nontrivial = nontrivial || !(g == mat_identity());
    }
    CHECK(nontrivial);
  }
}
