#pragma once

// Coset combinatorics for GL2+(Q) over the principal congruence groups
// Gamma(N): Hermite decomposition, canonical left-coset keys, right orbits
// (double cosets), Hecke coset enumeration, membership, and sampling.

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "qmh/mat2q.hpp"
#include "qmh/rng.hpp"

namespace qmh {

inline constexpr long kDefaultOrbitGuard = 20000;

// m = u * t with u in SL2(Z) and t = scale * [a b; 0 d], a,d > 0, 0 <= b < d,
// gcd(a,b,d) = 1, scale a positive rational.
struct HnfDecomposition {
  Mat2Q u;
  Mat2Q t;           // = scale * [a b; 0 d]
  Rational scale;
  long a = 1, b = 0, d = 1;
};

// Throws NotPositiveDet unless det(m) > 0.
HnfDecomposition hnf_decompose(const Mat2Q& m);

// |SL2(Z/N)| = N^3 prod_{p | N} (1 - p^-2).
long sl2_order(long N);

// Enumerated SL2(Z/N), entries packed row-major in [0,N). Index order is the
// enumeration (lexicographic) order, giving every residue class a stable
// canonical rank. Cached per N.
struct SL2ModN {
  long N;
  std::vector<std::array<long, 4>> elements;
  std::map<std::array<long, 4>, long> index;
};
const SL2ModN& sl2_mod(long N);

// Deterministic lift of g in SL2(Z/N) to SL2(Z).
Mat2Q sl2_lift(const std::array<long, 4>& g, long N);

// Reduce a unimodular matrix mod N.
std::array<long, 4> sl2_reduce(const Mat2Q& u, long N);

// Canonical key of the left coset Gamma(N) * m inside GL2+(Q):
// scale, primitive Hermite part, and the SL2(Z/N)-class of the unimodular
// factor. For N = 1 the class is trivial and the key is the classical
// Hermite normal form.
struct CosetKey {
  Rational scale;
  long level = 1;
  long a = 1, b = 0, d = 1;
  std::array<long, 4> uclass{0, 0, 0, 0};  // entries in [0, N)

  Rational det() const { return scale * scale * rat(a) * rat(d); }
  // Canonical representative: scale * lift(uclass) * [a b; 0 d].
  Mat2Q representative() const;
  std::string str() const;
};

bool operator==(const CosetKey& x, const CosetKey& y);
bool operator!=(const CosetKey& x, const CosetKey& y);
bool operator<(const CosetKey& x, const CosetKey& y);

CosetKey coset_key(const Mat2Q& m, long level);

// The right orbit of a left coset under Gamma(N): the set of left cosets
// {Gamma(N) * rep * gamma}. `witness` satisfies
// key(base_rep * witness) == entry key, with witness in Gamma(N) and
// base_rep = base.representative(). Entries are sorted by key; entries[0]
// is the base itself (identity witness).
struct RightOrbit {
  CosetKey base;
  std::vector<std::pair<CosetKey, Mat2Q>> entries;

  const Mat2Q* witness_for(const CosetKey& k) const;
};

// Computes the orbit of the coset of `key`, canonicalized to its minimal
// member. Throws GuardExceeded if the congruence kernel driving the closure
// exceeds `guard` elements. Results are cached (keyed by base).
const RightOrbit& right_orbit(const CosetKey& key, long guard = kDefaultOrbitGuard);

// All left cosets Gamma(N) \ {integral det-n matrices}: one key per coset.
// Count = sigma_1(n) * |SL2(Z/N)|. Throws GuardExceeded if that exceeds guard.
std::vector<CosetKey> hecke_coset_reps(long n, long level,
                                       long guard = kDefaultOrbitGuard);

// Coset representatives of Gamma(N) \ SL2(Z): deterministic lifts of
// sl2_mod(N) in enumeration order. Cached.
const std::vector<Mat2Q>& unimodular_coset_reps(long N);

bool gamma_membership(const Mat2Q& m, long N);

// Random element of SL2(Z) as a word in S, T, T^-1.
Mat2Q random_sl2z(RandomSource& rs, long word_len);

// Random element of Gamma(N). For N in {1, 2} uses generator words; for
// N >= 3 corrects a random SL2(Z) word back into Gamma(N) via a lift of the
// inverse residue class.
Mat2Q random_gamma(RandomSource& rs, long N, long word_len);

// Random integral upper-triangular matrix with positive determinant
// (optionally scaled by a random positive rational), used by the cocycle
// suites.
Mat2Q random_upper_triangular(RandomSource& rs, long max_entry,
                              bool rational_scale);

}  // namespace qmh
