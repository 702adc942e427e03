#include "qmh/lattice.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

namespace qmh {
namespace {

long to_long_checked(const Rational& r) {
  require(rat_is_integer(r), Errc::InvalidArgument, "expected integer entry");
  require(r.get_num().fits_slong_p(), Errc::InvalidArgument,
          "matrix entry exceeds machine range");
  return r.get_num().get_si();
}

// x*a + y*b = g = gcd(a,b) >= 0.
std::tuple<long long, long long, long long> ext_gcd(long long a, long long b) {
  long long old_r = a, r = b;
  long long old_x = 1, x = 0;
  long long old_y = 0, y = 1;
  while (r != 0) {
    long long q = old_r / r;
    std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
    std::tie(old_x, x) = std::make_tuple(x, old_x - q * x);
    std::tie(old_y, y) = std::make_tuple(y, old_y - q * y);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_x = -old_x;
    old_y = -old_y;
  }
  return {old_r, old_x, old_y};
}

long long floor_div(long long n, long long d) {
  long long q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

}  // namespace

HnfDecomposition hnf_decompose(const Mat2Q& m) {
  Rational dt = m.det();
  require(dt > 0, Errc::NotPositiveDet,
          "hermite decomposition needs det > 0, got " + rat_str(dt) + " for " +
              m.str());

  // Strip the positive rational content: m = scale * E with E primitive
  // integral.
  mpz_class L(1);
  for (const Rational* e : {&m.a, &m.b, &m.c, &m.d})
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), e->get_den().get_mpz_t());
  Rational Lr(L);
  mpz_class g(0);
  for (const Rational* e : {&m.a, &m.b, &m.c, &m.d}) {
    Rational scaled = *e * Lr;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_num().get_mpz_t());
  }
  Rational content = Rational(g) / Lr;  // note g > 0 since m != 0
  long ea = to_long_checked(m.a / content);
  long eb = to_long_checked(m.b / content);
  long ec = to_long_checked(m.c / content);
  long ed = to_long_checked(m.d / content);

  // Reduce E to upper-triangular form by left SL2(Z) moves, accumulating
  // V = U^-1 so that V * E = H.
  long long v[4] = {1, 0, 0, 1};
  long long E[4] = {ea, eb, ec, ed};
  auto apply = [&](long long p, long long q, long long r, long long s) {
    long long nv[4] = {p * v[0] + q * v[2], p * v[1] + q * v[3],
                       r * v[0] + s * v[2], r * v[1] + s * v[3]};
    long long nE[4] = {p * E[0] + q * E[2], p * E[1] + q * E[3],
                       r * E[0] + s * E[2], r * E[1] + s * E[3]};
    std::copy(nv, nv + 4, v);
    std::copy(nE, nE + 4, E);
  };
  if (E[2] != 0) {
    auto [gg, x, y] = ext_gcd(E[0], E[2]);
    apply(x, y, -E[2] / gg, E[0] / gg);
  }
  if (E[0] < 0) apply(-1, 0, 0, -1);
  // 0 <= b < d.
  apply(1, -floor_div(E[1], E[3]), 0, 1);

  HnfDecomposition out;
  out.scale = content;
  out.a = static_cast<long>(E[0]);
  out.b = static_cast<long>(E[1]);
  out.d = static_cast<long>(E[3]);
  // U = V^-1 (det V = 1): adjugate.
  out.u = Mat2Q{rat(static_cast<long>(v[3])), rat(static_cast<long>(-v[1])),
                rat(static_cast<long>(-v[2])), rat(static_cast<long>(v[0]))};
  out.t = Mat2Q{content * rat(out.a), content * rat(out.b), rat(0),
                content * rat(out.d)};
  // Defensive exactness check; this is cheap relative to everything around it.
  require(out.u * out.t == m, Errc::InvalidArgument,
          "hermite decomposition failed to reassemble input");
  require(out.a > 0 && out.d > 0 && out.b >= 0 && out.b < out.d,
          Errc::InvalidArgument, "hermite normal form out of canonical range");
  require(std::gcd(std::gcd(out.a, out.b), out.d) == 1, Errc::InvalidArgument,
          "hermite part is not primitive");
  return out;
}

long sl2_order(long N) {
  require(N >= 1, Errc::InvalidArgument, "sl2_order needs N >= 1");
  long result = N * N * N;
  long n = N;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result = result / (p * p) * (p * p - 1);
    }
  }
  if (n > 1) result = result / (n * n) * (n * n - 1);
  return result;
}

namespace {
std::mutex g_sl2_mutex;
std::map<long, std::unique_ptr<SL2ModN>> g_sl2_cache;
}  // namespace

const SL2ModN& sl2_mod(long N) {
  require(N >= 1, Errc::InvalidArgument, "sl2_mod needs N >= 1");
  require(N <= 60, Errc::GuardExceeded,
          "sl2_mod enumeration limited to N <= 60");
  std::lock_guard<std::mutex> lock(g_sl2_mutex);
  auto it = g_sl2_cache.find(N);
  if (it != g_sl2_cache.end()) return *it->second;
  auto table = std::make_unique<SL2ModN>();
  table->N = N;
  for (long a = 0; a < N; ++a)
    for (long b = 0; b < N; ++b)
      for (long c = 0; c < N; ++c)
        for (long d = 0; d < N; ++d)
          if (mod_pos(a * d - b * c, N) == 1 % N) {
            std::array<long, 4> g{a, b, c, d};
            table->index.emplace(g, static_cast<long>(table->elements.size()));
            table->elements.push_back(g);
          }
  require(static_cast<long>(table->elements.size()) == sl2_order(N),
          Errc::InvalidArgument, "sl2_mod enumeration count mismatch");
  return *g_sl2_cache.emplace(N, std::move(table)).first->second;
}

Mat2Q sl2_lift(const std::array<long, 4>& g, long N) {
  if (N == 1) return mat_identity();
  long long abar = mod_pos(g[0], N), bbar = mod_pos(g[1], N);
  long long cbar = mod_pos(g[2], N), dbar = mod_pos(g[3], N);
  require(mod_pos(abar * dbar - bbar * cbar, N) == 1, Errc::InvalidArgument,
          "sl2_lift input has det != 1 mod N");
  // Pick (cp, dp) == (cbar, dbar) mod N with gcd(cp, dp) = 1. Existence is
  // guaranteed because gcd(cbar, dbar, N) = 1.
  long long cp = cbar, dp = dbar;
  if (cp == 0 && dp == 0) fail(Errc::InvalidArgument, "degenerate residue row");
  if (std::gcd(cp, dp) != 1) {
    if (cp == 0) cp = N;
    long k = 0;
    while (std::gcd(cp, dp) != 1) {
      ++k;
      require(k < 4 * N + 8, Errc::InvalidArgument,
              "sl2_lift row search failed");
      dp = dbar + k * N;
    }
  }
  auto [gg, x, y] = ext_gcd(dp, cp);  // x*dp + y*cp = 1
  require(gg == 1, Errc::InvalidArgument, "sl2_lift bezout failure");
  long long mval = abar * dp - bbar * cp;  // == 1 (mod N)
  long long mu = (mval - 1) / N;
  // (abar + sN) dp - (bbar + tN) cp = 1  <=>  s*dp - t*cp = -mu.
  long long s = -mu * x, t = mu * y;
  Mat2Q out = Mat2Q{rat(static_cast<long>(abar + s * N)),
                    rat(static_cast<long>(bbar + t * N)),
                    rat(static_cast<long>(cp)), rat(static_cast<long>(dp))};
  require(out.det() == 1, Errc::InvalidArgument, "sl2_lift determinant != 1");
  return out;
}

std::array<long, 4> sl2_reduce(const Mat2Q& u, long N) {
  require(u.is_unimodular(), Errc::NotUnimodular,
          "sl2_reduce expects an SL2(Z) matrix, got " + u.str());
  auto red = [&](const Rational& r) {
    mpz_class m;
    mpz_mod_ui(m.get_mpz_t(), r.get_num().get_mpz_t(),
               static_cast<unsigned long>(N));
    return m.get_si();
  };
  return {red(u.a), red(u.b), red(u.c), red(u.d)};
}

Mat2Q CosetKey::representative() const {
  Mat2Q h = Mat2Q{rat(a), rat(b), rat(0), rat(d)};
  return scale * (sl2_lift(uclass, level) * h);
}

std::string CosetKey::str() const {
  std::ostringstream os;
  os << "{";
  if (scale != 1) os << rat_str(scale) << "*";
  os << "[" << a << " " << b << "; 0 " << d << "]";
  if (level > 1)
    os << " u=(" << uclass[0] << "," << uclass[1] << "," << uclass[2] << ","
       << uclass[3] << ") mod " << level;
  os << "}";
  return os.str();
}

bool operator==(const CosetKey& x, const CosetKey& y) {
  return x.scale == y.scale && x.level == y.level && x.a == y.a && x.b == y.b &&
         x.d == y.d && x.uclass == y.uclass;
}
bool operator!=(const CosetKey& x, const CosetKey& y) { return !(x == y); }

bool operator<(const CosetKey& x, const CosetKey& y) {
  if (x.level != y.level) return x.level < y.level;
  if (int c0 = cmp(x.scale, y.scale); c0 != 0) return c0 < 0;
  if (x.a != y.a) return x.a < y.a;
  if (x.d != y.d) return x.d < y.d;
  if (x.b != y.b) return x.b < y.b;
  return x.uclass < y.uclass;
}

CosetKey coset_key(const Mat2Q& m, long level) {
  require(level >= 1, Errc::InvalidArgument, "coset_key needs level >= 1");
  HnfDecomposition h = hnf_decompose(m);
  CosetKey key;
  key.scale = h.scale;
  key.level = level;
  key.a = h.a;
  key.b = h.b;
  key.d = h.d;
  key.uclass = level == 1 ? std::array<long, 4>{0, 0, 0, 0}
                          : sl2_reduce(h.u, level);
  return key;
}

namespace {

std::mutex g_kernel_mutex;
// (N, M) -> lifted generators-free kernel enumeration: all of
// ker(SL2(Z/M) -> SL2(Z/N)) lifted to Gamma(N) subset SL2(Z).
std::map<std::pair<long, long>, std::unique_ptr<std::vector<Mat2Q>>>
    g_kernel_cache;

const std::vector<Mat2Q>& kernel_lifts(long N, long M, long guard) {
  require(M % N == 0, Errc::InvalidArgument, "kernel needs N | M");
  long size = sl2_order(M) / sl2_order(N);
  require(size <= guard, Errc::GuardExceeded,
          "orbit closure kernel has " + std::to_string(size) +
              " elements, exceeding guard " + std::to_string(guard));
  std::lock_guard<std::mutex> lock(g_kernel_mutex);
  auto it = g_kernel_cache.find({N, M});
  if (it != g_kernel_cache.end()) return *it->second;

  auto lifts = std::make_unique<std::vector<Mat2Q>>();
  long D = M / N;
  for (long xa = 0; xa < D; ++xa)
    for (long xb = 0; xb < D; ++xb)
      for (long xc = 0; xc < D; ++xc)
        for (long xd = 0; xd < D; ++xd) {
          std::array<long, 4> g{mod_pos(1 + N * xa, M), mod_pos(N * xb, M),
                                mod_pos(N * xc, M), mod_pos(1 + N * xd, M)};
          if (mod_pos(g[0] * g[3] - g[1] * g[2], M) != 1 % M) continue;
          lifts->push_back(sl2_lift(g, M));
        }
  require(static_cast<long>(lifts->size()) == size, Errc::InvalidArgument,
          "kernel enumeration count mismatch");
  return *g_kernel_cache.emplace(std::make_pair(N, M), std::move(lifts))
              .first->second;
}

std::mutex g_orbit_mutex;
std::map<CosetKey, std::shared_ptr<const RightOrbit>> g_orbit_cache;

}  // namespace

const Mat2Q* RightOrbit::witness_for(const CosetKey& k) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), k,
      [](const std::pair<CosetKey, Mat2Q>& e, const CosetKey& key) {
        return e.first < key;
      });
  if (it == entries.end() || !(it->first == k)) return nullptr;
  return &it->second;
}

const RightOrbit& right_orbit(const CosetKey& key, long guard) {
  {
    std::lock_guard<std::mutex> lock(g_orbit_mutex);
    auto it = g_orbit_cache.find(key);
    if (it != g_orbit_cache.end()) return *it->second;
  }
  long N = key.level;
  long M = N * key.a * key.d;
  const std::vector<Mat2Q>& kernel = kernel_lifts(N, M, guard);

  Mat2Q R0 = key.representative();
  std::map<CosetKey, Mat2Q> found;
  for (const Mat2Q& gamma : kernel) {
    CosetKey k = coset_key(R0 * gamma, N);
    found.emplace(k, gamma);  // first witness wins; enumeration order is fixed
  }
  auto orbit = std::make_shared<RightOrbit>();
  orbit->base = found.begin()->first;
  Mat2Q gstar_inv = found.begin()->second.inverse();
  for (const auto& [k, gamma] : found)
    orbit->entries.emplace_back(k, gstar_inv * gamma);
  // entries inherit map order; the base is minimal, hence entries[0].
  {
    std::lock_guard<std::mutex> lock(g_orbit_mutex);
    for (const auto& [k, w] : orbit->entries) {
      (void)w;
      g_orbit_cache.emplace(k, orbit);
    }
    return *g_orbit_cache.at(key);
  }
}

std::vector<CosetKey> hecke_coset_reps(long n, long level, long guard) {
  require(n >= 1, Errc::InvalidArgument, "hecke_coset_reps needs n >= 1");
  long sigma1 = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) sigma1 += d;
  long total = sigma1 * sl2_order(level);
  require(total <= guard, Errc::GuardExceeded,
          "hecke coset count " + std::to_string(total) + " exceeds guard " +
              std::to_string(guard));

  std::vector<CosetKey> keys;
  for (long s = 1; s * s <= n; ++s) {
    if (n % (s * s) != 0) continue;
    long m = n / (s * s);
    for (long a = 1; a <= m; ++a) {
      if (m % a != 0) continue;
      long d = m / a;
      for (long b = 0; b < d; ++b) {
        if (std::gcd(std::gcd(a, b), d) != 1) continue;
        for (const auto& u : sl2_mod(level).elements) {
          CosetKey key;
          key.scale = rat(s);
          key.level = level;
          key.a = a;
          key.b = b;
          key.d = d;
          key.uclass = u;
          keys.push_back(key);
        }
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end(),
                         [](const CosetKey& x, const CosetKey& y) {
                           return x == y;
                         }),
             keys.end());
  require(static_cast<long>(keys.size()) == total, Errc::InvalidArgument,
          "hecke coset enumeration count mismatch");
  return keys;
}

namespace {
std::mutex g_unimod_mutex;
std::map<long, std::unique_ptr<std::vector<Mat2Q>>> g_unimod_cache;
}  // namespace

const std::vector<Mat2Q>& unimodular_coset_reps(long N) {
  std::lock_guard<std::mutex> lock(g_unimod_mutex);
  auto it = g_unimod_cache.find(N);
  if (it != g_unimod_cache.end()) return *it->second;
  auto reps = std::make_unique<std::vector<Mat2Q>>();
  for (const auto& g : sl2_mod(N).elements) reps->push_back(sl2_lift(g, N));
  return *g_unimod_cache.emplace(N, std::move(reps)).first->second;
}

bool gamma_membership(const Mat2Q& m, long N) {
  if (!m.is_integral() || m.det() != 1) return false;
  auto congruent = [&](const Rational& v, long target) {
    mpz_class diff = v.get_num() - target;
    return mpz_divisible_ui_p(diff.get_mpz_t(),
                              static_cast<unsigned long>(N)) != 0;
  };
  return congruent(m.a, 1) && congruent(m.b, 0) && congruent(m.c, 0) &&
         congruent(m.d, 1);
}

Mat2Q random_sl2z(RandomSource& rs, long word_len) {
  static const std::vector<Mat2Q> alphabet = {
      mat_S(), mat_S().inverse(), mat_T(), mat_T().inverse()};
  Mat2Q out = mat_identity();
  for (long i = 0; i < word_len; ++i) out = out * rs.pick(alphabet);
  return out;
}

Mat2Q random_gamma(RandomSource& rs, long N, long word_len) {
  if (N == 1) return random_sl2z(rs, word_len);
  if (N == 2) {
    // Gamma(2) = <[1 2; 0 1], [1 0; 2 1]> x {+-I}.
    static const std::vector<Mat2Q> alphabet = {
        mat2q(1, 2, 0, 1),  mat2q(1, -2, 0, 1), mat2q(1, 0, 2, 1),
        mat2q(1, 0, -2, 1), mat2q(-1, 0, 0, -1)};
    Mat2Q out = mat_identity();
    for (long i = 0; i < word_len; ++i) out = out * rs.pick(alphabet);
    return out;
  }
  // General N: correct a random word back into Gamma(N).
  Mat2Q w = random_sl2z(rs, word_len);
  auto g = sl2_reduce(w, N);
  // Inverse residue class (adjugate, det = 1 mod N).
  std::array<long, 4> ginv{mod_pos(g[3], N), mod_pos(-g[1], N),
                           mod_pos(-g[2], N), mod_pos(g[0], N)};
  Mat2Q out = w * sl2_lift(ginv, N);
  require(gamma_membership(out, N), Errc::InvalidArgument,
          "random_gamma produced a matrix outside Gamma(N)");
  return out;
}

Mat2Q random_upper_triangular(RandomSource& rs, long max_entry,
                              bool rational_scale) {
  long a = rs.range(1, max_entry);
  long d = rs.range(1, max_entry);
  long b = rs.range(0, max_entry);
  Mat2Q t = mat2q(a, b, 0, d);
  if (rational_scale) {
    Rational r = rat(rs.range(1, 3), rs.range(1, 3));
    t = r * t;
  }
  return t;
}

}  // namespace qmh
