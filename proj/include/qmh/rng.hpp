#pragma once

// Deterministic, platform-independent randomness for the sampled checks.
// mt19937_64 is fully specified by the standard; the derived draws below
// avoid std::uniform_int_distribution (whose mapping is
// implementation-defined) so identical seeds give identical samples on every
// platform, which the byte-identical report requirement needs.

#include <cstdint>
#include <random>
#include <vector>

#include "qmh/error.hpp"
#include "qmh/rational.hpp"

namespace qmh {

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, bound), unbiased rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    require(bound > 0, Errc::InvalidArgument, "below(0)");
    const std::uint64_t limit = (UINT64_MAX / bound) * bound;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % bound;
  }

  // Uniform in [lo, hi] inclusive.
  long range(long lo, long hi) {
    require(lo <= hi, Errc::InvalidArgument, "range with lo > hi");
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin() { return below(2) == 1; }

  // Nonzero numerator in [-max_num, max_num], denominator in [1, max_den].
  Rational nonzero_rational(long max_num, long max_den) {
    long n = range(1, max_num);
    if (coin()) n = -n;
    return rat(n, range(1, max_den));
  }

  Rational rational(long max_num, long max_den) {
    return rat(range(-max_num, max_num), range(1, max_den));
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    require(!v.empty(), Errc::InvalidArgument, "pick from empty vector");
    return v[static_cast<size_t>(below(v.size()))];
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qmh
