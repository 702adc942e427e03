#include "qmh/rational.hpp"

#include <mutex>
#include <vector>

namespace qmh {

Rational rat_pow(const Rational& r, long e) {
  if (e == 0) return rat(1);
  bool inv = e < 0;
  unsigned long ue = static_cast<unsigned long>(inv ? -e : e);
  Rational base = r;
  if (inv) {
    require(r != 0, Errc::InvalidArgument, "negative power of zero");
    base = Rational(r.get_den(), r.get_num());
    base.canonicalize();
  }
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), ue);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), ue);
  out.canonicalize();
  return out;
}

std::string rat_str(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational rat_parse(const std::string& s) {
  require(!s.empty(), Errc::ParseError, "empty rational literal");
  std::string num = s, den = "1";
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
    require(!num.empty() && !den.empty(), Errc::ParseError,
            "malformed rational literal '" + s + "'");
  }
  auto digits_ok = [](const std::string& t, bool sign_ok) {
    size_t i = 0;
    if (sign_ok && (t[0] == '-' || t[0] == '+')) i = 1;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  require(digits_ok(num, true) && digits_ok(den, false), Errc::ParseError,
          "malformed rational literal '" + s + "'");
  mpz_class num_z(num);
  mpz_class den_z(den);
  Rational x(num_z, den_z);
  require(x.get_den() != 0, Errc::ParseError, "zero denominator in '" + s + "'");
  x.canonicalize();
  return x;
}

namespace {
std::mutex g_bernoulli_mutex;
std::vector<Rational> g_bernoulli;  // B_0, B_1, ...

mpz_class binomial(long n, long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}
}  // namespace

Rational bernoulli(long n) {
  require(n >= 0, Errc::InvalidArgument, "bernoulli index must be >= 0");
  std::lock_guard<std::mutex> lock(g_bernoulli_mutex);
  if (g_bernoulli.empty()) g_bernoulli.push_back(rat(1));
  // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j  (yields B_1 = -1/2).
  while (static_cast<long>(g_bernoulli.size()) <= n) {
    long m = static_cast<long>(g_bernoulli.size());
    Rational acc = 0;
    for (long j = 0; j < m; ++j) acc += Rational(binomial(m + 1, j)) * g_bernoulli[j];
    g_bernoulli.push_back(-acc / Rational(m + 1));
  }
  return g_bernoulli[n];
}

}  // namespace qmh
