#include "qmh/heckealg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "qmh/error.hpp"
#include "qmh/rng.hpp"

namespace qmh {
namespace {

const Frac kCovarianceProbe(10, 1);

Mat2Q conjugate_by_twist(const Mat2Q& twist, const Mat2Q& gamma) {
  return twist * gamma * twist.inverse();
}

void require_composable(const TwistedHeckeOp& F, const TwistedHeckeOp& G,
                        bool need_identity_twists) {
  require(F.level == G.level, Errc::LevelMismatch,
          "operators live at levels " + std::to_string(F.level) + " and " +
              std::to_string(G.level));
  if (need_identity_twists) {
    require(F.twist.is_identity() && G.twist.is_identity(),
            Errc::TwistMismatch,
            "convolution products are defined for twist-1 operators");
  } else {
    require(F.twist == G.twist, Errc::TwistMismatch,
            "operators carry different twists");
  }
}

// Applies fn to every base value (keyed by the base representative) and
// rebuilds the operator, re-running the sampled covariance validation.
template <class Fn>
TwistedHeckeOp lift_pointwise(const TwistedHeckeOp& F, Fn&& fn) {
  std::vector<std::pair<Mat2Q, QuasiModularForm>> assignments;
  assignments.reserve(F.bases.size());
  for (const auto& base : F.bases)
    assignments.emplace_back(base.rep, fn(base.rep, base.value));
  return make_op(F.level, F.twist, assignments);
}

// The cocycle multiplier X^(n-1)(mu_(alpha sigma^-1)) as an expression.
FormExpr delta_multiplier(const Mat2Q& alpha, const Mat2Q& twist, long n) {
  FormExpr e = fe_mu_expr(alpha * twist.inverse());
  for (long j = 1; j < n; ++j) e = fe_serre_x(e);
  return e;
}

}  // namespace

TwistedHeckeOp make_op(
    long level, const Mat2Q& twist,
    const std::vector<std::pair<Mat2Q, QuasiModularForm>>& assignments,
    int samples, unsigned long long seed, long guard) {
  require(level >= 1, Errc::InvalidArgument, "level must be >= 1");
  require(twist.is_unimodular(), Errc::NotUnimodular,
          "twist must be an integral determinant-1 matrix");

  TwistedHeckeOp op;
  op.level = level;
  op.twist = twist;

  std::map<CosetKey, size_t> base_index;
  for (const auto& [m, v] : assignments) {
    require(m.det() > 0, Errc::NotPositiveDet,
            "assignment matrix must have positive determinant");
    CosetKey km = coset_key(m, level);
    const RightOrbit& orbit = right_orbit(km, guard);
    const Mat2Q* w = orbit.witness_for(km);
    require(w != nullptr, Errc::InvalidArgument,
            "internal error: orbit lost its own base");
    // F at the coset of m determines F at the canonical base:
    // F_base = v || (sigma w sigma^-1)^-1.
    QuasiModularForm at_base =
        qm_dslash(v, conjugate_by_twist(twist, w->inverse()));
    auto it = base_index.find(orbit.base);
    if (it != base_index.end()) {
      require(qm_equal(op.bases[it->second].value, at_base, kCovarianceProbe),
              Errc::CovarianceViolation,
              "assignments on one double coset transport to different values");
      continue;
    }
    base_index.emplace(orbit.base, op.bases.size());
    op.bases.push_back(
        {orbit.base, orbit.base.representative(), std::move(at_base)});
  }
  // Zero values participate in the consistency check above but carry no
  // support.
  std::erase_if(op.bases,
                [](const HeckeSupportEntry& e) { return e.value.is_zero(); });

  // Sampled well-definedness: returning to a known coset along a random
  // gamma must reproduce the transported value.
  RandomSource rs(seed);
  for (const auto& base : op.bases) {
    const RightOrbit& orbit = right_orbit(base.key, guard);
    for (int s = 0; s < samples; ++s) {
      Mat2Q gamma = random_gamma(rs, level, 4);
      CosetKey k = coset_key(base.rep * gamma, level);
      const Mat2Q* w = orbit.witness_for(k);
      require(w != nullptr, Errc::InvalidArgument,
              "internal error: orbit not closed under its own group");
      bool ok = qm_equal(qm_dslash(base.value, conjugate_by_twist(twist, gamma)),
                         qm_dslash(base.value, conjugate_by_twist(twist, *w)),
                         kCovarianceProbe);
      require(ok, Errc::CovarianceViolation,
              "value at " + base.key.str() +
                  " is inconsistent along gamma = " + gamma.str());
    }
  }
  return op;
}

QuasiModularForm evaluate(const TwistedHeckeOp& F, const Mat2Q& alpha) {
  require(alpha.det() > 0, Errc::NotPositiveDet,
          "evaluation requires positive determinant");
  CosetKey k = coset_key(alpha, F.level);
  for (const auto& base : F.bases) {
    if (base.key.det() != k.det()) continue;
    const RightOrbit& orbit = right_orbit(base.key);
    if (const Mat2Q* w = orbit.witness_for(k))
      return qm_dslash(base.value, conjugate_by_twist(F.twist, *w));
  }
  return qm_zero(F.level, 0);
}

std::vector<std::pair<CosetKey, Mat2Q>> support_left_cosets(
    const TwistedHeckeOp& F) {
  std::vector<std::pair<CosetKey, Mat2Q>> out;
  for (const auto& base : F.bases) {
    const RightOrbit& orbit = right_orbit(base.key);
    for (const auto& [k, w] : orbit.entries) out.emplace_back(k, base.rep * w);
  }
  return out;
}

long support_coset_count(const TwistedHeckeOp& F) {
  long n = 0;
  for (const auto& base : F.bases)
    n += static_cast<long>(right_orbit(base.key).entries.size());
  return n;
}

namespace {

// Shared candidate-sweep for the two convolutions: the support of F*G is
// contained in {supp(G) * beta}, and each candidate value is computed
// directly from the defining sum. `betas` enumerates the convolution
// range (full support of F for *, unimodular cosets for *^r).
TwistedHeckeOp convolve(const TwistedHeckeOp& F, const TwistedHeckeOp& G,
                        const std::vector<Mat2Q>& betas) {
  std::vector<std::pair<Mat2Q, QuasiModularForm>> fvals;
  for (const auto& b : betas) {
    QuasiModularForm fb = evaluate(F, b);
    if (!fb.is_zero()) fvals.emplace_back(b, std::move(fb));
  }
  std::vector<std::pair<CosetKey, Mat2Q>> glefts = support_left_cosets(G);

  std::vector<std::pair<Mat2Q, QuasiModularForm>> assignments;
  std::set<CosetKey> seen;
  for (const auto& [beta, fbeta] : fvals) {
    for (const auto& [gk, g] : glefts) {
      Mat2Q alpha = g * beta;
      if (!seen.insert(coset_key(alpha, F.level)).second) continue;
      QuasiModularForm value = qm_zero(F.level, 0);
      for (const auto& [b, fb] : fvals) {
        QuasiModularForm gb = evaluate(G, alpha * b.inverse());
        if (gb.is_zero()) continue;
        value = qm_add(value, qm_mul(fb, qm_dslash(gb, b)));
      }
      if (!value.is_zero()) assignments.emplace_back(alpha, value);
    }
  }
  return make_op(F.level, F.twist, assignments);
}

}  // namespace

TwistedHeckeOp star(const TwistedHeckeOp& F, const TwistedHeckeOp& G) {
  require_composable(F, G, /*need_identity_twists=*/true);
  std::vector<Mat2Q> betas;
  for (const auto& [k, m] : support_left_cosets(F)) betas.push_back(m);
  return convolve(F, G, betas);
}

TwistedHeckeOp star_r(const TwistedHeckeOp& F, const TwistedHeckeOp& G) {
  require_composable(F, G, /*need_identity_twists=*/true);
  return convolve(F, G, unimodular_coset_reps(F.level));
}

QuasiModularForm act_on_form(const TwistedHeckeOp& F,
                             const QuasiModularForm& f) {
  require(F.twist.is_identity(), Errc::TwistMismatch,
          "the module action is defined for twist-1 operators");
  require(f.level >= 1 && F.level % f.level == 0, Errc::LevelMismatch,
          "form level " + std::to_string(f.level) +
              " does not divide operator level " + std::to_string(F.level));
  QuasiModularForm out = qm_zero(F.level, f.weight);
  for (const auto& [k, beta] : support_left_cosets(F))
    out = qm_add(out, qm_mul(evaluate(F, beta), qm_dslash(f, beta)));
  // The convolution sum is Gamma(N)-invariant even though its terms are
  // not; rebrand the level accordingly.
  return qm_make(F.level, out.weight, out.coeffs);
}

Rational hecke_classical_scale(long n, long weight) {
  require(n >= 1, Errc::InvalidArgument, "index must be >= 1");
  require(weight % 2 == 0, Errc::OddWeight,
          "classical normalization defined for even weight");
  return rat_pow(rat(n), weight / 2 - 1);
}

TwistedHeckeOp embed_modular(
    long level,
    const std::vector<std::pair<Mat2Q, QuasiModularForm>>& assignments) {
  for (const auto& [m, v] : assignments)
    require(v.depth() == 0, Errc::DepthNotZero,
            "embedding requires depth-0 (modular) values");
  return make_op(level, mat2q(1, 0, 0, 1), assignments);
}

TwistedHeckeOp tn_op(long n, long level, long guard) {
  require(n >= 1, Errc::InvalidArgument, "index must be >= 1");
  QuasiModularForm one = qm_from_modular(fe_const(rat(1)));
  std::vector<std::pair<Mat2Q, QuasiModularForm>> assignments;
  for (const auto& k : hecke_coset_reps(n, level, guard))
    assignments.emplace_back(k.representative(), one);
  return make_op(level, mat2q(1, 0, 0, 1), assignments);
}

TwistedHeckeOp identity_op(long level) { return tn_op(1, level); }

TwistedHeckeOp op_add(const TwistedHeckeOp& F, const TwistedHeckeOp& G) {
  require_composable(F, G, /*need_identity_twists=*/false);
  std::map<CosetKey, std::pair<Mat2Q, QuasiModularForm>> merged;
  for (const auto& base : F.bases)
    merged.emplace(base.key, std::make_pair(base.rep, base.value));
  for (const auto& base : G.bases) {
    auto it = merged.find(base.key);
    if (it == merged.end())
      merged.emplace(base.key, std::make_pair(base.rep, base.value));
    else
      it->second.second = qm_add(it->second.second, base.value);
  }
  std::vector<std::pair<Mat2Q, QuasiModularForm>> assignments;
  for (const auto& [k, pv] : merged) assignments.emplace_back(pv.first, pv.second);
  return make_op(F.level, F.twist, assignments);
}

TwistedHeckeOp op_scale(const Rational& c, const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [&](const Mat2Q&, const QuasiModularForm& v) { return qm_scale(c, v); });
}

TwistedHeckeOp op_sub(const TwistedHeckeOp& F, const TwistedHeckeOp& G) {
  return op_add(F, op_scale(rat(-1), G));
}

bool op_equal(const TwistedHeckeOp& F, const TwistedHeckeOp& G, Frac prec) {
  if (F.level != G.level || !(F.twist == G.twist)) return false;
  for (const auto& base : F.bases)
    if (!qm_equal(base.value, evaluate(G, base.rep), prec)) return false;
  for (const auto& base : G.bases)
    if (!qm_equal(base.value, evaluate(F, base.rep), prec)) return false;
  return true;
}

TwistedHeckeOp lift_D(const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [](const Mat2Q&, const QuasiModularForm& v) { return op_D(v); });
}

TwistedHeckeOp lift_W(long k, const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [&](const Mat2Q&, const QuasiModularForm& v) { return op_W(k, v); });
}

TwistedHeckeOp lift_E(const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [](const Mat2Q&, const QuasiModularForm& v) { return op_E(v); });
}

TwistedHeckeOp lift_T(long k, long l, const TwistedHeckeOp& F) {
  return lift_pointwise(F, [&](const Mat2Q&, const QuasiModularForm& v) {
    return op_T(k, l, v);
  });
}

TwistedHeckeOp lift_phi(long m, const TwistedHeckeOp& F) {
  require(m >= 0, Errc::InvalidArgument, "phi^(m) requires m >= 0");
  return lift_pointwise(F, [&](const Mat2Q& rep, const QuasiModularForm& v) {
    FormExpr nu = fe_nu_expr(rep * F.twist.inverse(), m);
    return qm_mul(qm_from_modular(nu), v);
  });
}

TwistedHeckeOp lift_X(const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [](const Mat2Q&, const QuasiModularForm& v) { return op_X(v); });
}

TwistedHeckeOp lift_Y(const TwistedHeckeOp& F) {
  return lift_pointwise(
      F, [](const Mat2Q&, const QuasiModularForm& v) { return op_Y(v); });
}

TwistedHeckeOp lift_delta(long n, const TwistedHeckeOp& F) {
  require(n >= 1, Errc::InvalidArgument, "delta_n requires n >= 1");
  return lift_pointwise(F, [&](const Mat2Q& rep, const QuasiModularForm& v) {
    return qm_mul(qm_from_modular(delta_multiplier(rep, F.twist, n)), v);
  });
}

std::string op_to_string(const TwistedHeckeOp& F) {
  std::ostringstream os;
  os << "HeckeOp[level=" << F.level << ", twist=" << F.twist.str()
     << ", bases=" << F.bases.size()
     << ", cosets=" << support_coset_count(F) << "]";
  for (const auto& base : F.bases)
    os << "\n  " << base.key.str() << " -> " << qm_to_string(base.value);
  return os.str();
}

}  // namespace qmh
