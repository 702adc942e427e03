// Hecke operator layer: covariant support tables, the * and *^r
// convolutions, the module action with its classical normalization, the
// depth-0 embedding, and the lifted derivation calculus with its
// correction terms and commutators.

#include <utility>
#include <vector>

#include "doctest.h"
#include "qmh/error.hpp"
#include "qmh/formexpr.hpp"
#include "qmh/heckealg.hpp"
#include "qmh/lattice.hpp"
#include "qmh/quasimod.hpp"
#include "qmh/rng.hpp"

using namespace qmh;

namespace {

template <class Fn>
Errc error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return Errc::ParseError;
}

const Mat2Q kId = mat2q(1, 0, 0, 1);

QuasiModularForm one_form() { return qm_from_modular(fe_const(rat(1))); }
QuasiModularForm g4_form() { return qm_from_modular(fe_eis1(4)); }

// A determinant-2-supported operator at level 1 with quasimodular values:
// G2 on the coset of [1 0; 0 2] (extended by covariance).
TwistedHeckeOp g2_op() {
  return make_op(1, kId, {{mat2q(1, 0, 0, 2), qm_g2()}});
}

TwistedHeckeOp g4_op() {
  return make_op(1, kId, {{mat2q(1, 0, 0, 3), g4_form()}});
}

}  // namespace

TEST_CASE("hecke operators: construction and evaluation") {
  // Empty assignment: the zero operator.
  TwistedHeckeOp zero = make_op(1, kId, {});
  CHECK(zero.is_zero());
  CHECK(evaluate(zero, mat2q(1, 0, 0, 2)).is_zero());
  CHECK(evaluate(zero, kId).is_zero());

  // tn_op(1) is the unit: one coset, constant value 1.
  TwistedHeckeOp e = identity_op(1);
  CHECK(e.bases.size() == 1);
  CHECK(support_coset_count(e) == 1);
  CHECK(qm_equal(evaluate(e, kId), one_form(), frac(8)));
  CHECK(evaluate(e, mat2q(1, 0, 0, 2)).is_zero());

  // tn_op(2) at level 1: one double coset, three left cosets.
  TwistedHeckeOp t2 = tn_op(2, 1);
  CHECK(t2.bases.size() == 1);
  CHECK(support_coset_count(t2) == 3);
  CHECK(static_cast<long>(hecke_coset_reps(2, 1).size()) == 3);
  CHECK(qm_equal(evaluate(t2, mat2q(1, 1, 0, 2)), one_form(), frac(8)));
  CHECK(qm_equal(evaluate(t2, mat2q(2, 0, 0, 1)), one_form(), frac(8)));
  CHECK(evaluate(t2, mat2q(1, 0, 0, 4)).is_zero());
  CHECK(evaluate(t2, kId).is_zero());

  // tn_op(4) at level 1: two double cosets (elementary divisors (1,4) and
  // (2,2)), seven left cosets in total.
  TwistedHeckeOp t4 = tn_op(4, 1);
  CHECK(t4.bases.size() == 2);
  CHECK(support_coset_count(t4) == 7);
  CHECK(static_cast<long>(hecke_coset_reps(4, 1).size()) == 7);

  // Left invariance: evaluate(gamma alpha) = evaluate(alpha).
  RandomSource rs(101);
  for (int it = 0; it < 5; ++it) {
    Mat2Q gamma = random_sl2z(rs, 5);
    Mat2Q alpha = mat2q(1, 1, 0, 2);
    CHECK(qm_equal(evaluate(t2, gamma * alpha), evaluate(t2, alpha),
                   frac(8)));
  }

  // Round trip: rebuilding from the support table gives the same operator.
  std::vector<std::pair<Mat2Q, QuasiModularForm>> table;
  for (const auto& base : t4.bases) table.emplace_back(base.rep, base.value);
  CHECK(op_equal(make_op(1, kId, table), t4, frac(8)));

  // Errors.
  CHECK(error_code_of([&] {
          make_op(1, kId, {{mat2q(1, 0, 0, -2), one_form()}});
        }) == Errc::NotPositiveDet);
  CHECK(error_code_of([&] { make_op(1, mat2q(2, 0, 0, 1), {}); }) ==
        Errc::NotUnimodular);
  CHECK(error_code_of([&] { evaluate(zero, mat2q(0, -1, 1, 0) * mat2q(-1, 0, 0, 1)); }) ==
        Errc::NotPositiveDet);
}

TEST_CASE("hecke operators: covariance validation") {
  // A quasimodular value with constant coefficients is consistent: the
  // stabilizer acts trivially on it.
  TwistedHeckeOp g2op = g2_op();
  CHECK(g2op.bases.size() == 1);
  CHECK(qm_equal(evaluate(g2op, mat2q(1, 0, 0, 2) * mat2q(1, 1, 0, 1)),
                 qm_g2(), frac(10)));

  // Conflicting assignments on one double coset are rejected.
  CHECK(error_code_of([&] {
          make_op(1, kId,
                  {{mat2q(1, 0, 0, 2), one_form()},
                   {mat2q(1, 1, 0, 2),
                    qm_from_modular(fe_const(rat(2)))}});
        }) == Errc::CovarianceViolation);

  // A level-2 value on a level-1 coset violates the sampled stabilizer
  // consistency: some return gamma moves the level-2 atom.
  CHECK(error_code_of([&] {
          make_op(1, kId,
                  {{mat2q(1, 0, 0, 2),
                    qm_from_modular(fe_eisn(4, 1, 0, 2))}},
                  /*samples=*/200);
        }) == Errc::CovarianceViolation);

  // Consistent assignments on one double coset are merged.
  TwistedHeckeOp merged = make_op(
      1, kId, {{mat2q(1, 0, 0, 2), one_form()}, {mat2q(1, 1, 0, 2), one_form()}});
  CHECK(merged.bases.size() == 1);
  CHECK(qm_equal(evaluate(merged, mat2q(2, 0, 0, 1)), one_form(), frac(8)));

  // Twisted construction at level 2: the covariance rule conjugates the
  // return by the twist.
  Mat2Q s = mat2q(0, -1, 1, 0);
  TwistedHeckeOp tw = make_op(2, s, {{mat2q(1, 0, 0, 2), one_form()}});
  RandomSource rs(103);
  for (int it = 0; it < 4; ++it) {
    Mat2Q gamma = random_gamma(rs, 2, 4);
    Mat2Q alpha = mat2q(1, 0, 0, 2);
    CHECK(qm_equal(evaluate(tw, alpha * gamma),
                   qm_dslash(evaluate(tw, alpha), s * gamma * s.inverse()),
                   frac(8)));
  }

  // Same sampled covariance on an untwisted level-2 operator with a
  // genuinely level-2 value.
  TwistedHeckeOp l2 = make_op(
      2, kId, {{kId, qm_from_modular(fe_eisn(4, 0, 1, 2))}});
  for (int it = 0; it < 4; ++it) {
    Mat2Q gamma = random_gamma(rs, 2, 4);
    CHECK(qm_equal(evaluate(l2, gamma),
                   qm_dslash(evaluate(l2, kId), gamma), frac(8)));
  }
}

TEST_CASE("star: unit, classical multiplicativity, associativity") {
  TwistedHeckeOp e = identity_op(1);
  TwistedHeckeOp t2 = tn_op(2, 1);
  TwistedHeckeOp t3 = tn_op(3, 1);

  CHECK(op_equal(star(t2, e), t2, frac(8)));
  CHECK(op_equal(star(e, t2), t2, frac(8)));
  TwistedHeckeOp g2op = g2_op();
  CHECK(op_equal(star(g2op, e), g2op, frac(8)));
  CHECK(op_equal(star(e, g2op), g2op, frac(8)));

  // T2 * T3 = T6 (coprime Hecke multiplicativity).
  TwistedHeckeOp t6 = tn_op(6, 1);
  CHECK(op_equal(star(t2, t3), t6, frac(8)));
  CHECK(op_equal(star(t3, t2), t6, frac(8)));

  // Associativity on triples with quasimodular values.
  TwistedHeckeOp g4op = g4_op();
  CHECK(op_equal(star(star(t2, t3), g2op), star(t2, star(t3, g2op)),
                 frac(8)));
  CHECK(op_equal(star(star(t2, g2op), g4op), star(t2, star(g2op, g4op)),
                 frac(8)));

  // Depth-0 closure of the embedding.
  TwistedHeckeOp prod = star(t2, t3);
  for (const auto& base : prod.bases) CHECK(base.value.depth() == 0);

  // Errors.
  CHECK(error_code_of([&] { star(t2, tn_op(2, 2)); }) == Errc::LevelMismatch);
  Mat2Q s = mat2q(0, -1, 1, 0);
  TwistedHeckeOp tw = make_op(2, s, {{kId, one_form()}});
  CHECK(error_code_of([&] { star(tw, tn_op(2, 2)); }) == Errc::TwistMismatch);
}

TEST_CASE("embed_modular: algebra map on depth-0 values") {
  // Depth check.
  CHECK(error_code_of([&] {
          embed_modular(1, {{mat2q(1, 0, 0, 2), qm_g2()}});
        }) == Errc::DepthNotZero);

  // Classical T2, T3 through the embedding.
  std::vector<std::pair<Mat2Q, QuasiModularForm>> a2, a3;
  for (const auto& k : hecke_coset_reps(2, 1))
    a2.emplace_back(k.representative(), one_form());
  for (const auto& k : hecke_coset_reps(3, 1))
    a3.emplace_back(k.representative(), one_form());
  TwistedHeckeOp e2 = embed_modular(1, a2);
  TwistedHeckeOp e3 = embed_modular(1, a3);
  CHECK(op_equal(e2, tn_op(2, 1), frac(8)));
  CHECK(op_equal(star(e2, e3), tn_op(6, 1), frac(8)));

  // Embedded G4-valued operator: star keeps depth 0.
  TwistedHeckeOp m4 = embed_modular(1, {{mat2q(1, 0, 0, 2), g4_form()}});
  TwistedHeckeOp p = star(m4, e2);
  for (const auto& base : p.bases) CHECK(base.value.depth() == 0);
}

TEST_CASE("star_r: single-coset degeneration and associativity") {
  // At level 1 there is one unimodular coset: (F *^r G)_alpha =
  // F_1 . G_alpha.
  TwistedHeckeOp f = make_op(1, kId, {{kId, g4_form()}});
  TwistedHeckeOp t2 = tn_op(2, 1);
  TwistedHeckeOp fr = star_r(f, t2);
  for (const auto& [k, m] : support_left_cosets(t2)) {
    CHECK(qm_equal(evaluate(fr, m), qm_mul(g4_form(), evaluate(t2, m)),
                   frac(8)));
  }

  // Zero absorbing.
  CHECK(star_r(make_op(1, kId, {}), t2).is_zero());
  CHECK(star_r(t2, make_op(1, kId, {})).is_zero());

  // At level 2 the sum runs over the 6 cosets of Gamma(2)\SL2(Z):
  // associativity against the direct triple sum.
  const std::vector<Mat2Q>& reps = unimodular_coset_reps(2);
  REQUIRE(reps.size() == 6);
  RandomSource rs(107);
  std::vector<QuasiModularForm> values = {
      one_form(), g4_form(), qm_from_modular(fe_eisn(4, 0, 1, 2)), qm_g2()};
  auto random_op = [&]() {
    std::vector<std::pair<Mat2Q, QuasiModularForm>> as;
    for (const auto& r : reps)
      if (rs.coin()) as.emplace_back(r, rs.pick(values));
    return make_op(2, kId, as);
  };
  for (int it = 0; it < 2; ++it) {
    TwistedHeckeOp F = random_op();
    TwistedHeckeOp G = random_op();
    TwistedHeckeOp H = random_op();
    // Skip weight-inhomogeneous draws: convolution sums need addable
    // weights.
    bool homog = true;
    auto wt = [](const TwistedHeckeOp& op) {
      return op.is_zero() ? -1 : op.bases[0].value.weight;
    };
    for (const auto& b : F.bases) homog &= b.value.weight == wt(F);
    for (const auto& b : G.bases) homog &= b.value.weight == wt(G);
    for (const auto& b : H.bases) homog &= b.value.weight == wt(H);
    if (!homog) continue;

    TwistedHeckeOp lhs = star_r(star_r(F, G), H);
    TwistedHeckeOp rhs = star_r(F, star_r(G, H));
    CHECK(op_equal(lhs, rhs, frac(8)));

    // Direct triple sum at one probe coset.
    Mat2Q alpha = reps[3];
    QuasiModularForm direct = qm_zero(2, 0);
    for (const auto& b1 : reps) {
      for (const auto& b2 : reps) {
        QuasiModularForm f1 = evaluate(F, b2);
        QuasiModularForm f2 = evaluate(G, b1 * b2.inverse());
        QuasiModularForm f3 = evaluate(H, alpha * b1.inverse());
        if (f1.is_zero() || f2.is_zero() || f3.is_zero()) continue;
        direct = qm_add(direct, qm_mul(f1, qm_mul(qm_dslash(f2, b2),
                                                  qm_dslash(f3, b1))));
      }
    }
    if (!lhs.is_zero() || !direct.is_zero())
      CHECK(qm_equal(evaluate(lhs, alpha), direct, frac(8)));
  }
}

TEST_CASE("module action: eigenvalues and the module law") {
  TwistedHeckeOp e = identity_op(1);
  TwistedHeckeOp t2 = tn_op(2, 1);
  TwistedHeckeOp t3 = tn_op(3, 1);
  QuasiModularForm delta = qm_from_modular(fe_delta());

  // e * f = f.
  CHECK(qm_equal(act_on_form(e, delta), delta, frac(12)));
  CHECK(qm_equal(act_on_form(e, qm_g2()), qm_g2(), frac(12)));

  // Ramanujan tau eigenvalues in the classical normalization:
  // tau(2) = -24, tau(3) = 252, tau(6) = -6048.
  QuasiModularForm a2 = act_on_form(t2, delta);
  CHECK(a2.level == 1);
  CHECK(qm_equal(qm_scale(hecke_classical_scale(2, 12), a2),
                 qm_scale(rat(-24), delta), frac(14)));
  QuasiModularForm a3 = act_on_form(t3, delta);
  CHECK(qm_equal(qm_scale(hecke_classical_scale(3, 12), a3),
                 qm_scale(rat(252), delta), frac(14)));

  // Module law (F*G)*f = F*(G*f), and multiplicativity to tau(6).
  QuasiModularForm lhs = act_on_form(star(t2, t3), delta);
  QuasiModularForm rhs = act_on_form(t2, act_on_form(t3, delta));
  CHECK(qm_equal(lhs, rhs, frac(12)));
  CHECK(qm_equal(qm_scale(hecke_classical_scale(6, 12), lhs),
                 qm_scale(rat(-6048), delta), frac(12)));

  // The summed action is Gamma(1)-invariant even though its terms are not.
  RandomSource rs(109);
  for (int it = 0; it < 3; ++it) {
    Mat2Q gamma = random_sl2z(rs, 5);
    CHECK(qm_equal(qm_dslash(a2, gamma), a2, frac(10)));
  }

  // Quasimodular input: T2 * G2 = 3 G2 (constant coefficients make every
  // slash trivial, so the three cosets contribute equally).
  CHECK(qm_equal(act_on_form(t2, qm_g2()), qm_scale(rat(3), qm_g2()),
                 frac(10)));

  // Level mismatch.
  CHECK(error_code_of([&] {
          act_on_form(t2, qm_make(2, 4, {fe_eisn(4, 0, 1, 2)}));
        }) == Errc::LevelMismatch);
}

TEST_CASE("lifts: vanishing cases and pointwise application") {
  TwistedHeckeOp e = identity_op(1);
  TwistedHeckeOp t2 = tn_op(2, 1);

  // mu vanishes on SL2(Z): delta_1 kills unimodular-supported operators.
  CHECK(lift_delta(1, e).is_zero());
  TwistedHeckeOp uni2 = make_op(2, kId, {{kId, g4_form()},
                                         {mat2q(0, -1, 1, 0), g4_form()}});
  CHECK(lift_delta(1, uni2).is_zero());
  CHECK(lift_delta(2, uni2).is_zero());

  // nu vanishes on SL2(Z) as well: phi^(m) kills them too.
  CHECK(lift_phi(1, uni2).is_zero());
  CHECK(lift_phi(2, uni2).is_zero());

  // phi^(0) = 0 identically.
  CHECK(lift_phi(0, t2).is_zero());

  // Y scales by half the weight: zero on weight-0 constant values.
  CHECK(lift_Y(t2).is_zero());
  CHECK(!lift_Y(g4_op()).is_zero());

  // delta_1 of T2 multiplies by a nonzero cocycle.
  TwistedHeckeOp d1t2 = lift_delta(1, t2);
  CHECK(!d1t2.is_zero());
  QuasiModularForm at_base = evaluate(d1t2, mat2q(1, 0, 0, 2));
  CHECK(qm_equal(at_base,
                 qm_from_modular(fe_mu_expr(mat2q(1, 0, 0, 2))), frac(10)));

  // Pointwise lifts agree with the coefficient calculus at a support
  // point.
  TwistedHeckeOp g2op = g2_op();
  CHECK(qm_equal(evaluate(lift_D(g2op), mat2q(1, 0, 0, 2)),
                 op_D(evaluate(g2op, mat2q(1, 0, 0, 2))), frac(10)));
  CHECK(qm_equal(evaluate(lift_W(2, g2op), mat2q(1, 0, 0, 2)),
                 op_W(2, evaluate(g2op, mat2q(1, 0, 0, 2))), frac(10)));
  CHECK(qm_equal(evaluate(lift_X(g4_op()), mat2q(1, 0, 0, 3)),
                 op_X(evaluate(g4_op(), mat2q(1, 0, 0, 3))), frac(10)));

  CHECK(error_code_of([&] { lift_delta(0, t2); }) == Errc::InvalidArgument);
  CHECK(error_code_of([&] { lift_phi(-1, t2); }) == Errc::InvalidArgument);
}

TEST_CASE("linear structure of operators") {
  TwistedHeckeOp t2 = tn_op(2, 1);
  TwistedHeckeOp g2op = g2_op();

  TwistedHeckeOp doubled = op_add(t2, t2);
  CHECK(qm_equal(evaluate(doubled, mat2q(1, 0, 0, 2)),
                 qm_from_modular(fe_const(rat(2))), frac(8)));
  CHECK(op_equal(doubled, op_scale(rat(2), t2), frac(8)));
  CHECK(op_sub(g2op, g2op).is_zero());
  CHECK(op_equal(op_add(t2, make_op(1, kId, {})), t2, frac(8)));
  CHECK(error_code_of([&] { op_add(t2, tn_op(2, 2)); }) ==
        Errc::LevelMismatch);
}

TEST_CASE("derivation laws with correction terms on (Q(Gamma), *)") {
  // Operators with genuinely quasimodular values at level 1.
  TwistedHeckeOp F = make_op(
      1, kId, {{mat2q(1, 0, 0, 2), qm_add(qm_g2(), qm_g2())}});
  TwistedHeckeOp G = make_op(1, kId, {{mat2q(1, 0, 0, 3), qm_g2()}});
  TwistedHeckeOp t2 = tn_op(2, 1);
  Frac prec = frac(8);

  struct Pair {
    const TwistedHeckeOp *f, *g;
  };
  const Pair pairs[] = {{&F, &G}, {&F, &t2}, {&t2, &G}};
  for (const auto& [fp, gp] : pairs) {
    const TwistedHeckeOp &f = *fp, &g = *gp;
    TwistedHeckeOp fg = star(f, g);

    // D(F*G) = D(F)*G + F*D(G) - phi^(1)(F) * T_1^0(G).
    {
      TwistedHeckeOp lhs = lift_D(fg);
      TwistedHeckeOp rhs = op_sub(
          op_add(star(lift_D(f), g), star(f, lift_D(g))),
          star(lift_phi(1, f), lift_T(1, 0, g)));
      CHECK(op_equal(lhs, rhs, prec));
    }

    // T_k^l(F*G) = T_k^l(F)*G + F*T_k^l(G) + (24/5) phi^(l)(F)*T_k^0(G).
    const long tkl[][2] = {{1, 1}, {2, 1}};
    for (const auto& row : tkl) {
      long k = row[0], l = row[1];
      TwistedHeckeOp lhs = lift_T(k, l, fg);
      TwistedHeckeOp rhs = op_add(
          op_add(star(lift_T(k, l, f), g), star(f, lift_T(k, l, g))),
          op_scale(rat(24, 5),
                   star(lift_phi(l, f), lift_T(k, 0, g))));
      CAPTURE(k);
      CAPTURE(l);
      CHECK(op_equal(lhs, rhs, prec));
    }

    // X(F*G) = X(F)*G + F*X(G) + delta_1(F)*Y(G).
    {
      TwistedHeckeOp lhs = lift_X(fg);
      TwistedHeckeOp rhs = op_add(
          op_add(star(lift_X(f), g), star(f, lift_X(g))),
          star(lift_delta(1, f), lift_Y(g)));
      CHECK(op_equal(lhs, rhs, prec));
    }

    // Plain derivations for *: delta_1, W_k, phi^(m), Y.
    CHECK(op_equal(lift_delta(1, fg),
                   op_add(star(lift_delta(1, f), g), star(f, lift_delta(1, g))),
                   prec));
    for (long k = 1; k <= 2; ++k)
      CHECK(op_equal(lift_W(k, fg),
                     op_add(star(lift_W(k, f), g), star(f, lift_W(k, g))),
                     prec));
    CHECK(op_equal(lift_phi(1, fg),
                   op_add(star(lift_phi(1, f), g), star(f, lift_phi(1, g))),
                   prec));
    CHECK(op_equal(lift_Y(fg),
                   op_add(star(lift_Y(f), g), star(f, lift_Y(g))), prec));
  }
}

TEST_CASE("plain derivations on (Q^r(Gamma), *^r) at level 2") {
  const std::vector<Mat2Q>& reps = unimodular_coset_reps(2);
  TwistedHeckeOp F = make_op(
      2, kId,
      {{reps[0], qm_from_modular(fe_eisn(4, 0, 1, 2))}, {reps[2], g4_form()}});
  TwistedHeckeOp G = make_op(
      2, kId, {{reps[1], g4_form()}, {reps[4], g4_form()}});
  Frac prec = frac(8);
  TwistedHeckeOp fg = star_r(F, G);

  CHECK(op_equal(lift_D(fg),
                 op_add(star_r(lift_D(F), G), star_r(F, lift_D(G))), prec));
  CHECK(op_equal(lift_X(fg),
                 op_add(star_r(lift_X(F), G), star_r(F, lift_X(G))), prec));
  CHECK(op_equal(lift_Y(fg),
                 op_add(star_r(lift_Y(F), G), star_r(F, lift_Y(G))), prec));
  CHECK(op_equal(lift_T(2, 1, fg),
                 op_add(star_r(lift_T(2, 1, F), G), star_r(F, lift_T(2, 1, G))),
                 prec));
  CHECK(op_equal(lift_W(2, fg),
                 op_add(star_r(lift_W(2, F), G), star_r(F, lift_W(2, G))),
                 prec));
  CHECK(op_equal(lift_phi(1, fg),
                 op_add(star_r(lift_phi(1, F), G), star_r(F, lift_phi(1, G))),
                 prec));
}

TEST_CASE("commutators of lifted operators") {
  // A level-1 operator with quasimodular values on two double cosets.
  TwistedHeckeOp F = make_op(
      1, kId,
      {{mat2q(1, 0, 0, 2), qm_add(qm_from_modular(fe_eis1(4)),
                                  qm_mul(qm_g2(), qm_g2()))},
       {mat2q(1, 0, 0, 3), qm_g2()}});
  Frac prec = frac(8);

  auto commutes = [&](const TwistedHeckeOp& ab, const TwistedHeckeOp& ba) {
    return op_equal(ab, ba, prec);
  };

  // Central E: [E, D] = [E, T_k^l] = [E, phi^(m)] = 0.
  CHECK(commutes(lift_E(lift_D(F)), lift_D(lift_E(F))));
  CHECK(commutes(lift_E(lift_T(2, 1, F)), lift_T(2, 1, lift_E(F))));
  CHECK(commutes(lift_E(lift_phi(1, F)), lift_phi(1, lift_E(F))));

  // phi commutes with D, W_k and itself.
  CHECK(commutes(lift_D(lift_phi(1, F)), lift_phi(1, lift_D(F))));
  CHECK(commutes(lift_W(2, lift_phi(1, F)), lift_phi(1, lift_W(2, F))));
  CHECK(commutes(lift_phi(1, lift_phi(2, F)), lift_phi(2, lift_phi(1, F))));

  // [T_k^l, D] = (5/24)(k-1) T_(k-1)^(l+1) - (1/2)(k-3) T_(k+1)^l.
  for (long k = 1; k <= 3; ++k) {
    long l = 1;
    TwistedHeckeOp lhs =
        op_sub(lift_T(k, l, lift_D(F)), lift_D(lift_T(k, l, F)));
    TwistedHeckeOp rhs = make_op(1, kId, {});
    if (k != 1)
      rhs = op_add(rhs, op_scale(rat(5 * (k - 1), 24),
                                 lift_T(k - 1, l + 1, F)));
    if (k != 3)
      rhs = op_add(rhs, op_scale(rat(-(k - 3), 2), lift_T(k + 1, l, F)));
    CAPTURE(k);
    CHECK(op_equal(lhs, rhs, prec));
  }

  // [T_k^l, T_k'^l'] = (k' - k) T_(k+k'-2)^(l+l').
  TwistedHeckeOp lhsT = op_sub(lift_T(1, 0, lift_T(3, 1, F)),
                               lift_T(3, 1, lift_T(1, 0, F)));
  CHECK(op_equal(lhsT, op_scale(rat(2), lift_T(2, 1, F)), prec));

  // L_1 relations: [Y, X] = X, [X, delta_n] = delta_(n+1),
  // [Y, delta_n] = n delta_n, [delta_k, delta_l] = 0.
  CHECK(op_equal(op_sub(lift_Y(lift_X(F)), lift_X(lift_Y(F))), lift_X(F),
                 prec));
  for (long n = 1; n <= 2; ++n) {
    CAPTURE(n);
    CHECK(op_equal(op_sub(lift_X(lift_delta(n, F)), lift_delta(n, lift_X(F))),
                   lift_delta(n + 1, F), prec));
    CHECK(op_equal(op_sub(lift_Y(lift_delta(n, F)), lift_delta(n, lift_Y(F))),
                   op_scale(rat(n), lift_delta(n, F)), prec));
  }
  CHECK(commutes(lift_delta(1, lift_delta(2, F)),
                 lift_delta(2, lift_delta(1, F))));
}
