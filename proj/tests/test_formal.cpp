#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <vector>

#include "btq/formal.hpp"
#include "btq/fs_function.hpp"
#include "btq/geometry.hpp"
#include "doctest.h"

using namespace btq;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(20240817);
  return gen;
}

Cq random_cq() {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  return Cq(Rational(num(rng())) / den(rng()), Rational(num(rng())) / den(rng()));
}

JetPolynomial random_jet(int n, int max_deg, int max_l, int terms) {
  std::uniform_int_distribution<int> deg(0, max_deg), level(0, max_l);
  JetPolynomial j(n);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> alpha(static_cast<size_t>(n)), beta(static_cast<size_t>(n));
    int total = deg(rng());
    for (int used = 0, i = 0; i < n && used < total; ++i) {
      std::uniform_int_distribution<int> part(0, total - used);
      alpha[size_t(i)] = part(rng());
      used += alpha[size_t(i)];
    }
    total = deg(rng());
    for (int used = 0, i = 0; i < n && used < total; ++i) {
      std::uniform_int_distribution<int> part(0, total - used);
      beta[size_t(i)] = part(rng());
      used += beta[size_t(i)];
    }
    j.add_to(level(rng()), std::move(alpha), std::move(beta), random_cq());
  }
  return j;
}

// Random element of grade p: every monomial obeys |alpha| + |beta| >= p - 2l.
JetPolynomial random_graded_jet(int n, int p, int terms) {
  JetPolynomial j(n);
  std::uniform_int_distribution<int> deg(0, 3), extra(0, 1);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> alpha(size_t(n), 0), beta(size_t(n), 0);
    alpha[size_t(t % n)] = deg(rng());
    beta[size_t((t + 1) % n)] = deg(rng());
    const int total = alpha[size_t(t % n)] + beta[size_t((t + 1) % n)];
    int l = extra(rng());
    if (total < p - 2 * l) l = (p - total + 1) / 2;
    j.add_to(l, std::move(alpha), std::move(beta), random_cq());
  }
  REQUIRE(j.in_grade(p));
  return j;
}

std::vector<int> zeros(int n) { return std::vector<int>(size_t(n), 0); }

std::vector<int> unit(int n, int i, int e = 1) {
  std::vector<int> v(size_t(n), 0);
  v[size_t(i)] = e;
  return v;
}

// Frozen one-jet of a chart field at a rational point. Against the
// orthonormal chart frame the two bracket coefficients reduce to plain chart
// derivatives: the scale factors of the frame cancel in both slots.
FrozenFieldJet frozen_jet(const VectorField& x, const Cq& z0) {
  FrozenFieldJet jet;
  jet.n = 1;
  jet.hol_anti = {eval_exact(x.zb.dz(), z0)};
  jet.anti_hol = {eval_exact(x.z.dzbar(), z0)};
  return jet;
}

}  // namespace

TEST_CASE("jet polynomials: arithmetic, grading, rendering") {
  const JetPolynomial unit1 = JetPolynomial::one(1);
  CHECK(!unit1.is_zero());
  CHECK(unit1.at(0, {0}, {0}) == Cq(1));

  // Coefficients merge and exact cancellations erase the monomial.
  JetPolynomial j(2);
  j.add_to(1, {1, 0}, {0, 2}, Cq(Rational(2) / 3));
  j.add_to(1, {1, 0}, {0, 2}, Cq(Rational(1) / 3));
  CHECK(j.at(1, {1, 0}, {0, 2}) == Cq(1));
  j.add_to(1, {1, 0}, {0, 2}, Cq(-1));
  CHECK(j.is_zero());

  for (int n : {1, 2}) {
    const JetPolynomial a = random_jet(n, 3, 2, 6);
    CHECK(a.conj_swap().conj_swap() == a);
    CHECK(a - a == JetPolynomial(n));
    CHECK(Cq(2) * a == a + a);
  }

  // Derivatives: d/dz1 of z1^2 zb2 is 2 z1 zb2.
  JetPolynomial m(2);
  m.add_to(0, {2, 0}, {0, 1}, Cq(1));
  JetPolynomial dm(2);
  dm.add_to(0, {1, 0}, {0, 1}, Cq(2));
  CHECK(m.d_slot(0) == dm);
  CHECK(m.d_slot(1).is_zero());
  CHECK(m.dbar_slot(1) + (-m.dbar_slot(1)) == JetPolynomial(2));

  // Grading bound |alpha| + |beta| >= m - 2l, monomial by monomial.
  JetPolynomial g(1);
  g.add_to(1, {0}, {0}, Cq(1));  // plain hbar: grades 0, 1, 2 but not 3
  CHECK(g.in_grade(2));
  CHECK(!g.in_grade(3));
  g.add_to(0, {1}, {0}, Cq(1));  // degree-1 monomial caps the grade at 1
  CHECK(g.in_grade(1));
  CHECK(!g.in_grade(2));

  // Rendering is sorted and exact; golden string.
  JetPolynomial d(2);
  d.add_to(0, {0, 0}, {0, 0}, Cq(1));
  d.add_to(1, {2, 0}, {0, 1}, Cq(Rational(-1) / 2, Rational(3)));
  d.add_to(0, {0, 1}, {1, 0}, Cq::i());
  CHECK(d.dump() ==
        "1 : (1, 0)\n"
        "z2 zb1 : (0, 1)\n"
        "h z1^2 zb2 : (-1/2, 3)\n");

  CHECK_THROWS_AS(JetPolynomial(0), std::invalid_argument);
  CHECK_THROWS_AS(j.add_to(0, {1}, {0, 0}, Cq(1)), std::invalid_argument);
  CHECK_THROWS_AS(random_jet(1, 2, 1, 3) + random_jet(2, 2, 1, 3), std::invalid_argument);
}

TEST_CASE("star product: unit collapse and projector semantics") {
  const JetPolynomial unit1 = JetPolynomial::one(1);

  // The substitution collapses when no u/ubar pairing is possible: the left
  // unit passes holomorphic-slot jets through, the right unit passes
  // antiholomorphic-slot ones.
  JetPolynomial hol(1), anti(1);
  for (int t = 0; t < 4; ++t) {
    hol.add_to(t % 2, {t}, {0}, random_cq());
    anti.add_to(t % 2, {0}, {t}, random_cq());
  }
  CHECK(star_formal(unit1, hol) == hol);
  CHECK(star_formal(anti, unit1) == anti);
  const JetPolynomial c = JetPolynomial::constant(random_cq(), 1);
  CHECK(star_formal(unit1, c) == c);
  CHECK(star_formal(c, unit1) == c);

  // On mixed monomials the unit acts as a compression, not an identity:
  // 1 * (z zbar) contracts to -hbar.
  JetPolynomial mixed(1);
  mixed.add_to(0, {1}, {1}, Cq(1));
  JetPolynomial contracted(1);
  contracted.add_to(1, {0}, {0}, Cq(-1));
  CHECK(star_formal(unit1, mixed) == contracted);
  CHECK(star_formal(mixed, unit1) == contracted);
  // ... and the double compression of the unit itself is stable.
  CHECK(star_formal(star_formal(unit1, unit1), unit1) == unit1);
}

TEST_CASE("star product: first-order symbols pair to the frame constant") {
  for (int n : {1, 2}) {
    const FrozenFrame fr = FrozenFrame::standard(n);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<Cq> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        xs[size_t(i)] = random_cq();
        ys[size_t(i)] = random_cq();
      }
      const JetPolynomial tx = tau_symbol(fr, xs);
      const JetPolynomial ty = tau_symbol(fr, ys);
      CHECK(tx.in_grade(1));
      if (!tx.is_zero()) CHECK(!tx.in_grade(2));

      // conj_swap(tau_X) is the adjoint symbol: +i conj(X_j) z_j.
      JetPolynomial adj(n);
      for (int j = 0; j < n; ++j) adj.add_to(0, unit(n, j), zeros(n), Cq::i() * xs[size_t(j)].conj());
      CHECK(tx.conj_swap() == adj);

      // conj(tau_X) * tau_Y = hbar sum_i conj(X_i) Y_i, the frame pairing
      // i hbar omega(X^{0,1}, Y^{1,0}).
      Cq pairing(0);
      for (int i = 0; i < n; ++i) pairing += xs[size_t(i)].conj() * ys[size_t(i)];
      JetPolynomial expected(n);
      expected.add_to(1, zeros(n), zeros(n), pairing);
      CHECK(star_formal(tx.conj_swap(), ty) == expected);

      // The product lands one grade up from each factor.
      CHECK(star_formal(tx.conj_swap(), ty).in_grade(2));
    }
  }

  // Spec'd one-term case: n = 1, Y = d_z gives the single coefficient
  // omega(dbar, d) = -i on zbar.
  const JetPolynomial t1 = tau_symbol(FrozenFrame::standard(1), {Cq(1)});
  JetPolynomial lin(1);
  lin.add_to(0, {0}, {1}, -Cq::i());
  CHECK(t1 == lin);
  CHECK(tau_symbol(FrozenFrame::standard(2), {Cq(0), Cq(0)}).is_zero());
  CHECK_THROWS_AS(tau_symbol(FrozenFrame::standard(2), {Cq(1)}), std::invalid_argument);
}

TEST_CASE("star product: exact associativity and grading") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const int deg = n == 1 ? 4 : 3;
    const JetPolynomial a = random_jet(n, deg, 2, 5);
    const JetPolynomial b = random_jet(n, deg, 2, 5);
    const JetPolynomial c = random_jet(n, deg, 2, 5);
    CHECK(star_formal(star_formal(a, b), c) == star_formal(a, star_formal(b, c)));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    const int p = trial % 3, q = (trial + 1) % 4;
    const JetPolynomial a = random_graded_jet(n, p, 4);
    const JetPolynomial b = random_graded_jet(n, q, 4);
    CHECK(star_formal(a, b).in_grade(p + q));
  }
}

TEST_CASE("commutator symbols carry the frame defect through the projected product") {
  const FrozenFrame fr = FrozenFrame::standard(1);
  const VectorField x1 = hamiltonian_field(coord_x1());
  const VectorField x2 = hamiltonian_field(coord_x2());
  const VectorField xs = hamiltonian_field(coord_x3() * coord_x3());
  const VectorField xp = hamiltonian_field(coord_x1() * coord_x2());

  // Rotation fields are holomorphic, so their frozen one-jets vanish and the
  // defect pairing is the trivial exact match.
  const Cq origin(0);
  CHECK(projector_commutator_symbol(fr, frozen_jet(x1, origin)).is_zero());
  CHECK(projector_commutator_symbol(fr, frozen_jet(x2, origin)).is_zero());
  CHECK(b_j(x1, x2).is_zero_fn());
  CHECK(verify_frame_defect_product(projector_commutator_symbol(fr, frozen_jet(x1, origin)),
                                    projector_commutator_symbol(fr, frozen_jet(x2, origin)),
                                    Cq(0)));

  // The non-rotation pair has nonvanishing jets away from the pole.
  const FsFunction defect = b_j(xs, xp);
  CHECK(!defect.is_zero_fn());
  const std::vector<Cq> points = {Cq(Rational(1) / 2), Cq(Rational(1) / 3, Rational(2) / 3),
                                  Cq(Rational(-3) / 4, Rational(1) / 5)};
  for (const Cq& z0 : points) {
    const FrozenFieldJet jx = frozen_jet(xs, z0);
    const FrozenFieldJet jy = frozen_jet(xp, z0);
    const JetPolynomial sx = projector_commutator_symbol(fr, jx);
    const JetPolynomial sy = projector_commutator_symbol(fr, jy);
    CHECK(!sx.is_zero());
    CHECK(sx.in_grade(2));

    // Quadratic coefficients are half the frame pairings of the frozen jet.
    const Rational half = Rational(1) / 2;
    CHECK(sx.at(0, {2}, {0}) == Cq(-half) * Cq::i() * jx.hol_anti[0]);
    CHECK(sx.at(0, {0}, {2}) == Cq(-half) * Cq::i() * jx.anti_hol[0]);

    // Real fields give symbols that flip sign under the adjoint swap.
    CHECK(sx.conj_swap() == -sx);
    CHECK(sy.conj_swap() == -sy);

    const Cq bj = eval_exact(defect, z0);
    CHECK(!bj.is_zero());
    CHECK(verify_frame_defect_product(sx, sy, bj));
    CHECK(verify_frame_defect_product(sy, sx, -bj));
    CHECK(verify_frame_defect_product(sx, sx, Cq(0)));
    CHECK(!verify_frame_defect_product(sx, sy, bj + Cq(1)));
  }

  // Shape guards: hbar parts and mixed monomials are rejected.
  JetPolynomial bad(1);
  bad.add_to(0, {1}, {1}, Cq(1));
  CHECK_THROWS_AS(verify_frame_defect_product(bad, bad, Cq(0)), std::invalid_argument);
  JetPolynomial level(1);
  level.add_to(1, {2}, {0}, Cq(1));
  CHECK_THROWS_AS(verify_frame_defect_product(level, level, Cq(0)), std::invalid_argument);
}

TEST_CASE("frame defect product at dimension two") {
  const int n = 2;
  const FrozenFrame fr = FrozenFrame::standard(n);
  for (int trial = 0; trial < 5; ++trial) {
    // Hamiltonian one-jets are symmetric matrices in a frozen frame (both
    // blocks are second derivative tables), and only then is the elementwise
    // pairing below the defect value.
    FrozenFieldJet jx, jy;
    jx.n = jy.n = n;
    jx.hol_anti.assign(size_t(n) * n, Cq(0));
    jx.anti_hol.assign(size_t(n) * n, Cq(0));
    jy.hol_anti = jy.anti_hol = jx.hol_anti;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (auto* m : {&jx.hol_anti, &jx.anti_hol, &jy.hol_anti, &jy.anti_hol}) {
          const Cq v = random_cq();
          (*m)[size_t(i) * n + j] = v;
          (*m)[size_t(j) * n + i] = v;
        }
    const JetPolynomial sx = projector_commutator_symbol(fr, jx);
    const JetPolynomial sy = projector_commutator_symbol(fr, jy);
    CHECK(sx.in_grade(2));

    // Independent route to the defect value: the frame pairing of the raw
    // jet matrices, antisymmetrized over the two fields.
    Cq bj(0);
    for (int e = 0; e < n * n; ++e)
      bj += jx.anti_hol[size_t(e)] * jy.hol_anti[size_t(e)] -
            jy.anti_hol[size_t(e)] * jx.hol_anti[size_t(e)];
    CHECK(verify_frame_defect_product(sx, sy, bj));
  }
}
