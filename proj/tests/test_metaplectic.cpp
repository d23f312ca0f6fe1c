#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "btq/geometry.hpp"
#include "btq/metaplectic.hpp"
#include "btq/sections.hpp"
#include "btq/toeplitz.hpp"
#include "doctest.h"

using namespace btq;

namespace {

std::mt19937 rng(20240816);

Cq random_cq() {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  return Cq(Rational(num(rng)) / den(rng), Rational(num(rng)) / den(rng));
}

FsFunction random_fn(int max_deg, int weight) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  FsFunction f;
  for (int trial = 0; trial < 4; ++trial)
    f = f + FsFunction::monomial(deg(rng), deg(rng), random_cq(), weight);
  f.canonicalize();
  return f;
}

HoloSection random_section(const BundleSpec& spec) {
  HoloSection s{spec, std::vector<Cq>(size_t(spec.dim()))};
  for (Cq& c : s.coeff) c = random_cq();
  return s;
}

// Real gauge 1-forms used across the tests: exact differentials and a
// non-closed multiple of one.
std::vector<OneForm> gauge_samples() {
  auto d_of = [](const FsFunction& f) { return OneForm{f.dz(), f.dzbar()}; };
  OneForm a1 = d_of(coord_x1());
  OneForm a2 = d_of(coord_x3() * coord_x3());
  // Non-closed: x2 d(x1) is real but not exact.
  OneForm a3{coord_x2() * coord_x1().dz(), coord_x2() * coord_x1().dzbar()};
  return {a1, a2, a3};
}

}  // namespace

TEST_CASE("half-form derivative: rotation constant and squaring consistency") {
  const VectorField x3 = hamiltonian_field(coord_x3());
  CHECK(d_delta(x3, FsFunction::constant(Cq(1))) == FsFunction::constant(Cq::i()));

  // (dz)^{1/2} squares to dz: 2 h D^delta_X h = D^K_X (h^2).
  for (int trial = 0; trial < 6; ++trial) {
    const FsFunction f = sphere_catalog()[size_t(trial % 5)].second;
    const VectorField x = hamiltonian_field(f);
    const FsFunction h = random_fn(2, 1);
    FsFunction lhs = Cq(2) * (h * d_delta(x, h));
    CHECK(lhs == d_canonical(x, CanonicalSection{h * h}).g);
  }
}

TEST_CASE("corrected derivative of basis monomials matches the closed form") {
  // P_{x3,k} z^a = i z^a ((2a+1) + (2a+1-2N) t)/(1+t) with N = k + twist.
  for (const bool half : {true, false})
    for (const int k : {3, 5})
      for (const int m : {0, 1}) {
        const BundleSpec spec = half ? half_form_spec(k, m) : plain_spec(k, m);
        const MetaDerivative d = base_derivative(m);
        const int n = k + spec.twist;
        for (int a = 0; a <= spec.d(); ++a) {
          const FsFunction za = FsFunction::monomial(a, 0, Cq(1), 0);
          FsFunction expect =
              Cq::i() * (za * (FsFunction::monomial(0, 0, Cq(2 * a + 1), 1) +
                               FsFunction::monomial(1, 1, Cq(2 * a + 1 - 2 * n), 1)));
          CHECK(apply_p(coord_x3(), spec, d, za) == expect);
        }
      }
}

TEST_CASE("corrected derivative is a derivation over functions") {
  const BundleSpec spec = half_form_spec(4, 1);
  const MetaDerivative d = gauge_shift(base_derivative(1), gauge_samples()[0]);
  for (int trial = 0; trial < 20; ++trial) {
    const FsFunction f = sphere_catalog()[size_t(trial % 5)].second;
    const FsFunction g = random_fn(2, trial % 3);
    const FsFunction v = random_fn(2, trial % 2);
    FsFunction lhs = apply_p(f, spec, d, g * v);
    FsFunction rhs = directional(hamiltonian_field(f), g) * v + g * apply_p(f, spec, d, v);
    rhs.canonicalize();
    CHECK(lhs == rhs);
  }
}

TEST_CASE("connection coefficient is function-linear in the field up to the half-form term") {
  // c(hX) = h c(X) + (1/2)(d_z h) X^1.
  const OneForm gauge = gauge_samples()[1];
  for (int trial = 0; trial < 20; ++trial) {
    const VectorField x{random_fn(2, 1), random_fn(2, 1)};
    const FsFunction h = random_fn(2, 1);
    for (const int n : {1, 5}) {
      FsFunction lhs = connection_coeff(h * x, n, gauge);
      FsFunction rhs =
          h * connection_coeff(x, n, gauge) + Cq(Rational(1) / 2) * (h.dz() * x.z);
      rhs.canonicalize();
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("corrected derivative is a metric derivation exactly on the half-form shape") {
  // p(u,v) = u conj(v) (1+t)^{-w}; the derivation identity
  // X.p(u,v) = p(Du,v) + p(u,Dv) holds iff w = k + twist - 1.
  auto residual = [](const FsFunction& f, int n, int w, const OneForm& gauge) {
    const VectorField x = hamiltonian_field(f);
    auto dd = [&](const FsFunction& u) {
      FsFunction r = directional(x, u) + connection_coeff(x, n, gauge) * u;
      r.canonicalize();
      return r;
    };
    auto pair_w = [&](const FsFunction& u, const FsFunction& v) {
      return (u * v.conj_fn()).times_one_plus_t_pow(-w);
    };
    const FsFunction u = random_fn(2, 0), v = random_fn(2, 0);
    FsFunction r =
        directional(x, pair_w(u, v)) - pair_w(dd(u), v) - pair_w(u, dd(v));
    r.canonicalize();
    return r;
  };

  for (const OneForm& gauge : gauge_samples())
    for (int trial = 0; trial < 7; ++trial) {
      const FsFunction f = sphere_catalog()[size_t(trial % 5)].second;
      const int n = 4 + trial;
      CHECK(residual(f, n, n - 1, gauge).is_zero_fn());
    }

  // The plain shape (w = k + twist) genuinely breaks the identity whenever
  // the Hamiltonian field moves t; x1 does, x3 does not.
  CHECK_FALSE(residual(coord_x1(), 5, 5, OneForm{}).is_zero_fn());
  CHECK(residual(coord_x3(), 5, 5, OneForm{}).is_zero_fn());
}

TEST_CASE("gauge shifts compose additively and validate reality") {
  const auto gs = gauge_samples();
  MetaDerivative d = base_derivative(2);
  MetaDerivative d1 = gauge_shift(gauge_shift(d, gs[0]), gs[1]);
  MetaDerivative d2 = gauge_shift(d, gs[0] + gs[1]);
  CHECK(d1.gauge.a_z == d2.gauge.a_z);
  CHECK(d1.gauge.a_zb == d2.gauge.a_zb);
  CHECK(d1.twist_m == 2);

  OneForm bad{coord_x1().dz(), FsFunction()};
  CHECK_THROWS_AS(gauge_shift(d, bad), std::invalid_argument);
  CHECK_THROWS_AS(base_derivative(-1), std::invalid_argument);
}

TEST_CASE("quantizer of the constant symbol is the identity") {
  for (const int m : {0, 2}) {
    const BundleSpec spec = half_form_spec(6, m);
    const MetaDerivative d = base_derivative(m);
    const FsFunction one = FsFunction::constant(Cq(1));
    OperatorMatrix q = q_d(one, spec, d);
    CHECK((q.entries - Mat::identity(spec.dim())).max_abs() == 0.0);
    ExactOperator ex = q_d_exact(one, spec, d);
    ExactOperator id = ExactOperator::identity_op(spec);
    bool same = true;
    for (int a = 0; a < spec.dim(); ++a)
      for (int b = 0; b < spec.dim(); ++b)
        if (!(ex.pairing(a, b) - id.pairing(a, b)).is_zero()) same = false;
    CHECK(same);
  }
}

TEST_CASE("quantizer of the height function has the exact corrected spectrum") {
  // Level m = 0: diagonal entries (k+1)(k-2a)/(k(k+2)).
  for (const int k : {3, 4, 6}) {
    ExactOperator ex = q_d_exact(coord_x3(), half_form_spec(k, 0), base_derivative(0));
    CHECK(ex.is_hermitian());
    CHECK(ex.is_diagonal());
    std::vector<Rational> diag = ex.diagonal();
    for (int a = 0; a <= k; ++a) {
      Rational expect = Rational(k + 1) * Rational(k - 2 * a) / (Rational(k) * (k + 2));
      CHECK(diag[size_t(a)] == expect);
      CHECK(diag[size_t(a)] == -diag[size_t(k - a)]);
    }
  }
}

TEST_CASE("quantizer matrices are exactly hermitian on the half-form shape only") {
  const MetaDerivative d = base_derivative(0);
  OperatorMatrix half = q_d(coord_x1(), half_form_spec(8, 0), d);
  CHECK(half.entries.hermiticity_defect() == 0.0);
  ExactOperator ex = q_d_exact(coord_x1() * coord_x2(), half_form_spec(7, 0), d);
  CHECK(ex.is_hermitian());

  OperatorMatrix plain = q_d(coord_x1(), plain_spec(8, 0), d);
  CHECK(plain.entries.hermiticity_defect() > 1e-3);
}

TEST_CASE("curvature integrates to the twist class and shifts by exact forms") {
  for (const int m : {0, 1, 2}) {
    const MetaDerivative d = base_derivative(m);
    CurvatureData cd0 = curvature(d);
    CHECK(integrate_in_2pi(cd0.R) == Cq(m + 1));

    for (const OneForm& alpha : gauge_samples()) {
      CurvatureData cd1 = curvature(gauge_shift(d, alpha));
      CHECK(integrate_in_2pi(cd1.R) == Cq(m + 1));
      CHECK(cd1.R - cd0.R == exterior_d(alpha));
    }

    // Antisymmetry: R(X,X) = 0 for any field.
    const VectorField x = hamiltonian_field(coord_x1() * coord_x2());
    CHECK(contract_iota(x, contract_iota(x, cd0.R)).is_zero_fn());

    // The operator-side form is exactly the negative on a matching spec.
    const MetaDerivative dg = gauge_shift(d, gauge_samples()[2]);
    TwoForm rop = r_op_form(half_form_spec(9, m), dg);
    CHECK(rop.mu == Cq(-1) * curvature(dg).R.mu);
  }
}

TEST_CASE("multiplier commutator identity holds exactly on both shapes") {
  const std::vector<std::pair<FsFunction, FsFunction>> pairs = {
      {coord_x1(), coord_x2()},
      {coord_x3(), coord_x1()},
      {coord_x3() * coord_x3(), coord_x2()}};
  for (const bool half : {true, false})
    for (const int k : {3, 4, 6})
      for (const int m : {0, 1}) {
        const BundleSpec spec = half ? half_form_spec(k, m) : plain_spec(k, m);
        MetaDerivative d = base_derivative(m);
        if (k == 4) d = gauge_shift(d, gauge_samples()[0]);
        for (const auto& [f, g] : pairs) {
          const HoloSection s = random_section(spec);
          CHECK(verify_commutator_identity(f, g, spec, d, s).is_zero_fn());
        }
      }
}

TEST_CASE("quantizer approaches the compression at first order") {
  const std::vector<int> ks = default_k_grid();
  OperatorFamily fq = q_family(coord_x1(), ks, base_derivative(0));
  OperatorFamily ft = toeplitz_family(coord_x1(), ks, 0, /*half_form=*/true);
  RateReport rep = fit_rate(residual_norm_table(fq, ft), FitWindow{});
  CHECK(rep.passed());
  CHECK(rep.slope < -0.85);
  CHECK(rep.r2 >= 0.98);
}

TEST_CASE("quantizer level and symbol contracts are enforced") {
  const MetaDerivative d0 = base_derivative(0);
  CHECK_THROWS_AS(q_d(coord_x1(), half_form_spec(5, 1), d0), std::invalid_argument);
  CHECK_THROWS_AS(q_d(coord_x1(), plain_spec(5, 1), d0), std::invalid_argument);
  CHECK_THROWS_AS(q_d(Cq::i() * coord_x1(), half_form_spec(5, 0), d0), std::invalid_argument);
  CHECK_THROWS_AS(q_d(FsFunction::monomial(1, 0, Cq(1), 0), half_form_spec(5, 0), d0),
                  std::invalid_argument);
  CHECK_THROWS_AS(q_family(coord_x1(), {}, d0), std::invalid_argument);
  CHECK_THROWS_AS(q_family(coord_x1(), {8, 8}, d0), std::invalid_argument);
  const HoloSection s = random_section(half_form_spec(4, 0));
  CHECK_THROWS_AS(p_fk(coord_x1(), half_form_spec(5, 0), d0, s), std::invalid_argument);
}
