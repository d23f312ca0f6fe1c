#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "btq/geometry.hpp"
#include "btq/metaplectic.hpp"
#include "btq/symbols.hpp"
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

SymbolJet random_jet() { return {random_fn(2, 2), random_fn(2, 2)}; }

const ExtractOptions kTight{8, 7, 1e-9};

}  // namespace

TEST_CASE("star product: identity, commutator, exact associativity") {
  for (int trial = 0; trial < 10; ++trial) {
    SymbolJet a = random_jet(), b = random_jet(), c = random_jet();
    CHECK(star_jet(SymbolJet::identity(), a) == a);
    CHECK(star_jet(a, SymbolJet::identity()) == a);
    CHECK(star_jet(star_jet(a, b), c) == star_jet(a, star_jet(b, c)));

    SymbolJet f{random_fn(2, 2), FsFunction()}, g{random_fn(2, 2), FsFunction()};
    SymbolJet comm = star_jet(f, g) - star_jet(g, f);
    CHECK(comm.f0.is_zero_fn());
    FsFunction expect = Cq(Rational(0), -Rational(1)) * poisson_bracket(f.f0, g.f0);
    expect.canonicalize();
    CHECK(comm.f1 == expect);
  }
}

TEST_CASE("sigma bracket: alternating, Jacobi, derivation, reality") {
  for (int trial = 0; trial < 8; ++trial) {
    // Random real density rho makes R = rho omega; everything stays exact.
    FsFunction rho_half = random_fn(2, 2);
    FsFunction rho = rho_half + rho_half.conj_fn();
    BracketConstants c{omega_multiple(rho)};

    SymbolJet a = random_jet(), b = random_jet(), h = random_jet();
    SymbolJet zero = bracket_sigma(a, a, c);
    CHECK(zero.f0.is_zero_fn());
    CHECK(zero.f1.is_zero_fn());

    SymbolJet jac = bracket_sigma(a, bracket_sigma(b, h, c), c) +
                    bracket_sigma(b, bracket_sigma(h, a, c), c) +
                    bracket_sigma(h, bracket_sigma(a, b, c), c);
    CHECK(jac.f0.is_zero_fn());
    CHECK(jac.f1.is_zero_fn());

    SymbolJet der = bracket_sigma(star_jet(a, b), h, c) -
                    (star_jet(a, bracket_sigma(b, h, c)) + star_jet(bracket_sigma(a, h, c), b));
    CHECK(der.f0.is_zero_fn());
    CHECK(der.f1.is_zero_fn());

    SymbolJet lhs = bracket_sigma(a.conj(), b.conj(), c);
    CHECK(lhs == bracket_sigma(a, b, c).conj());
  }
}

TEST_CASE("Kahler bidifferential operator: parts and the height-function value") {
  // B(x3, x3) = -4 t/(1+t)^2 in the chart.
  CHECK(b_kahler(coord_x3(), coord_x3()) == FsFunction::monomial(1, 1, Cq(-4), 2));

  // Holomorphic right factor kills it.
  FsFunction holo = FsFunction::monomial(2, 0, Cq(3), 0) + FsFunction::constant(Cq(1));
  CHECK(b_kahler(coord_x1(), holo).is_zero_fn());

  const auto& cat = sphere_catalog();
  for (size_t i = 0; i < cat.size(); ++i)
    for (size_t j = 0; j < cat.size(); ++j) {
      const FsFunction &f = cat[i].second, &g = cat[j].second;
      // Antisymmetric part is (1/2i){f,g} twice over.
      FsFunction anti = b_kahler(f, g) - b_kahler(g, f);
      FsFunction expect = Cq(Rational(0), -Rational(1)) * poisson_bracket(f, g);
      expect.canonicalize();
      CHECK(anti == expect);

      // Symmetric part is the Hochschild coboundary of Q = (1/2) Laplacian.
      auto q_op = [](const FsFunction& u) { return Cq(Rational(1) / 2) * laplacian(u); };
      FsFunction sym = Cq(Rational(1) / 2) * (b_kahler(f, g) + b_kahler(g, f));
      FsFunction cob = f * q_op(g) + q_op(f) * g - q_op(f * g);
      cob.canonicalize();
      CHECK(sym == cob);
    }
}

TEST_CASE("multiplier extraction recovers band-limited symbols") {
  for (const auto& [name, fn] : sphere_catalog()) {
    OperatorMatrix m = toeplitz(fn, half_form_spec(12, 0));
    MultiplierFit fit = extract_multiplier(m, 4);
    CHECK(fit.residual < 1e-12);
    CHECK_FALSE(fit.ill_conditioned);
    CHECK(fn_distance(fit.g, fn) < 1e-10);
  }

  OperatorMatrix one = toeplitz(FsFunction::constant(Cq(1)), plain_spec(9, 0));
  MultiplierFit fit = extract_multiplier(one, 3);
  CHECK(fn_distance(fit.g, FsFunction::constant(Cq(1))) < 1e-12);

  // The corrected quantizer of x3 is exactly the compression of (1+1/k) x3.
  const int k = 10;
  OperatorMatrix q = q_d(coord_x3(), half_form_spec(k, 0), base_derivative(0));
  MultiplierFit qfit = extract_multiplier(q, 2);
  CHECK(qfit.residual < 1e-12);
  FsFunction expect = Cq(Rational(k + 1) / k) * coord_x3();
  expect.canonicalize();
  CHECK(fn_distance(qfit.g, expect) < 1e-12);

  CHECK_THROWS_AS(extract_multiplier(toeplitz(coord_x3(), plain_spec(3, 0)), 5),
                  std::invalid_argument);
}

TEST_CASE("jet extraction: compressions, scalings, the corrected quantizer") {
  const std::vector<int> ks = default_k_grid();
  for (const auto& [name, fn] : sphere_catalog()) {
    OperatorFamily fam = toeplitz_family(fn, ks, 0, /*half_form=*/true);
    ExtractionReport rep = extract_jet(fam, kTight);
    CHECK(rep.toeplitz_like);
    CHECK(fn_distance(rep.jet.f0, fn) < 1e-8);
    CHECK(fn_distance(rep.jet.f1, FsFunction()) < 1e-8);

    // (1/k) T has jet (0, f); (1/k^2) T extracts to the zero jet.
    ExtractionReport scaled = extract_jet(scale_by_inverse_k(fam), kTight);
    CHECK(fn_distance(scaled.jet.f0, FsFunction()) < 1e-8);
    CHECK(fn_distance(scaled.jet.f1, fn) < 1e-8);
    ExtractionReport tiny = extract_jet(scale_by_inverse_k(scale_by_inverse_k(fam)), kTight);
    CHECK(fn_distance(tiny.jet.f0, FsFunction()) < 1e-6);
    CHECK(fn_distance(tiny.jet.f1, FsFunction()) < 1e-6);
  }

  // q_d(x3) has multiplier (1 + 1/k) x3, hence jet (x3, x3).
  OperatorFamily qf = q_family(coord_x3(), ks, base_derivative(0));
  ExtractionReport qrep = extract_jet(qf, kTight);
  CHECK(qrep.toeplitz_like);
  CHECK(fn_distance(qrep.jet.f0, coord_x3()) < 1e-8);
  CHECK(fn_distance(qrep.jet.f1, coord_x3()) < 1e-8);

  // A far off-band perturbation breaks the Toeplitz model and is flagged.
  OperatorFamily broken = toeplitz_family(coord_x1(), ks, 0, true);
  for (OperatorMatrix& m : broken.mats) m.entries(m.spec.d(), 0) += cd(1e-3, 0);
  ExtractionReport brep = extract_jet(broken, kTight);
  CHECK_FALSE(brep.toeplitz_like);

  CHECK_THROWS_AS(extract_jet(toeplitz_family(coord_x1(), {8, 12, 16, 24}, 0, true), kTight),
                  std::invalid_argument);
}

TEST_CASE("subprincipal variants have the predicted closed-form values") {
  const std::vector<int> ks = default_k_grid();
  OperatorFamily t3 = toeplitz_family(coord_x3(), ks, 0, /*half_form=*/true);

  // Kahler: (x3, (1/2) Lap x3) = (x3, -x3).
  SymbolJet kj = sigma_s_variant(t3, SigmaVariant::kahler, nullptr, kTight);
  FsFunction minus_x3 = Cq(-1) * coord_x3();
  CHECK(fn_distance(kj.f0, coord_x3()) < 1e-8);
  CHECK(fn_distance(kj.f1, minus_x3) < 1e-8);

  // Metaplectic: sigma_p(k(T(x3) - q_d(x3))) = -x3 as well.
  const MetaDerivative d = base_derivative(0);
  SymbolJet mj = sigma_s_variant(t3, SigmaVariant::metaplectic, &d, kTight);
  CHECK(fn_distance(mj.f0, coord_x3()) < 1e-8);
  CHECK(fn_distance(mj.f1, minus_x3) < 1e-7);

  // The two conventions agree on a product family.
  OperatorFamily prod =
      product_family(t3, toeplitz_family(coord_x1(), ks, 0, /*half_form=*/true));
  SymbolJet pk = sigma_s_variant(prod, SigmaVariant::kahler, nullptr, kTight);
  SymbolJet pm = sigma_s_variant(prod, SigmaVariant::metaplectic, &d, kTight);
  CHECK(jet_distance(pk, pm) < 1e-6);

  // Product rule against the Kahler bidifferential operator.
  OperatorFamily t1 = toeplitz_family(coord_x1(), ks, 0, /*half_form=*/true);
  SymbolJet pc = sigma_s_variant(product_family(t1, t3), SigmaVariant::contravariant, nullptr,
                                 kTight);
  CHECK(fn_distance(pc.f0, coord_x1() * coord_x3()) < 1e-8);
  CHECK(fn_distance(pc.f1, b_kahler(coord_x1(), coord_x3())) < 1e-7);

  CHECK_THROWS_AS(sigma_s_variant(t3, SigmaVariant::metaplectic, nullptr, kTight),
                  std::invalid_argument);
  OperatorFamily plain = toeplitz_family(coord_x3(), ks, 0, /*half_form=*/false);
  CHECK_THROWS_AS(sigma_s_variant(plain, SigmaVariant::metaplectic, &d, kTight),
                  std::invalid_argument);
}

TEST_CASE("subprincipal axioms hold for the Kahler evaluator") {
  AxiomsReport rep = axioms_suite(sigma_evaluator(SigmaVariant::kahler, {}, kTight),
                                  default_k_grid(), 1e-6);
  CHECK(rep.passed);
  CHECK(rep.worst_scale <= 1e-6);
  CHECK(rep.worst_adjoint <= 1e-6);
  CHECK(rep.worst_product <= 1e-6);
  CHECK(rep.lines.size() == 5 + 2 * 10);
}

TEST_CASE("gauge shifts of sigma_s move the bracket curvature by an exact form") {
  const VectorField v = coord_x1() * hamiltonian_field(coord_x3());
  GaugeCompareReport rep =
      gauge_compare(v, base_derivative(0), default_k_grid(), 1e-5, kTight);
  CHECK(rep.passed);
  CHECK(rep.base_residual <= 1e-5);
  CHECK(rep.shifted_residual <= 1e-5);

  // Finite-difference oracle for the mu coefficient of d(iota_V omega).
  OneForm iv = contract_iota(v, omega_form());
  FsFunctionD az = to_numeric(iv.a_z), azb = to_numeric(iv.a_zb);
  const double h = 1e-5;
  for (cd z : {cd(0.3, 0.1), cd(-0.7, 0.4), cd(0.05, -0.9)}) {
    cd dz_azb = (azb.eval(z + cd(h, 0)) - azb.eval(z - cd(h, 0))) / cd(2 * h, 0);
    cd dzb_az_re = (az.eval(z + cd(h, 0)) - az.eval(z - cd(h, 0))) / cd(2 * h, 0);
    cd dz_azb_im = (azb.eval(z + cd(0, h)) - azb.eval(z - cd(0, h))) / cd(0, 2 * h);
    cd dzb_az_im = (az.eval(z + cd(0, h)) - az.eval(z - cd(0, h))) / cd(0, 2 * h);
    // d/dz = (d_x - i d_y)/2 on functions of (z, zbar) sampled over C.
    cd ddz_azb = (dz_azb + dz_azb_im) / cd(2, 0);
    cd ddzb_az = (dzb_az_re - dzb_az_im) / cd(2, 0);
    cd expect = ddz_azb - ddzb_az;
    CHECK(std::abs(to_numeric(rep.shift.mu).eval(z) - expect) < 1e-6);
  }

  // V = 0 leaves everything in place.
  GaugeCompareReport zero = gauge_compare(VectorField{}, base_derivative(0),
                                          default_k_grid(), 1e-5, kTight);
  CHECK(zero.shift.mu.is_zero_fn());
  CHECK(zero.passed);
  CHECK(zero.base_residual == zero.shifted_residual);
}

TEST_CASE("subprincipal axioms hold for the metaplectic evaluator") {
  AxiomsReport rep =
      axioms_suite(sigma_evaluator(SigmaVariant::metaplectic, base_derivative(0), kTight),
                   default_k_grid(), 1e-6);
  CHECK(rep.passed);
}
