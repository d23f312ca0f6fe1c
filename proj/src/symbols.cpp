#include "btq/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "btq/linalg.hpp"
#include "btq/parallel.hpp"
#include "btq/sections.hpp"

namespace btq {

namespace {

// Exact rational capture of a floating value; extraction results stay inside
// the exact function type this way.
Cq cq_from_cd(const cd& v) { return Cq(Rational(v.real()), Rational(v.imag())); }

FsFunction canon(FsFunction f) {
  f.canonicalize();
  return f;
}

}  // namespace

SymbolJet SymbolJet::identity() { return {FsFunction::constant(Cq(1)), FsFunction()}; }

SymbolJet star_jet(const SymbolJet& a, const SymbolJet& b) {
  FsFunction lead = a.f0 * b.f0;
  FsFunction sub =
      a.f0 * b.f1 + a.f1 * b.f0 + Cq(Rational(0), -Rational(1) / 2) * poisson_bracket(a.f0, b.f0);
  return {canon(std::move(lead)), canon(std::move(sub))};
}

SymbolJet bracket_sigma(const SymbolJet& a, const SymbolJet& b, const BracketConstants& c) {
  const VectorField x = hamiltonian_field(a.f0), y = hamiltonian_field(b.f0);
  FsFunction lead = poisson_bracket(a.f0, b.f0);
  FsFunction sub = contract_iota(y, contract_iota(x, c.R)) + poisson_bracket(a.f0, b.f1) -
                   poisson_bracket(b.f0, a.f1);
  return {canon(std::move(lead)), canon(std::move(sub))};
}

FsFunction b_kahler(const FsFunction& f, const FsFunction& g) {
  return canon((Cq(-1) * (f.dz() * g.dzbar())).times_one_plus_t_pow(2));
}

double fn_distance(const FsFunction& a, const FsFunction& b) {
  FsFunction d = a - b;
  d.canonicalize();
  if (d.is_zero_fn()) return 0.0;
  return sup_abs_sphere(d);
}

double jet_distance(const SymbolJet& a, const SymbolJet& b) {
  return std::max(fn_distance(a.f0, b.f0), fn_distance(a.f1, b.f1));
}

MultiplierFit extract_multiplier(const OperatorMatrix& m, int band) {
  const BundleSpec& spec = m.spec;
  const int d = spec.d(), dim = d + 1;
  if (band < 0) throw std::invalid_argument("extract_multiplier: band must be >= 0");
  if (band > d) throw std::invalid_argument("extract_multiplier: band exceeds the level");
  if (m.entries.rows() != dim || m.entries.cols() != dim)
    throw std::invalid_argument("extract_multiplier: matrix does not match its spec");

  const GramData g = gram(spec);
  const int w = d + band;  // weight of every model-term compression integral
  std::vector<double> beta(size_t(w) + 1);
  for (int j = 0; j <= w; ++j) beta[size_t(j)] = to_double(beta_integral(j, w));

  FsFunction fit;  // accumulates the solved multiplier, weight = band
  double residual2 = 0, cond = 0;
  // The compression of z^p zbar^q/(1+t)^band feeds only the offset p - q, so
  // the least-squares problem splits into one small solve per diagonal.
  for (int o = -band; o <= band; ++o) {
    const int ncols = band + 1 - std::abs(o);
    const int nrows = dim - std::abs(o);
    Mat a(nrows, ncols);
    std::vector<cd> rhs(static_cast<size_t>(nrows));
    for (int i = 0; i < nrows; ++i) {
      const int row = o >= 0 ? i + o : i;      // matrix row a
      const int col = o >= 0 ? i : i - o;      // matrix column b
      for (int j = 0; j < ncols; ++j) {
        const int p = (o >= 0 ? o : 0) + j;    // model exponent of z
        a(i, j) = cd(beta[size_t(p + col)] / (g.sqrt_n[size_t(row)] * g.sqrt_n[size_t(col)]), 0);
      }
      rhs[size_t(i)] = m.entries(row, col);
    }
    LsResult ls = lstsq(a, rhs);
    residual2 += ls.residual * ls.residual;
    cond = std::max(cond, ls.cond);
    for (int j = 0; j < ncols; ++j) {
      const int p = (o >= 0 ? o : 0) + j, q = p - o;
      if (ls.x[size_t(j)] != cd(0))
        fit = fit + FsFunction::monomial(p, q, cq_from_cd(ls.x[size_t(j)]), band);
    }
  }
  // Offsets beyond the band are outside the model class entirely.
  for (int aa = 0; aa < dim; ++aa)
    for (int bb = 0; bb < dim; ++bb)
      if (std::abs(aa - bb) > band) residual2 += std::norm(m.entries(aa, bb));

  fit.canonicalize();
  MultiplierFit out;
  out.g = std::move(fit);
  out.residual = std::sqrt(residual2);
  out.cond = cond;
  out.ill_conditioned = cond > 1e8;
  return out;
}

ExtractionReport extract_jet(const OperatorFamily& f, const ExtractOptions& opts) {
  const int nk = f.size();
  if (nk < opts.order + 2)
    throw std::invalid_argument("extract_jet: grid must carry at least order + 2 points");
  for (const OperatorMatrix& m : f.mats)
    if (m.spec.d() < opts.band)
      throw std::invalid_argument("extract_jet: band exceeds the smallest level in the family");

  ExtractionReport rep;
  rep.ks = f.ks;
  rep.multipliers.resize(size_t(nk));
  rep.residuals.resize(size_t(nk));
  rep.cond_numbers.resize(size_t(nk));
  parallel_for(nk, [&](int64_t i) {
    MultiplierFit fit = extract_multiplier(f.mats[size_t(i)], opts.band);
    rep.multipliers[size_t(i)] = std::move(fit.g);
    rep.residuals[size_t(i)] = fit.residual;
    rep.cond_numbers[size_t(i)] = fit.cond;
  });
  for (double r : rep.residuals)
    if (!(r <= opts.per_k_gate)) rep.toeplitz_like = false;

  // Fit every multiplier coefficient against 1, 1/k, ..., 1/k^order and keep
  // the first two terms of the expansion.
  Mat v(nk, opts.order + 1);
  for (int i = 0; i < nk; ++i) {
    double u = 1.0, step = 1.0 / f.ks[size_t(i)];
    for (int j = 0; j <= opts.order; ++j, u *= step) v(i, j) = cd(u, 0);
  }
  std::vector<FsFunction> weighted(static_cast<size_t>(nk));
  for (int i = 0; i < nk; ++i)
    weighted[size_t(i)] = rep.multipliers[size_t(i)].with_weight(opts.band);
  FsFunction f0, f1;
  double worst = 0;
  for (int p = 0; p <= opts.band; ++p)
    for (int q = 0; q <= opts.band; ++q) {
      std::vector<cd> y(static_cast<size_t>(nk));
      bool any = false;
      for (int i = 0; i < nk; ++i) {
        y[size_t(i)] = to_complex(weighted[size_t(i)].at(p, q));
        if (y[size_t(i)] != cd(0)) any = true;
      }
      if (!any) continue;
      LsResult ls = lstsq(v, y);
      worst = std::max(worst, ls.residual);
      if (ls.x[0] != cd(0)) f0 = f0 + FsFunction::monomial(p, q, cq_from_cd(ls.x[0]), opts.band);
      if (ls.x[1] != cd(0)) f1 = f1 + FsFunction::monomial(p, q, cq_from_cd(ls.x[1]), opts.band);
    }
  f0.canonicalize();
  f1.canonicalize();
  rep.jet = {std::move(f0), std::move(f1)};
  rep.fit_residual = worst;
  return rep;
}

SymbolJet sigma_s_variant(const OperatorFamily& f, SigmaVariant variant, const MetaDerivative* d,
                          const ExtractOptions& opts) {
  ExtractionReport rep = extract_jet(f, opts);
  switch (variant) {
    case SigmaVariant::contravariant:
      return rep.jet;
    case SigmaVariant::kahler: {
      FsFunction sub = rep.jet.f1 + Cq(Rational(1) / 2) * laplacian(rep.jet.f0);
      sub.canonicalize();
      return {rep.jet.f0, std::move(sub)};
    }
    case SigmaVariant::metaplectic:
      break;
  }
  if (d == nullptr)
    throw std::invalid_argument("sigma_s_variant: the metaplectic variant needs a derivative");
  for (const OperatorMatrix& m : f.mats)
    if (!m.spec.half_form || m.spec.twist != d->twist_m + 1)
      throw std::invalid_argument(
          "sigma_s_variant: metaplectic variant needs the matching half-form family");
  // Extraction noise sits in the imaginary direction too; the corrected
  // quantizer takes real symbols, so project the principal part exactly.
  FsFunction sp = Cq(Rational(1) / 2) * (rep.jet.f0 + rep.jet.f0.conj_fn());
  sp.canonicalize();
  OperatorFamily corrected = q_family(sp, f.ks, *d, "q_d(sigma_p)");
  ExtractionReport sub = extract_jet(k_scaled_difference(f, corrected), opts);
  return {rep.jet.f0, sub.jet.f0};
}

SigmaEvaluator sigma_evaluator(SigmaVariant variant, MetaDerivative d, ExtractOptions opts) {
  return [variant, d, opts](const OperatorFamily& f) {
    return sigma_s_variant(f, variant, variant == SigmaVariant::metaplectic ? &d : nullptr, opts);
  };
}

AxiomsReport axioms_suite(const SigmaEvaluator& sigma, const std::vector<int>& ks, double tol) {
  AxiomsReport rep;
  rep.tolerance = tol;

  const auto& catalog = sphere_catalog();
  std::vector<OperatorFamily> base;
  std::vector<SymbolJet> base_jet;
  base.reserve(catalog.size());
  for (const auto& [name, fn] : catalog)
    base.push_back(toeplitz_family(fn, ks, 0, /*half_form=*/true, "toeplitz(" + name + ")"));
  for (const OperatorFamily& fam : base) base_jet.push_back(sigma(fam));

  // (i) sigma_s((1/k) T) recovers the principal symbol of T.
  for (size_t i = 0; i < base.size(); ++i) {
    SymbolJet j = sigma(scale_by_inverse_k(base[i]));
    double dist = fn_distance(j.f1, catalog[i].second);
    rep.worst_scale = std::max(rep.worst_scale, dist);
    rep.lines.push_back("scale " + catalog[i].first + ": " + std::to_string(dist));
  }

  // (ii) and (iii) on pairwise products from the catalog.
  for (size_t i = 0; i < base.size(); ++i)
    for (size_t j = i + 1; j < base.size(); ++j) {
      const std::string tag = catalog[i].first + "*" + catalog[j].first;
      OperatorFamily prod = product_family(base[i], base[j]);
      SymbolJet jp = sigma(prod);

      SymbolJet jadj = sigma(adjoint_family(prod));
      double da = jet_distance(jadj, jp.conj());
      rep.worst_adjoint = std::max(rep.worst_adjoint, da);
      rep.lines.push_back("adjoint " + tag + ": " + std::to_string(da));

      double dp = jet_distance(jp, star_jet(base_jet[i], base_jet[j]));
      rep.worst_product = std::max(rep.worst_product, dp);
      rep.lines.push_back("product " + tag + ": " + std::to_string(dp));
    }

  rep.passed = rep.worst_scale <= tol && rep.worst_adjoint <= tol && rep.worst_product <= tol;
  return rep;
}

GaugeCompareReport gauge_compare(const VectorField& v, const MetaDerivative& d,
                                 const std::vector<int>& ks, double tol,
                                 const ExtractOptions& opts) {
  GaugeCompareReport rep;
  rep.shift = exterior_d(contract_iota(v, omega_form()));
  rep.shift.mu.canonicalize();

  const BracketConstants base_c = BracketConstants::from_curvature(curvature(d));
  BracketConstants shifted_c{base_c.R - rep.shift};
  shifted_c.R.mu.canonicalize();

  const SigmaEvaluator sigma = sigma_evaluator(SigmaVariant::metaplectic, d, opts);
  const std::vector<std::pair<FsFunction, FsFunction>> pairs = {
      {coord_x1(), coord_x2()}, {coord_x3(), coord_x1() * coord_x2()}};

  for (const auto& [f, g] : pairs) {
    OperatorFamily tf = toeplitz_family(f, ks, d.twist_m, /*half_form=*/true);
    OperatorFamily tg = toeplitz_family(g, ks, d.twist_m, /*half_form=*/true);
    OperatorFamily br = commutator_family(tf, tg);
    SymbolJet jf = sigma(tf), jg = sigma(tg), jb = sigma(br);

    // Bracket identity defect: hbar part of sigma(ik[T,S]) minus the sigma
    // bracket of the factor jets, under each choice of (sigma_s, R).
    auto defect = [&](const SymbolJet& a, const SymbolJet& b, const SymbolJet& c,
                      const BracketConstants& cc) {
      return fn_distance(c.f1, bracket_sigma(a, b, cc).f1);
    };
    rep.base_residual = std::max(rep.base_residual, defect(jf, jg, jb, base_c));

    auto shift_jet = [&](const SymbolJet& a) {
      FsFunction moved = a.f1 + directional(v, a.f0);
      moved.canonicalize();
      return SymbolJet{a.f0, std::move(moved)};
    };
    rep.shifted_residual = std::max(
        rep.shifted_residual, defect(shift_jet(jf), shift_jet(jg), shift_jet(jb), shifted_c));
  }

  rep.passed = rep.base_residual <= tol && rep.shifted_residual <= tol;
  return rep;
}

}  // namespace btq
