#pragma once

// Symbol calculus on operator families: band-limited multiplier extraction,
// two-term symbol jets with their star product and sigma bracket, the
// subprincipal-axiom test suite, and the Kahler bidifferential operator B.

#include <functional>
#include <string>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/metaplectic.hpp"
#include "btq/toeplitz.hpp"

namespace btq {

// Two-term symbol f0 + hbar f1 of the scalar symbol algebra.
struct SymbolJet {
  FsFunction f0, f1;

  static SymbolJet identity();
  bool is_real() const { return f0.is_real() && f1.is_real(); }
  SymbolJet conj() const { return {f0.conj_fn(), f1.conj_fn()}; }

  friend SymbolJet operator+(const SymbolJet& a, const SymbolJet& b) {
    return {a.f0 + b.f0, a.f1 + b.f1};
  }
  friend SymbolJet operator-(const SymbolJet& a, const SymbolJet& b) {
    return {a.f0 - b.f0, a.f1 - b.f1};
  }
  friend SymbolJet operator*(const Cq& s, const SymbolJet& a) { return {s * a.f0, s * a.f1}; }
  friend bool operator==(const SymbolJet& a, const SymbolJet& b) {
    return a.f0 == b.f0 && a.f1 == b.f1;
  }
};

// (f0 + hbar f1) star (g0 + hbar g1) truncated at hbar^1:
// f0 g0 + hbar (f0 g1 + f1 g0 + (1/2i){f0, g0}). Associative on the nose.
SymbolJet star_jet(const SymbolJet& a, const SymbolJet& b);

// Data of the sigma bracket: the curvature form entering its hbar term.
// The scalar connection is the exterior derivative, so no descriptor beyond
// R is needed.
struct BracketConstants {
  TwoForm R;

  // Adapter between the reported positive-class curvature and the form the
  // operator identities consume; this sign flip is the single point where
  // the two orientations meet.
  static BracketConstants from_curvature(const CurvatureData& cd) {
    return BracketConstants{Cq(-1) * cd.R};
  }
};

// [a, b]_sigma = {f0,g0} + hbar (R(X_f0, X_g0) + {f0,g1} - {g0,f1}).
// Exact; satisfies the Jacobi identity and is a derivation of star_jet for
// any smooth coefficient of R.
SymbolJet bracket_sigma(const SymbolJet& a, const SymbolJet& b, const BracketConstants& c);

// Kahler bidifferential operator B(f,g) = -(1+t)^2 d_z f d_zbar g; the first
// argument is the symbol of the left factor. Its antisymmetric part is
// (1/2i){f,g}; its symmetric part is the Hochschild coboundary of half the
// Laplacian.
FsFunction b_kahler(const FsFunction& f, const FsFunction& g);

// sup |a - b| over the sphere (through the smooth-function sup); both
// arguments must canonicalize to globally smooth functions.
double fn_distance(const FsFunction& a, const FsFunction& b);
double jet_distance(const SymbolJet& a, const SymbolJet& b);

// Knobs of the extraction pipeline. `order` is the 1/k fit degree; the grid
// must carry at least order + 2 points. A per-k solve residual above the gate
// marks the family non-Toeplitz.
struct ExtractOptions {
  int band = 8;
  int order = 3;
  double per_k_gate = 1e-9;
};

// Least-squares fit of one matrix by a compression of a band-limited
// multiplier; the solve decouples into one QR per matrix offset.
struct MultiplierFit {
  FsFunction g;
  double residual = 0;  // Frobenius distance of M to the fitted compression
  double cond = 0;      // worst per-offset condition estimate
  bool ill_conditioned = false;  // cond above 1e8
};
MultiplierFit extract_multiplier(const OperatorMatrix& m, int band);

// Per-k multiplier extraction followed by a per-coefficient least-squares fit
// in 1/k; the jet keeps the constant and 1/k terms.
struct ExtractionReport {
  SymbolJet jet;
  std::vector<int> ks;
  std::vector<FsFunction> multipliers;  // fitted g_k per grid point
  std::vector<double> residuals;        // per-k solve residuals
  std::vector<double> cond_numbers;     // per-k condition estimates
  double fit_residual = 0;              // worst coefficient misfit of the 1/k model
  bool toeplitz_like = true;            // false once any per-k residual exceeds the gate
};
ExtractionReport extract_jet(const OperatorFamily& f, const ExtractOptions& opts = {});

enum class SigmaVariant { contravariant, kahler, metaplectic };

// Subprincipal symbol under the chosen convention: contravariant returns the
// raw 1/k coefficient, kahler adds half the Laplacian of f0 to it, and
// metaplectic re-extracts through the corrected quantizer of the derivative d
// (required for that variant).
SymbolJet sigma_s_variant(const OperatorFamily& f, SigmaVariant variant,
                          const MetaDerivative* d = nullptr, const ExtractOptions& opts = {});

using SigmaEvaluator = std::function<SymbolJet(const OperatorFamily&)>;
SigmaEvaluator sigma_evaluator(SigmaVariant variant, MetaDerivative d = {},
                               ExtractOptions opts = {});

// Checks the three subprincipal-symbol axioms over families built from the
// sphere catalog: (i) scaling by 1/k, (ii) adjoints, (iii) the product rule
// with the (1/2i) Poisson term.
struct AxiomsReport {
  double worst_scale = 0;
  double worst_adjoint = 0;
  double worst_product = 0;
  double tolerance = 0;
  bool passed = false;
  std::vector<std::string> lines;
};
AxiomsReport axioms_suite(const SigmaEvaluator& sigma, const std::vector<int>& ks,
                          double tol = 1e-6);

// Shifting sigma_s by V.sigma_p moves the bracket curvature by the exact form
// -d(iota_V omega); measures the bracket-identity residual before and after.
struct GaugeCompareReport {
  TwoForm shift;                // d(iota_V omega), exact
  double base_residual = 0;     // worst defect with (sigma_s, R)
  double shifted_residual = 0;  // worst defect with (sigma_s + V.sigma_p, R - shift)
  bool passed = false;
};
GaugeCompareReport gauge_compare(const VectorField& v, const MetaDerivative& d,
                                 const std::vector<int>& ks, double tol = 1e-5,
                                 const ExtractOptions& opts = {});

}  // namespace btq
