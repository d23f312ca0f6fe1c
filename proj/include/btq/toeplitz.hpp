#pragma once

// Toeplitz operator engine: compressions of multiplication operators to the
// level-d holomorphic sections, as dense matrices in the orthonormal basis,
// plus family-level arithmetic over a k-grid and norm-asymptotics fits.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btq/linalg.hpp"
#include "btq/rates.hpp"
#include "btq/sections.hpp"

namespace btq {

// Hard cap on the exact-entry representation; beyond this the rational tables
// get expensive and only the float pipeline is supported.
inline constexpr int kExactDimCap = 48;

// Operator on the level-d section space in exact form. Stores the raw pairing
// table r_ab = <T z^b, z^a> together with the Gram norms; the matrix in the
// orthonormal basis is M_ab = r_ab / sqrt(n_a n_b), so every algebraic
// operation stays rational even though the matrix entries are not.
class ExactOperator {
 public:
  ExactOperator(BundleSpec spec, std::vector<Cq> pairing_table);
  static ExactOperator identity_op(const BundleSpec& spec);

  const BundleSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }
  const GramData& gram_data() const { return gram_; }
  const Cq& pairing(int a, int b) const;

  // r_ab == conj(r_ba) is equivalent to Hermiticity of the matrix.
  bool is_hermitian() const;
  bool is_diagonal() const;

  // Matrix diagonal M_aa = r_aa / n_a; requires real diagonal entries.
  std::vector<Rational> diagonal() const;
  // Squared Frobenius norm, sum |r_ab|^2 / (n_a n_b).
  Rational frobenius2() const;
  // Operator norm max_a |M_aa| of a diagonal operator.
  Rational op_norm_diagonal() const;

  // Orthonormal-basis matrix, one float rounding per entry.
  Mat to_mat() const;

  // Action on a section in the monomial frame: c'_a = (sum_b r_ab c_b) / n_a.
  HoloSection apply(const HoloSection& s) const;

  ExactOperator adjoint() const;

  ExactOperator& operator+=(const ExactOperator& o);
  ExactOperator& operator-=(const ExactOperator& o);
  ExactOperator& operator*=(const Cq& c);
  friend ExactOperator operator+(ExactOperator a, const ExactOperator& b) { return a += b; }
  friend ExactOperator operator-(ExactOperator a, const ExactOperator& b) { return a -= b; }
  friend ExactOperator operator*(ExactOperator a, const Cq& c) { return a *= c; }
  friend ExactOperator operator*(const Cq& c, ExactOperator a) { return a *= c; }
  friend ExactOperator operator*(const ExactOperator& a, const ExactOperator& b);

 private:
  BundleSpec spec_;
  GramData gram_;
  std::vector<Cq> r_;  // row-major pairing table, r_[a*dim + b]
};

ExactOperator commutator(const ExactOperator& a, const ExactOperator& b);

// One operator at one level: float entries, with the exact table attached
// when the caller asked for it (small dimensions only).
struct OperatorMatrix {
  BundleSpec spec;
  Mat entries;
  std::optional<ExactOperator> exact;
};

// Raw pairing <f z^b, z^a> at the spec's level; the selection rule keeps only
// numerator terms of f with p - q = a - b.
Cq toeplitz_pairing(const FsFunction& f, const BundleSpec& spec, int a, int b);

// Compression of multiplication by f to the holomorphic sections: the matrix
// of project(f . ) in the orthonormal basis. Requires globally smooth f.
OperatorMatrix toeplitz(const FsFunction& f, const BundleSpec& spec, bool keep_exact = false);
ExactOperator toeplitz_exact(const FsFunction& f, const BundleSpec& spec);

// Operator from explicit column images: column(b) is the FS-rational section
// the operator sends z^b to, and the pairing table is r_ab = <column(b), z^a>.
OperatorMatrix matrix_from_columns(const BundleSpec& spec,
                                   const std::function<FsFunction(int)>& column,
                                   bool keep_exact = false);
ExactOperator operator_from_columns(const BundleSpec& spec,
                                    const std::function<FsFunction(int)>& column);

// Compression of the first-order operator s -> mult s + vel s', which sends
// z^b to z^b mult + b z^(b-1) vel. The pairings reduce to shifted beta sums
// over the two fixed symbols, skipping the per-column function algebra; when
// a numerator term of either part would pair outside the decay range (the
// recombined columns can cancel such terms away), the generic column path
// takes over. This is how first-order quantizers plug into the engine.
OperatorMatrix first_order_compression(const FsFunction& mult, const FsFunction& vel,
                                       const BundleSpec& spec, bool keep_exact = false);
ExactOperator first_order_compression_exact(const FsFunction& mult, const FsFunction& vel,
                                            const BundleSpec& spec);

// Spectral norm; Hermitian eigensolve when the matrix is Hermitian, singular
// values otherwise.
double op_norm(const OperatorMatrix& m);

// Operators over a k-grid sharing the twist / half-form shape; `provenance`
// records how the family was built.
struct OperatorFamily {
  std::string provenance;
  std::vector<int> ks;
  std::vector<OperatorMatrix> mats;

  int size() const { return int(ks.size()); }
  const OperatorMatrix& at_k(int k) const;
};

std::vector<int> default_k_grid();

// Builds one member per k, concurrently across the grid. The common bundle
// shape: twist_m with the half-form factor gives d = k + m via the
// compensating twist, without it d = k + m directly on O(m).
OperatorFamily toeplitz_family(const FsFunction& f, const std::vector<int>& ks, int twist_m = 0,
                               bool half_form = false, std::string provenance = "toeplitz");

// k -> F_k G_k. Requires identical grids and per-k specs.
OperatorFamily product_family(const OperatorFamily& f, const OperatorFamily& g);

// k -> ik [F_k, G_k]; the ik scale makes the leading term a Poisson bracket.
// Pass scale_ik = false for the bare commutator.
OperatorFamily commutator_family(const OperatorFamily& f, const OperatorFamily& g,
                                 bool scale_ik = true);

// k -> (1/k) F_k, the canonical subprincipal-axiom test family.
OperatorFamily scale_by_inverse_k(const OperatorFamily& f);

// k -> F_k^*.
OperatorFamily adjoint_family(const OperatorFamily& f);

// k -> k (A_k - B_k); amplifies the first-order difference of two families.
// Requires identical grids and per-k specs.
OperatorFamily k_scaled_difference(const OperatorFamily& a, const OperatorFamily& b);

// k -> ||A_k - B_k||, the residual table most rate fits consume.
std::vector<std::pair<int, double>> residual_norm_table(const OperatorFamily& a,
                                                        const OperatorFamily& b);

struct NormAsymptotics {
  double sup = 0;                                 // sup |f| over the sphere
  double alpha = 0;                               // fitted decay exponent, -slope
  std::vector<std::pair<int, double>> residuals;  // k -> | ||T_k|| - sup|f| |
  RateReport report;
};

// Fits ||T_k|| - sup|f| to C k^{-alpha} over the family grid. Residuals all
// below 1e-12 short-circuit to the "exact" verdict.
NormAsymptotics norm_asymptotics(const OperatorFamily& fam, const FsFunction& f,
                                 const FitWindow& window = {});

}  // namespace btq
