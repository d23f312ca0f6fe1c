#pragma once

// Quantum state spaces: holomorphic sections of the degree-d line bundle in
// the affine chart, i.e. polynomials of degree <= d, with the exact diagonal
// Gram data of the monomial basis and the exact orthogonal projector.

#include <vector>

#include "btq/fs_function.hpp"

namespace btq {

struct BundleSpec {
  int k = 1;               // tensor power of the base prequantum bundle
  int twist = 0;           // extra twist by O(twist)
  bool half_form = false;  // tensor by the half-form bundle (degree -1)

  int d() const { return k + twist - (half_form ? 1 : 0); }
  int dim() const { return d() + 1; }
  void validate() const;

  friend bool operator==(const BundleSpec& a, const BundleSpec& b) {
    return a.k == b.k && a.twist == b.twist && a.half_form == b.half_form;
  }
  friend bool operator!=(const BundleSpec& a, const BundleSpec& b) { return !(a == b); }
};

// The two bundle shapes used throughout: effective twist m with the half-form
// factor (d = k + m, twist carries the compensating +1), and without it.
BundleSpec half_form_spec(int k, int m);
BundleSpec plain_spec(int k, int m);

struct HoloSection {
  BundleSpec spec;
  std::vector<Cq> coeff;  // c_0..c_d in the monomial frame z^a

  bool is_zero() const {
    for (const Cq& c : coeff)
      if (!c.is_zero()) return false;
    return true;
  }
  friend bool operator==(const HoloSection& a, const HoloSection& b) {
    return a.spec == b.spec && a.coeff == b.coeff;
  }
};

struct GramData {
  int d = 0;
  std::vector<Rational> n;     // n_a = <z^a, z^a>, exact
  std::vector<double> sqrt_n;  // rounded once from the exact values
};

GramData gram(const BundleSpec& spec);

// Exact inner product <u, v> = (1/2pi) int u conj(v) (1+t)^{-d} omega of two
// chart representatives at the spec's level. Throws when the integrand does
// not decay (a malformed section for this level).
Cq section_pairing(const FsFunction& u, const FsFunction& v, const BundleSpec& spec);

// <v, z^a>, exact; the selection rule keeps only numerator terms with
// p - q = a.
Cq pair_against_monomial(const FsFunction& v, int a, const BundleSpec& spec);

// Exact orthogonal projection onto the holomorphic sections.
HoloSection project(const FsFunction& v, const BundleSpec& spec);

// The chart polynomial of a holomorphic section as a ring element.
FsFunction section_function(const HoloSection& s);

// z^a scaled-monomial sections; orthogonal with exact norms gram(spec).n[a],
// so e_a = basis[a]/sqrt(n_a) is the orthonormal frame matrix builders use.
// The exact norm table travels separately because the norms are irrational.
std::vector<HoloSection> orthonormal_basis(const BundleSpec& spec);

}  // namespace btq
