#pragma once

// Chart differential geometry of the sphere: coordinate functions, Poisson
// bracket, Hamiltonian fields, Laplacian, exterior calculus on low-degree
// forms, the canonical-bundle derivative, and the frame defect b_j. All exact.

#include "btq/conventions.hpp"
#include "btq/fs_function.hpp"

namespace btq {

// Coordinate functions of the unit sphere in the affine chart.
FsFunction coord_x1();
FsFunction coord_x2();
FsFunction coord_x3();

// Named catalog used by test suites: x1, x2, x3, x3^2, x1*x2.
const std::vector<std::pair<std::string, FsFunction>>& sphere_catalog();

struct VectorField {
  FsFunction z;   // coefficient of d/dz
  FsFunction zb;  // coefficient of d/dzbar

  bool is_real() const { return zb == z.conj_fn(); }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    return {a.z + b.z, a.zb + b.zb};
  }
  friend VectorField operator*(const Cq& s, const VectorField& v) { return {s * v.z, s * v.zb}; }
  friend VectorField operator*(const FsFunction& f, const VectorField& v) {
    return {f * v.z, f * v.zb};
  }
};

struct OneForm {
  FsFunction a_z;   // coefficient of dz
  FsFunction a_zb;  // coefficient of dzbar

  bool is_real() const { return a_zb == a_z.conj_fn(); }

  friend OneForm operator+(const OneForm& a, const OneForm& b) {
    return {a.a_z + b.a_z, a.a_zb + b.a_zb};
  }
  friend OneForm operator-(const OneForm& a, const OneForm& b) {
    return {a.a_z - b.a_z, a.a_zb - b.a_zb};
  }
  friend OneForm operator*(const Cq& s, const OneForm& a) { return {s * a.a_z, s * a.a_zb}; }
};

struct TwoForm {
  FsFunction mu;  // coefficient of dz wedge dzbar

  friend TwoForm operator+(const TwoForm& a, const TwoForm& b) { return {a.mu + b.mu}; }
  friend TwoForm operator-(const TwoForm& a, const TwoForm& b) { return {a.mu - b.mu}; }
  friend TwoForm operator*(const Cq& s, const TwoForm& a) { return {s * a.mu}; }
  friend bool operator==(const TwoForm& a, const TwoForm& b) { return a.mu == b.mu; }
};

// A local section g dz of the canonical bundle.
struct CanonicalSection {
  FsFunction g;

  friend CanonicalSection operator+(const CanonicalSection& a, const CanonicalSection& b) {
    return {a.g + b.g};
  }
  friend CanonicalSection operator-(const CanonicalSection& a, const CanonicalSection& b) {
    return {a.g - b.g};
  }
  friend bool operator==(const CanonicalSection& a, const CanonicalSection& b) {
    return a.g == b.g;
  }
};

// The symplectic form as a TwoForm.
TwoForm omega_form();

// Scalar multiple of omega: rho * omega as a TwoForm.
TwoForm omega_multiple(const FsFunction& rho);

// The density rho with eta = rho * omega (exact division; every 2-form on the
// chart is such a multiple).
FsFunction density_against_omega(const TwoForm& eta);

template <class S>
BandFn<S> poisson_bracket(const BandFn<S>& f, const BandFn<S>& g) {
  // {f,g} = i (1+t)^2 (dg/dz df/dzbar - dg/dzbar df/dz)
  BandFn<S> p = g.dz() * f.dzbar() - g.dzbar() * f.dz();
  return (scalar_ops<S>::imag_unit() * p).times_one_plus_t_pow(2);
}

template <class S>
BandFn<S> laplacian(const BandFn<S>& f) {
  return f.dz().dzbar().times_one_plus_t_pow(2);
}

VectorField hamiltonian_field(const FsFunction& f);

// Directional derivative X.f of a function along a field.
FsFunction directional(const VectorField& x, const FsFunction& f);

VectorField lie_bracket(const VectorField& x, const VectorField& y);

// Canonical-bundle derivative along X: (X.g + g dX^1/dz) dz.
CanonicalSection d_canonical(const VectorField& x, const CanonicalSection& s);

// Pointwise canonical metric (s,t), from |dz|^2 = (1+t)^2.
FsFunction canonical_metric(const CanonicalSection& s, const CanonicalSection& t);

CanonicalSection chart_swap(const CanonicalSection& s);

// The same field expressed in the opposite chart (d/dz = -w^2 d/dw).
VectorField chart_swap(const VectorField& x);

// Frame coefficients of a field against the orthonormal chart frame, and the
// derivative-commutator defect b_j(X,Y) built from them.
FsFunction frame_a(const VectorField& x);
FsFunction frame_b(const VectorField& x);

enum class Frame { affine_chart, opposite_chart };
FsFunction b_j(const VectorField& x, const VectorField& y, Frame frame = Frame::affine_chart);

// Exterior calculus.
TwoForm exterior_d(const OneForm& a);
TwoForm wedge(const OneForm& a, const OneForm& b);
OneForm contract_iota(const VectorField& v, const TwoForm& eta);
FsFunction contract_iota(const VectorField& v, const OneForm& a);

// Exact integral of a 2-form over the sphere, returned in units of 2 pi.
// Requires a globally integrable coefficient (numerator degrees <= weight-2).
Cq integrate_in_2pi(const TwoForm& eta);

// Supremum of |f| over the sphere, to about 1e-8: coarse two-chart sampling
// followed by local grid refinement around the best point. Requires a
// globally smooth f.
double sup_abs_sphere(const FsFunction& f);

}  // namespace btq
