#pragma once

// Graded formal symbols of operator families: polynomial jets along the
// diagonal in slot variables (z_i, zbar_i) with an hbar grading, exact
// complex-rational coefficients, and the substitution product induced by
// kernel composition. The model is frozen-coefficient: geometry enters only
// through pointwise frame data evaluated at a base point, so every identity
// here is checked by exact arithmetic.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

// One monomial slot hbar^l z^alpha zbar^beta with multi-exponents of a fixed
// dimension. Keys order lexicographically, which makes dumps deterministic.
struct JetKey {
  int l = 0;
  std::vector<int> alpha;
  std::vector<int> beta;

  friend bool operator==(const JetKey& a, const JetKey& b) {
    return a.l == b.l && a.alpha == b.alpha && a.beta == b.beta;
  }
  friend bool operator<(const JetKey& a, const JetKey& b) {
    return std::tie(a.l, a.alpha, a.beta) < std::tie(b.l, b.alpha, b.beta);
  }
};

class JetPolynomial {
 public:
  explicit JetPolynomial(int dimension = 1);

  static JetPolynomial one(int dimension = 1);
  static JetPolynomial constant(const Cq& v, int dimension = 1);

  int dimension() const { return n_; }
  bool is_zero() const { return c_.empty(); }
  const std::map<JetKey, Cq>& terms() const { return c_; }

  // Adds v onto the monomial hbar^l z^alpha zbar^beta; zero sums are erased.
  void add_to(int l, std::vector<int> alpha, std::vector<int> beta, const Cq& v);
  Cq at(int l, const std::vector<int>& alpha, const std::vector<int>& beta) const;

  // Conjugate coefficients and swap the slot families; adjoints of families
  // act on symbols this way.
  JetPolynomial conj_swap() const;

  // Slot derivatives d/dz_i and d/dzbar_i (0-based coordinate index).
  JetPolynomial d_slot(int i) const;
  JetPolynomial dbar_slot(int i) const;

  // Grade-m membership: every monomial satisfies |alpha| + |beta| >= m - 2l.
  bool in_grade(int m) const;

  JetPolynomial operator-() const;
  friend JetPolynomial operator+(const JetPolynomial& a, const JetPolynomial& b);
  friend JetPolynomial operator-(const JetPolynomial& a, const JetPolynomial& b);
  friend JetPolynomial operator*(const Cq& s, const JetPolynomial& a);
  friend bool operator==(const JetPolynomial& a, const JetPolynomial& b) {
    return a.n_ == b.n_ && a.c_ == b.c_;
  }
  friend bool operator!=(const JetPolynomial& a, const JetPolynomial& b) { return !(a == b); }

  // One sorted monomial per line with exact coefficients; golden tests pin
  // this rendering.
  std::string dump() const;

 private:
  int n_;
  std::map<JetKey, Cq> c_;
};

// Substitution product of symbols: substitute (-u, zbar + ubar) into the
// left factor and (z + u, -ubar) into the right one, apply
// exp(hbar sum_i d/du_i d/dubar_i) and evaluate at u = ubar = 0. On
// polynomials the exponential terminates, so the result is exact. The left
// unit acts as the projector compression, not as a pointwise identity:
// 1 * g keeps g only up to contractions of its mixed monomials.
JetPolynomial star_formal(const JetPolynomial& e, const JetPolynomial& g);

// Pointwise frame data: the values omega(d_i, dbar_j) on an orthonormal
// holomorphic frame; i * identity in the standard Kahler model.
struct FrozenFrame {
  int n = 1;
  std::vector<Cq> omega;  // row-major n x n

  static FrozenFrame standard(int n = 1);
  const Cq& w(int i, int j) const { return omega[size_t(i) * n + j]; }
};

// Degree-one symbol of the covariant-derivative remainder of a corrected
// quantizer: the linear form omega(., Y^{1,0}) in the slot variables, built
// from the frame components of Y^{1,0}. Lives in grade one.
JetPolynomial tau_symbol(const FrozenFrame& fr, const std::vector<Cq>& y10);

// Frozen one-jet of a field X against the frame: coefficient matrices of
//   [d_j, X]    = ... + hol_anti(i, j) dbar_i
//   [dbar_j, X] = anti_hol(i, j) d_i + ...
// (the blocks not listed never enter the symbol).
struct FrozenFieldJet {
  int n = 1;
  std::vector<Cq> hol_anti;  // row-major n x n
  std::vector<Cq> anti_hol;  // row-major n x n
};

// Quadratic symbol of the commutator of a corrected quantizer with the
// projector family:
//   1/2 sum_ij omega(dbar_i, [dbar_j, X]) zbar_i zbar_j
// - 1/2 sum_ij omega(d_i,    [d_j, X])    z_i    z_j.
// The half is the Taylor normalization of the quadratic form; it is exactly
// what makes verify_frame_defect_product close with its hbar^2/2
// coefficient. Lives in grade two.
JetPolynomial projector_commutator_symbol(const FrozenFrame& fr, const FrozenFieldJet& x);

// Exact check of the projected fourth product of two such quadratic symbols:
//   1 * sx * sy * 1 == (hbar^2/2) sum_ij (d_i d_j sx)(dbar_i dbar_j sy)
// in both orders, and the antisymmetrization equals (hbar^2/2) b_j, the
// frame-defect value the caller computed from the same field data. Inputs
// must be pure quadratics (no hbar part, no mixed monomials); throws
// std::invalid_argument otherwise.
bool verify_frame_defect_product(const JetPolynomial& sx, const JetPolynomial& sy,
                                 const Cq& b_j_value);

}  // namespace btq
