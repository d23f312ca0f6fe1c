#pragma once

// The chart function ring: finite sums  sum c[p][q] z^p zbar^q (1+|z|^2)^{-w}
// with exact complex-rational coefficients (BandFn<Cq>, the default) or
// floating coefficients (BandFn<cd>, used for fitted symbols). The ring is
// closed under d/dz, d/dzbar, conjugation, products and division by 1+|z|^2,
// which is everything the chart geometry needs.

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

using cd = std::complex<double>;

template <class S>
struct scalar_ops;

template <>
struct scalar_ops<Cq> {
  static Cq conj(const Cq& v) { return v.conj(); }
  static bool is_zero(const Cq& v) { return v.is_zero(); }
  static Cq imag_unit() { return Cq::i(); }
  static Cq from_int(long n) { return Cq(n); }
  static cd to_cd(const Cq& v) { return to_complex(v); }
};

template <>
struct scalar_ops<cd> {
  static cd conj(const cd& v) { return std::conj(v); }
  static bool is_zero(const cd& v) { return v == cd(0); }
  static cd imag_unit() { return cd(0, 1); }
  static cd from_int(long n) { return cd(double(n), 0); }
  static cd to_cd(const cd& v) { return v; }
};

template <class S>
class BandFn {
 public:
  BandFn() = default;

  static BandFn zero() { return BandFn(); }

  static BandFn constant(S v) {
    BandFn f;
    if (!scalar_ops<S>::is_zero(v)) {
      f.nz_ = f.nzb_ = 1;
      f.c_ = {std::move(v)};
    }
    return f;
  }

  static BandFn monomial(int p, int q, S v, int weight) {
    BandFn f;
    f.weight_ = weight;
    f.nz_ = p + 1;
    f.nzb_ = q + 1;
    f.c_.assign(size_t(f.nz_) * f.nzb_, S{});
    f.c_[size_t(p) * f.nzb_ + q] = std::move(v);
    f.canonicalize();
    return f;
  }

  int weight() const { return weight_; }
  int deg_z() const { return nz_ - 1; }    // -1 for the zero function
  int deg_zb() const { return nzb_ - 1; }
  bool is_zero_fn() const { return c_.empty(); }

  S at(int p, int q) const {
    if (p < 0 || q < 0 || p >= nz_ || q >= nzb_) return S{};
    return c_[size_t(p) * nzb_ + q];
  }

  void set(int p, int q, S v) {
    grow(p + 1, q + 1);
    c_[size_t(p) * nzb_ + q] = std::move(v);
  }

  void add_to(int p, int q, const S& v) {
    grow(p + 1, q + 1);
    c_[size_t(p) * nzb_ + q] += v;
  }

  void set_weight(int w) {
    if (w < 0) throw std::invalid_argument("BandFn: negative weight");
    weight_ = w;
  }

  // Multiplies the numerator by (1+|z|^2)^j without touching the weight,
  // i.e. multiplies the function by (1+|z|^2)^j.
  void mul_numerator_one_plus_t(int j) {
    for (int r = 0; r < j; ++r) {
      BandFn g;
      g.weight_ = weight_;
      g.nz_ = nz_ + 1;
      g.nzb_ = nzb_ + 1;
      g.c_.assign(size_t(g.nz_) * g.nzb_, S{});
      for (int p = 0; p < nz_; ++p)
        for (int q = 0; q < nzb_; ++q) {
          const S& v = c_[size_t(p) * nzb_ + q];
          if (scalar_ops<S>::is_zero(v)) continue;
          g.c_[size_t(p) * g.nzb_ + q] += v;
          g.c_[size_t(p + 1) * g.nzb_ + (q + 1)] += v;
        }
      *this = std::move(g);
    }
  }

  // Multiplies the function by (1+|z|^2)^j (j of either sign).
  BandFn times_one_plus_t_pow(int j) const {
    BandFn f = *this;
    if (j >= 0) {
      int drop = std::min(j, f.weight_);
      f.weight_ -= drop;
      f.mul_numerator_one_plus_t(j - drop);
    } else {
      f.weight_ += -j;
    }
    f.canonicalize();
    return f;
  }

  // Rewrites the function with the given (not smaller) weight.
  BandFn with_weight(int w) const {
    if (w < weight_) throw std::invalid_argument("BandFn: cannot lower weight");
    BandFn f = *this;
    f.mul_numerator_one_plus_t(w - weight_);
    f.weight_ = w;
    return f;
  }

  BandFn operator-() const {
    BandFn f = *this;
    for (S& v : f.c_) v = -v;
    return f;
  }

  friend BandFn operator+(const BandFn& a, const BandFn& b) {
    int w = std::max(a.weight_, b.weight_);
    BandFn x = a.with_weight(w), y = b.with_weight(w);
    BandFn r;
    r.weight_ = w;
    r.nz_ = std::max(x.nz_, y.nz_);
    r.nzb_ = std::max(x.nzb_, y.nzb_);
    r.c_.assign(size_t(r.nz_) * r.nzb_, S{});
    for (int p = 0; p < r.nz_; ++p)
      for (int q = 0; q < r.nzb_; ++q)
        r.c_[size_t(p) * r.nzb_ + q] = x.at(p, q) + y.at(p, q);
    r.canonicalize();
    return r;
  }

  friend BandFn operator-(const BandFn& a, const BandFn& b) { return a + (-b); }

  friend BandFn operator*(const BandFn& a, const BandFn& b) {
    BandFn r;
    if (a.is_zero_fn() || b.is_zero_fn()) return r;
    r.weight_ = a.weight_ + b.weight_;
    r.nz_ = a.nz_ + b.nz_ - 1;
    r.nzb_ = a.nzb_ + b.nzb_ - 1;
    r.c_.assign(size_t(r.nz_) * r.nzb_, S{});
    for (int p = 0; p < a.nz_; ++p)
      for (int q = 0; q < a.nzb_; ++q) {
        const S& v = a.c_[size_t(p) * a.nzb_ + q];
        if (scalar_ops<S>::is_zero(v)) continue;
        for (int s = 0; s < b.nz_; ++s)
          for (int t = 0; t < b.nzb_; ++t)
            r.c_[size_t(p + s) * r.nzb_ + (q + t)] += v * b.c_[size_t(s) * b.nzb_ + t];
      }
    r.canonicalize();
    return r;
  }

  friend BandFn operator*(const S& s, const BandFn& a) {
    BandFn r = a;
    for (S& v : r.c_) v = s * v;
    r.canonicalize();
    return r;
  }

  friend bool operator==(const BandFn& a, const BandFn& b) {
    BandFn d = a - b;  // both sides canonical; the difference canonicalizes to empty iff equal
    return d.is_zero_fn();
  }
  friend bool operator!=(const BandFn& a, const BandFn& b) { return !(a == b); }

  BandFn conj_fn() const {
    BandFn r;
    r.weight_ = weight_;
    r.nz_ = nzb_;
    r.nzb_ = nz_;
    r.c_.assign(c_.size(), S{});
    for (int p = 0; p < nz_; ++p)
      for (int q = 0; q < nzb_; ++q)
        r.c_[size_t(q) * r.nzb_ + p] = scalar_ops<S>::conj(c_[size_t(p) * nzb_ + q]);
    return r;
  }

  // d/dz via the quotient rule: [P_z (1+t) - w zbar P] (1+t)^{-(w+1)}.
  BandFn dz() const {
    BandFn pz;
    pz.weight_ = weight_ + 1;
    if (nz_ > 1) {
      pz.nz_ = nz_ - 1;
      pz.nzb_ = nzb_;
      pz.c_.assign(size_t(pz.nz_) * pz.nzb_, S{});
      for (int p = 1; p < nz_; ++p)
        for (int q = 0; q < nzb_; ++q)
          pz.c_[size_t(p - 1) * pz.nzb_ + q] =
              scalar_ops<S>::from_int(p) * c_[size_t(p) * nzb_ + q];
    }
    pz.mul_numerator_one_plus_t(1);

    BandFn zbP;
    zbP.weight_ = weight_ + 1;
    if (!c_.empty() && weight_ > 0) {
      zbP.nz_ = nz_;
      zbP.nzb_ = nzb_ + 1;
      zbP.c_.assign(size_t(zbP.nz_) * zbP.nzb_, S{});
      for (int p = 0; p < nz_; ++p)
        for (int q = 0; q < nzb_; ++q)
          zbP.c_[size_t(p) * zbP.nzb_ + (q + 1)] =
              scalar_ops<S>::from_int(weight_) * c_[size_t(p) * nzb_ + q];
    }

    return pz - zbP;  // both terms share the final weight, so this is exact
  }

  BandFn dzbar() const { return conj_fn().dz().conj_fn(); }

  bool is_real() const {
    for (int p = 0; p < nz_; ++p)
      for (int q = 0; q < nzb_; ++q)
        if (at(q, p) != scalar_ops<S>::conj(at(p, q))) return false;
    return true;
  }

  // Global smoothness on the compactified chart: both numerator degrees
  // bounded by the weight.
  bool globally_smooth() const { return is_zero_fn() || (deg_z() <= weight_ && deg_zb() <= weight_); }

  // The function rewritten in the opposite chart w = 1/z and then multiplied
  // by w^{shift_z} wbar^{shift_zb} there (the shifts absorb the coordinate
  // weights of tensor components). Throws when the result has a pole, i.e.
  // falls outside the coefficient ring.
  BandFn chart_swap_shifted(int shift_z, int shift_zb) const {
    BandFn f = *this;
    f.canonicalize();
    if (f.is_zero_fn()) return f;
    const int w = f.weight_;
    if (f.deg_z() > w + shift_z || f.deg_zb() > w + shift_zb)
      throw std::domain_error("BandFn: chart swap leaves the coefficient ring");
    BandFn r;
    r.weight_ = w;
    r.nz_ = w + shift_z + 1;
    r.nzb_ = w + shift_zb + 1;
    r.c_.assign(size_t(r.nz_) * r.nzb_, S{});
    for (int p = 0; p < f.nz_; ++p)
      for (int q = 0; q < f.nzb_; ++q)
        r.c_[size_t(w + shift_z - p) * r.nzb_ + (w + shift_zb - q)] = f.c_[size_t(p) * f.nzb_ + q];
    r.canonicalize();
    return r;
  }

  // The same scalar function written in the opposite chart. Defined exactly
  // for globally smooth functions.
  BandFn chart_swap() const { return chart_swap_shifted(0, 0); }

  cd eval(cd z) const {
    cd num = 0;
    cd zb = std::conj(z);
    for (int p = 0; p < nz_; ++p) {
      cd zp = std::pow(z, p);
      for (int q = 0; q < nzb_; ++q) {
        const S& v = c_[size_t(p) * nzb_ + q];
        if (!scalar_ops<S>::is_zero(v)) num += scalar_ops<S>::to_cd(v) * zp * std::pow(zb, q);
      }
    }
    return num / std::pow(1.0 + std::norm(z), weight_);
  }

  double max_abs_coeff() const {
    double m = 0;
    for (const S& v : c_) m = std::max(m, std::abs(scalar_ops<S>::to_cd(v)));
    return m;
  }

  // Exact canonical form: trims zero borders, removes factors of 1+|z|^2
  // common to numerator and weight, and normalizes the zero function. For
  // floating coefficients only structural (exact) zeros are trimmed.
  void canonicalize() {
    trim();
    while (weight_ > 0 && !c_.empty()) {
      BandFn q;
      if (!divide_numerator_one_plus_t(q)) break;
      q.weight_ = weight_ - 1;
      *this = std::move(q);
      trim();
    }
    if (c_.empty()) weight_ = 0;
  }

 private:
  void grow(int nz, int nzb) {
    if (nz <= nz_ && nzb <= nzb_) return;
    int mz = std::max(nz, nz_), mzb = std::max(nzb, nzb_);
    std::vector<S> d(size_t(mz) * mzb, S{});
    for (int p = 0; p < nz_; ++p)
      for (int q = 0; q < nzb_; ++q) d[size_t(p) * mzb + q] = c_[size_t(p) * nzb_ + q];
    c_ = std::move(d);
    nz_ = mz;
    nzb_ = mzb;
  }

  void trim() {
    int mz = 0, mzb = 0;
    for (int p = 0; p < nz_; ++p)
      for (int q = 0; q < nzb_; ++q)
        if (!scalar_ops<S>::is_zero(c_[size_t(p) * nzb_ + q])) {
          mz = std::max(mz, p + 1);
          mzb = std::max(mzb, q + 1);
        }
    if (mz == nz_ && mzb == nzb_) return;
    std::vector<S> d(size_t(mz) * mzb, S{});
    for (int p = 0; p < mz; ++p)
      for (int q = 0; q < mzb; ++q) d[size_t(p) * mzb + q] = c_[size_t(p) * nzb_ + q];
    c_ = std::move(d);
    nz_ = mz;
    nzb_ = mzb;
  }

  // Synthetic division of the numerator by 1 + z zbar, one diagonal at a time.
  // Returns false (leaving q unspecified) when the division has a remainder.
  bool divide_numerator_one_plus_t(BandFn& q) const {
    q = BandFn();
    q.weight_ = weight_;
    if (nz_ == 0 || nzb_ == 0) return true;
    q.nz_ = std::max(nz_ - 1, 1);
    q.nzb_ = std::max(nzb_ - 1, 1);
    q.c_.assign(size_t(q.nz_) * q.nzb_, S{});
    for (int o = -(nzb_ - 1); o <= nz_ - 1; ++o) {
      int p0 = std::max(o, 0), q0 = p0 - o;
      int len = std::min(nz_ - p0, nzb_ - q0);
      S g{};  // running quotient coefficient g_{j-1}
      for (int j = 0; j < len; ++j) {
        S aj = c_[size_t(p0 + j) * nzb_ + (q0 + j)];
        if (j == len - 1) {
          if (aj != g) return false;  // remainder
        } else {
          g = aj - g;
          q.c_[size_t(p0 + j) * q.nzb_ + (q0 + j)] = g;
        }
      }
    }
    return true;
  }

  int nz_ = 0, nzb_ = 0;  // numerator coefficient extents (degree + 1)
  int weight_ = 0;
  std::vector<S> c_;
};

using FsFunction = BandFn<Cq>;
using FsFunctionD = BandFn<cd>;

FsFunctionD to_numeric(const FsFunction& f);

// Exact value at a chart point with rational coordinates: the numerator is a
// polynomial in z and conj(z), so the value stays complex rational.
Cq eval_exact(const FsFunction& f, const Cq& z);

// Largest |f - g| over a fixed spread of chart sample points plus the point
// at infinity; the comparison metric for fitted (floating) symbols.
double eval_distance(const FsFunctionD& f, const FsFunctionD& g);
double eval_distance(const FsFunctionD& f, const FsFunction& g);

}  // namespace btq
