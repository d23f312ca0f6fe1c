#pragma once

// Exact scalar arithmetic: arbitrary-precision rationals (GMP) and complex
// rationals built on top of them. Factorial-ratio helpers feed the closed-form
// chart integrals used throughout the geometry and section-space code.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace btq {

using Rational = mpq_class;

// Round-to-nearest conversion; mpq_get_d alone truncates toward zero.
double to_double(const Rational& q);

// num / sqrt(den) with a single rounding: the quotient is formed at extended
// precision and rounded to double once. Requires den > 0.
double div_sqrt(const Rational& num, const Rational& den);

// Complex number with exact rational real and imaginary parts.
struct Cq {
  Rational re = 0;
  Rational im = 0;

  Cq() = default;
  Cq(long r) : re(r) {}
  Cq(const Rational& r) : re(r) {}
  Cq(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static Cq i() { return Cq(Rational(0), Rational(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  Cq conj() const { return Cq(re, -im); }
  Rational norm2() const { return re * re + im * im; }

  Cq operator-() const { return Cq(-re, -im); }
  Cq& operator+=(const Cq& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cq& operator-=(const Cq& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Cq& operator*=(const Cq& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }

  friend Cq operator+(Cq a, const Cq& b) { return a += b; }
  friend Cq operator-(Cq a, const Cq& b) { return a -= b; }
  friend Cq operator*(Cq a, const Cq& b) { return a *= b; }
  friend Cq operator/(const Cq& a, const Cq& b) {
    Rational n = b.norm2();
    if (n == 0) throw std::domain_error("Cq: division by zero");
    return Cq((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  friend bool operator==(const Cq& a, const Cq& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Cq& a, const Cq& b) { return !(a == b); }
};

inline Cq conj(const Cq& a) { return a.conj(); }
std::complex<double> to_complex(const Cq& a);
std::string to_string(const Cq& a);

// n! as an exact rational (integer-valued).
Rational factorial(unsigned n);

// The chart integral of |z|^{2a} (1+|z|^2)^{-w} against the normalized area
// measure: a!(w-a)!/(w+1)!. Defined for 0 <= a <= w; the integral diverges
// otherwise and the call is a contract violation.
Rational beta_integral(unsigned a, unsigned w);

}  // namespace btq
