#include "btq/rational.hpp"

#include <mpfr.h>

#include <sstream>

namespace btq {

double to_double(const Rational& q) {
  // 53-bit target precision so the rational rounds to double exactly once.
  mpfr_t x;
  mpfr_init2(x, 53);
  mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
  double d = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  return d;
}

double div_sqrt(const Rational& num, const Rational& den) {
  if (den <= 0) throw std::domain_error("div_sqrt: requires a positive denominator");
  // 120-bit intermediates keep sqrt and divide errors below the final 53-bit
  // rounding step, so the result is correctly rounded for all practical sizes.
  mpfr_t n, d, r;
  mpfr_init2(n, 120);
  mpfr_init2(d, 120);
  mpfr_init2(r, 120);
  mpfr_set_q(n, num.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(d, den.get_mpq_t(), MPFR_RNDN);
  mpfr_sqrt(d, d, MPFR_RNDN);
  mpfr_div(r, n, d, MPFR_RNDN);
  double out = mpfr_get_d(r, MPFR_RNDN);
  mpfr_clear(n);
  mpfr_clear(d);
  mpfr_clear(r);
  return out;
}

std::complex<double> to_complex(const Cq& a) {
  return {to_double(a.re), to_double(a.im)};
}

std::string to_string(const Cq& a) {
  std::ostringstream os;
  os << a.re.get_str();
  if (a.im != 0) os << (a.im > 0 ? "+" : "") << a.im.get_str() << "i";
  return os.str();
}

Rational factorial(unsigned n) {
  mpz_class z;
  mpz_fac_ui(z.get_mpz_t(), n);
  return Rational(z);
}

Rational beta_integral(unsigned a, unsigned w) {
  if (a > w) throw std::domain_error("beta_integral: requires a <= w");
  return factorial(a) * factorial(w - a) / factorial(w + 1);
}

}  // namespace btq
