#include "btq/formal.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace btq {
namespace {

int index_sum(const std::vector<int>& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

Rational factorial(int m) {
  Rational r = 1;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

Rational binomial(int m, int k) { return factorial(m) / (factorial(k) * factorial(m - k)); }

// Visits every multi-index 0 <= v <= bound componentwise.
template <class F>
void for_each_below(const std::vector<int>& bound, F&& visit) {
  std::vector<int> v(bound.size(), 0);
  for (;;) {
    visit(v);
    size_t i = 0;
    while (i < v.size() && v[i] == bound[i]) v[i++] = 0;
    if (i == v.size()) return;
    ++v[i];
  }
}

void check_exponents(int n, const std::vector<int>& alpha, const std::vector<int>& beta) {
  if (int(alpha.size()) != n || int(beta.size()) != n)
    throw std::invalid_argument("JetPolynomial: exponent list has wrong dimension");
  for (int v : alpha)
    if (v < 0) throw std::invalid_argument("JetPolynomial: negative exponent");
  for (int v : beta)
    if (v < 0) throw std::invalid_argument("JetPolynomial: negative exponent");
}

}  // namespace

JetPolynomial::JetPolynomial(int dimension) : n_(dimension) {
  if (dimension < 1) throw std::invalid_argument("JetPolynomial: dimension must be positive");
}

JetPolynomial JetPolynomial::one(int dimension) { return constant(Cq(1), dimension); }

JetPolynomial JetPolynomial::constant(const Cq& v, int dimension) {
  JetPolynomial r(dimension);
  r.add_to(0, std::vector<int>(dimension, 0), std::vector<int>(dimension, 0), v);
  return r;
}

void JetPolynomial::add_to(int l, std::vector<int> alpha, std::vector<int> beta, const Cq& v) {
  check_exponents(n_, alpha, beta);
  if (v.is_zero()) return;
  JetKey key{l, std::move(alpha), std::move(beta)};
  auto it = c_.find(key);
  if (it == c_.end()) {
    c_.emplace(std::move(key), v);
    return;
  }
  it->second += v;
  if (it->second.is_zero()) c_.erase(it);
}

Cq JetPolynomial::at(int l, const std::vector<int>& alpha, const std::vector<int>& beta) const {
  check_exponents(n_, alpha, beta);
  auto it = c_.find(JetKey{l, alpha, beta});
  return it == c_.end() ? Cq(0) : it->second;
}

JetPolynomial JetPolynomial::conj_swap() const {
  JetPolynomial r(n_);
  for (const auto& [k, v] : c_) r.c_.emplace(JetKey{k.l, k.beta, k.alpha}, v.conj());
  return r;
}

JetPolynomial JetPolynomial::d_slot(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("JetPolynomial: slot index out of range");
  JetPolynomial r(n_);
  for (const auto& [k, v] : c_) {
    if (k.alpha[i] == 0) continue;
    JetKey d = k;
    --d.alpha[i];
    r.add_to(d.l, d.alpha, d.beta, Cq(k.alpha[i]) * v);
  }
  return r;
}

JetPolynomial JetPolynomial::dbar_slot(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("JetPolynomial: slot index out of range");
  JetPolynomial r(n_);
  for (const auto& [k, v] : c_) {
    if (k.beta[i] == 0) continue;
    JetKey d = k;
    --d.beta[i];
    r.add_to(d.l, d.alpha, d.beta, Cq(k.beta[i]) * v);
  }
  return r;
}

bool JetPolynomial::in_grade(int m) const {
  for (const auto& [k, v] : c_) {
    (void)v;
    if (index_sum(k.alpha) + index_sum(k.beta) < m - 2 * k.l) return false;
  }
  return true;
}

JetPolynomial JetPolynomial::operator-() const {
  JetPolynomial r(n_);
  for (const auto& [k, v] : c_) r.c_.emplace(k, -v);
  return r;
}

JetPolynomial operator+(const JetPolynomial& a, const JetPolynomial& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("JetPolynomial: dimension mismatch");
  JetPolynomial r = a;
  for (const auto& [k, v] : b.c_) r.add_to(k.l, k.alpha, k.beta, v);
  return r;
}

JetPolynomial operator-(const JetPolynomial& a, const JetPolynomial& b) { return a + (-b); }

JetPolynomial operator*(const Cq& s, const JetPolynomial& a) {
  JetPolynomial r(a.n_);
  if (s.is_zero()) return r;
  for (const auto& [k, v] : a.c_) r.c_.emplace(k, s * v);
  return r;
}

std::string JetPolynomial::dump() const {
  std::ostringstream out;
  auto coeff = [](const Cq& v) {
    return "(" + v.re.get_str() + ", " + v.im.get_str() + ")";
  };
  for (const auto& [k, v] : c_) {
    std::string mono;
    auto factor = [&mono](const std::string& name, int e) {
      if (e == 0) return;
      if (!mono.empty()) mono += ' ';
      mono += name;
      if (e > 1) mono += '^' + std::to_string(e);
    };
    factor("h", k.l);
    for (int i = 0; i < n_; ++i) factor("z" + std::to_string(i + 1), k.alpha[i]);
    for (int i = 0; i < n_; ++i) factor("zb" + std::to_string(i + 1), k.beta[i]);
    if (mono.empty()) mono = "1";
    out << mono << " : " << coeff(v) << "\n";
  }
  return out.str();
}

JetPolynomial star_formal(const JetPolynomial& e, const JetPolynomial& g) {
  if (e.dimension() != g.dimension())
    throw std::invalid_argument("star_formal: dimension mismatch");
  const int n = e.dimension();
  JetPolynomial r(n);
  // Left monomial hbar^l1 z^alpha zbar^beta becomes (-u)^alpha (zbar+ubar)^beta,
  // the right one hbar^l2 z^gamma zbar^delta becomes (z+u)^gamma (-ubar)^delta.
  // Expanding the binomials and pushing exp(hbar Delta) through leaves only
  // the terms whose u- and ubar-exponents agree coordinatewise; each such
  // pair (a, a) contributes hbar^|a| prod_i a_i!.
  for (const auto& [ke, ce] : e.terms()) {
    for (const auto& [kg, cg] : g.terms()) {
      const int sign = ((index_sum(ke.alpha) + index_sum(kg.beta)) % 2 == 0) ? 1 : -1;
      for_each_below(kg.alpha, [&](const std::vector<int>& up) {
        // up: the u-part drawn from (z+u)^gamma; the rest stays on z.
        std::vector<int> a(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) a[size_t(i)] = ke.alpha[size_t(i)] + up[size_t(i)];
        // The ubar-exponent is beta' + delta with beta' <= beta; matching it
        // against a pins beta' without a second odometer.
        std::vector<int> bp(static_cast<size_t>(n));
        Rational scale = 1;
        for (int i = 0; i < n; ++i) {
          const int want = a[size_t(i)] - kg.beta[size_t(i)];
          if (want < 0 || want > ke.beta[size_t(i)]) return;
          bp[size_t(i)] = want;
          scale *= binomial(ke.beta[size_t(i)], want) *
                   binomial(kg.alpha[size_t(i)], up[size_t(i)]) * factorial(a[size_t(i)]);
        }
        std::vector<int> za(static_cast<size_t>(n)), zb(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          za[size_t(i)] = kg.alpha[size_t(i)] - up[size_t(i)];
          zb[size_t(i)] = ke.beta[size_t(i)] - bp[size_t(i)];
        }
        const int l = ke.l + kg.l + index_sum(a);
        r.add_to(l, std::move(za), std::move(zb), Cq(Rational(sign) * scale) * ce * cg);
      });
    }
  }
  return r;
}

FrozenFrame FrozenFrame::standard(int n) {
  FrozenFrame fr;
  fr.n = n;
  fr.omega.assign(size_t(n) * n, Cq(0));
  for (int i = 0; i < n; ++i) fr.omega[size_t(i) * n + i] = Cq::i();
  return fr;
}

JetPolynomial tau_symbol(const FrozenFrame& fr, const std::vector<Cq>& y10) {
  if (int(y10.size()) != fr.n || int(fr.omega.size()) != fr.n * fr.n)
    throw std::invalid_argument("tau_symbol: frame and field dimensions disagree");
  JetPolynomial r(fr.n);
  const std::vector<int> zero(size_t(fr.n), 0);
  for (int j = 0; j < fr.n; ++j) {
    // omega(dbar_j, Y^{1,0}) = -sum_i Y_i omega(d_i, dbar_j); the pairing with
    // holomorphic frame fields vanishes because omega has type (1,1).
    Cq c(0);
    for (int i = 0; i < fr.n; ++i) c += y10[size_t(i)] * fr.w(i, j);
    std::vector<int> beta = zero;
    beta[size_t(j)] = 1;
    r.add_to(0, zero, std::move(beta), -c);
  }
  return r;
}

JetPolynomial projector_commutator_symbol(const FrozenFrame& fr, const FrozenFieldJet& x) {
  if (x.n != fr.n || int(x.hol_anti.size()) != fr.n * fr.n ||
      int(x.anti_hol.size()) != fr.n * fr.n)
    throw std::invalid_argument("projector_commutator_symbol: frame and jet dimensions disagree");
  const int n = fr.n;
  const Rational half = Rational(1) / 2;
  JetPolynomial r(n);
  const std::vector<int> zero(size_t(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Cq a(0), b(0);
      for (int k = 0; k < n; ++k) {
        a += fr.w(i, k) * x.hol_anti[size_t(k) * n + j];   // omega(d_i, [d_j, X])
        b -= fr.w(k, i) * x.anti_hol[size_t(k) * n + j];   // omega(dbar_i, [dbar_j, X])
      }
      std::vector<int> zz = zero, bb = zero;
      ++zz[size_t(i)];
      ++zz[size_t(j)];
      ++bb[size_t(i)];
      ++bb[size_t(j)];
      r.add_to(0, std::move(zz), zero, Cq(-half) * a);
      r.add_to(0, zero, std::move(bb), Cq(half) * b);
    }
  return r;
}

namespace {

// The commutator symbols are pure quadratics: no hbar part and no monomial
// mixing the two slot families.
void check_quadratic_shape(const JetPolynomial& s) {
  for (const auto& [k, v] : s.terms()) {
    (void)v;
    const int da = index_sum(k.alpha), db = index_sum(k.beta);
    if (k.l != 0 || da + db != 2 || (da > 0 && db > 0))
      throw std::invalid_argument("verify_frame_defect_product: symbol is not a pure quadratic");
  }
}

JetPolynomial projected_product(const JetPolynomial& a, const JetPolynomial& b) {
  const JetPolynomial unit = JetPolynomial::one(a.dimension());
  return star_formal(star_formal(star_formal(unit, a), b), unit);
}

// (hbar^2/2) sum_ij (d_i d_j a)(dbar_i dbar_j b); the derivatives of pure
// quadratics are constants, so this is a single hbar^2 coefficient.
JetPolynomial second_derivative_pairing(const JetPolynomial& a, const JetPolynomial& b) {
  const int n = a.dimension();
  const std::vector<int> zero(size_t(n), 0);
  Cq s(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += a.d_slot(i).d_slot(j).at(0, zero, zero) * b.dbar_slot(i).dbar_slot(j).at(0, zero, zero);
  JetPolynomial r(n);
  r.add_to(2, zero, zero, Cq(Rational(1) / 2) * s);
  return r;
}

}  // namespace

bool verify_frame_defect_product(const JetPolynomial& sx, const JetPolynomial& sy,
                                 const Cq& b_j_value) {
  if (sx.dimension() != sy.dimension())
    throw std::invalid_argument("verify_frame_defect_product: dimension mismatch");
  check_quadratic_shape(sx);
  check_quadratic_shape(sy);
  const JetPolynomial p = projected_product(sx, sy);
  const JetPolynomial q = projected_product(sy, sx);
  if (p != second_derivative_pairing(sx, sy)) return false;
  if (q != second_derivative_pairing(sy, sx)) return false;
  JetPolynomial expected(sx.dimension());
  expected.add_to(2, std::vector<int>(size_t(sx.dimension()), 0),
                  std::vector<int>(size_t(sx.dimension()), 0), Cq(Rational(1) / 2) * b_j_value);
  return p - q == expected;
}

}  // namespace btq
