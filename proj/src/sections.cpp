#include "btq/sections.hpp"

#include <cmath>
#include <stdexcept>

namespace btq {

void BundleSpec::validate() const {
  if (k < 1) throw std::invalid_argument("BundleSpec: level k must be >= 1");
  if (d() < 0) throw std::invalid_argument("BundleSpec: bundle degree is negative");
}

BundleSpec half_form_spec(int k, int m) {
  BundleSpec s{k, m + 1, true};
  s.validate();
  return s;
}

BundleSpec plain_spec(int k, int m) {
  BundleSpec s{k, m, false};
  s.validate();
  return s;
}

GramData gram(const BundleSpec& spec) {
  spec.validate();
  GramData g;
  g.d = spec.d();
  g.n.reserve(g.d + 1);
  g.sqrt_n.reserve(g.d + 1);
  for (int a = 0; a <= g.d; ++a) {
    g.n.push_back(beta_integral(unsigned(a), unsigned(g.d)));
    g.sqrt_n.push_back(std::sqrt(to_double(g.n.back())));
  }
  return g;
}

Cq section_pairing(const FsFunction& u, const FsFunction& v, const BundleSpec& spec) {
  spec.validate();
  FsFunction g = u * v.conj_fn();
  const int w = g.weight() + spec.d();
  Cq out(0);
  // the angular integral keeps only the diagonal numerator terms; a diagonal
  // term beyond the decay bound (a > w) makes beta_integral throw, which is
  // exactly the malformed-section contract
  for (int a = 0; a <= std::min(g.deg_z(), g.deg_zb()); ++a) {
    Cq c = g.at(a, a);
    if (!c.is_zero()) out += Cq(beta_integral(unsigned(a), unsigned(w))) * c;
  }
  return out;
}

Cq pair_against_monomial(const FsFunction& v, int a, const BundleSpec& spec) {
  spec.validate();
  if (a < 0 || a > spec.d()) throw std::invalid_argument("pair_against_monomial: index out of range");
  const int w = v.weight() + spec.d();
  Cq out(0);
  for (int q = 0; q <= v.deg_zb(); ++q) {
    Cq c = v.at(q + a, q);
    if (!c.is_zero()) out += Cq(beta_integral(unsigned(q + a), unsigned(w))) * c;
  }
  return out;
}

HoloSection project(const FsFunction& v, const BundleSpec& spec) {
  spec.validate();
  GramData g = gram(spec);
  HoloSection s{spec, std::vector<Cq>(size_t(spec.dim()))};
  for (int a = 0; a <= spec.d(); ++a) {
    Cq p = pair_against_monomial(v, a, spec);
    if (!p.is_zero()) s.coeff[a] = Cq(p.re / g.n[a], p.im / g.n[a]);
  }
  return s;
}

FsFunction section_function(const HoloSection& s) {
  FsFunction f = FsFunction::zero();
  for (int a = 0; a < int(s.coeff.size()); ++a)
    if (!s.coeff[a].is_zero()) f.add_to(a, 0, s.coeff[a]);
  f.canonicalize();
  return f;
}

std::vector<HoloSection> orthonormal_basis(const BundleSpec& spec) {
  spec.validate();
  std::vector<HoloSection> basis;
  basis.reserve(spec.dim());
  for (int a = 0; a <= spec.d(); ++a) {
    HoloSection s{spec, std::vector<Cq>(size_t(spec.dim()))};
    s.coeff[a] = Cq(1);
    basis.push_back(std::move(s));
  }
  return basis;
}

}  // namespace btq
