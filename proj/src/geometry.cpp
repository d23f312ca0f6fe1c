#include "btq/geometry.hpp"

#include <stdexcept>

namespace btq {

FsFunction coord_x1() {
  // (z + zbar) / (1+t)
  FsFunction f = FsFunction::monomial(1, 0, Cq(1), 1);
  f.add_to(0, 1, Cq(1));
  return f;
}

FsFunction coord_x2() {
  // i (zbar - z) / (1+t)
  FsFunction f = FsFunction::monomial(1, 0, -Cq::i(), 1);
  f.add_to(0, 1, Cq::i());
  return f;
}

FsFunction coord_x3() {
  // (1 - t) / (1+t)
  FsFunction f = FsFunction::monomial(0, 0, Cq(1), 1);
  f.add_to(1, 1, Cq(-1));
  return f;
}

const std::vector<std::pair<std::string, FsFunction>>& sphere_catalog() {
  static const std::vector<std::pair<std::string, FsFunction>> cat = [] {
    std::vector<std::pair<std::string, FsFunction>> v;
    v.emplace_back("x1", coord_x1());
    v.emplace_back("x2", coord_x2());
    v.emplace_back("x3", coord_x3());
    v.emplace_back("x3^2", coord_x3() * coord_x3());
    v.emplace_back("x1*x2", coord_x1() * coord_x2());
    return v;
  }();
  return cat;
}

TwoForm omega_form() { return {FsFunction::monomial(0, 0, Cq::i(), 2)}; }

TwoForm omega_multiple(const FsFunction& rho) { return {rho * omega_form().mu}; }

FsFunction density_against_omega(const TwoForm& eta) {
  // eta = rho * i (1+t)^{-2} dz^dzb  =>  rho = -i (1+t)^2 eta_mu
  FsFunction rho = (-Cq::i() * eta.mu).times_one_plus_t_pow(2);
  rho.canonicalize();
  return rho;
}

VectorField hamiltonian_field(const FsFunction& f) {
  FsFunction xz = (-Cq::i() * f.dzbar()).times_one_plus_t_pow(2);
  FsFunction xzb = (Cq::i() * f.dz()).times_one_plus_t_pow(2);
  xz.canonicalize();
  xzb.canonicalize();
  return {xz, xzb};
}

FsFunction directional(const VectorField& x, const FsFunction& f) {
  return x.z * f.dz() + x.zb * f.dzbar();
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  return {directional(x, y.z) - directional(y, x.z),
          directional(x, y.zb) - directional(y, x.zb)};
}

CanonicalSection d_canonical(const VectorField& x, const CanonicalSection& s) {
  return {directional(x, s.g) + s.g * x.z.dz()};
}

FsFunction canonical_metric(const CanonicalSection& s, const CanonicalSection& t) {
  FsFunction m = (s.g * t.g.conj_fn()).times_one_plus_t_pow(2);
  m.canonicalize();
  return m;
}

CanonicalSection chart_swap(const CanonicalSection& s) {
  // g dz pulled through w = 1/z: dz = -w^{-2} dw. Throws when the section is
  // not smooth at the point at infinity.
  return {-(s.g.chart_swap_shifted(-2, 0))};
}

FsFunction frame_a(const VectorField& x) { return Cq::i() * x.zb.dz(); }

FsFunction frame_b(const VectorField& x) { return -Cq::i() * x.z.dzbar(); }

VectorField chart_swap(const VectorField& x) {
  return {-(x.z.chart_swap_shifted(2, 0)), -(x.zb.chart_swap_shifted(0, 2))};
}

namespace {

FsFunction b_j_chart(const VectorField& x, const VectorField& y) {
  FsFunction r = x.z.dzbar() * y.zb.dz() - y.z.dzbar() * x.zb.dz();
  r.canonicalize();
  return r;
}

}  // namespace

FsFunction b_j(const VectorField& x, const VectorField& y, Frame frame) {
  if (frame == Frame::affine_chart) return b_j_chart(x, y);
  FsFunction r = b_j_chart(chart_swap(x), chart_swap(y)).chart_swap();
  r.canonicalize();
  return r;
}

TwoForm exterior_d(const OneForm& a) {
  FsFunction mu = a.a_zb.dz() - a.a_z.dzbar();
  mu.canonicalize();
  return {mu};
}

TwoForm wedge(const OneForm& a, const OneForm& b) {
  FsFunction mu = a.a_z * b.a_zb - a.a_zb * b.a_z;
  mu.canonicalize();
  return {mu};
}

OneForm contract_iota(const VectorField& v, const TwoForm& eta) {
  FsFunction az = -(eta.mu * v.zb);
  FsFunction azb = eta.mu * v.z;
  az.canonicalize();
  azb.canonicalize();
  return {az, azb};
}

FsFunction contract_iota(const VectorField& v, const OneForm& a) {
  FsFunction r = a.a_z * v.z + a.a_zb * v.zb;
  r.canonicalize();
  return r;
}

Cq integrate_in_2pi(const TwoForm& eta) {
  FsFunction mu = eta.mu;
  mu.canonicalize();
  if (mu.is_zero_fn()) return Cq(0);
  int w = mu.weight();
  if (w < 2 || mu.deg_z() > w - 2 || mu.deg_zb() > w - 2)
    throw std::domain_error("integrate_in_2pi: coefficient does not decay");
  // Angular integration kills off-diagonal terms; the radial integral of each
  // diagonal term is a beta value.
  Cq q(0);
  for (int a = 0; a <= mu.deg_z(); ++a) {
    Cq v = mu.at(a, a);
    if (!v.is_zero()) q += Cq(beta_integral(unsigned(a), unsigned(w - 2))) * v;
  }
  return -Cq::i() * q;
}

double sup_abs_sphere(const FsFunction& f) {
  if (!f.globally_smooth())
    throw std::domain_error("sup_abs_sphere: function is unbounded on the sphere");
  FsFunctionD g = to_numeric(f);
  FsFunctionD h = to_numeric(f.chart_swap());

  // Coarse pass: polar grid over the closed unit disk in each chart. The two
  // disks cover the sphere, so the global maximizer lands in one of them.
  const int nr = 48, nth = 96;
  double best = 0;
  cd best_z = 0;
  const FsFunctionD* best_fn = &g;
  for (const FsFunctionD* fn : {&g, &h}) {
    for (int ir = 0; ir <= nr; ++ir) {
      double r = double(ir) / nr;
      for (int it = 0; it < nth; ++it) {
        double th = 2 * 3.14159265358979323846 * it / nth;
        cd z = std::polar(r, th);
        double v = std::abs(fn->eval(z));
        if (v > best) {
          best = v;
          best_z = z;
          best_fn = fn;
        }
      }
    }
  }

  // Refinement: shrink a 3x3 stencil around the running maximizer. Each round
  // halves the stencil spacing, so ~30 rounds reach well below 1e-8.
  double hstep = 0.05;
  cd z0 = best_z;
  for (int round = 0; round < 34; ++round) {
    cd improved = z0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        cd z = z0 + cd(dx * hstep, dy * hstep);
        double v = std::abs(best_fn->eval(z));
        if (v > best) {
          best = v;
          improved = z;
        }
      }
    if (improved == z0) hstep *= 0.5;
    z0 = improved;
  }
  return best;
}

}  // namespace btq
