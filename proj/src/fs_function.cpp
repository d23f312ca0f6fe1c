#include "btq/fs_function.hpp"

#include <cmath>

namespace btq {

FsFunctionD to_numeric(const FsFunction& f) {
  FsFunctionD g;
  g.set_weight(f.weight());
  for (int p = 0; p <= f.deg_z(); ++p)
    for (int q = 0; q <= f.deg_zb(); ++q) {
      Cq v = f.at(p, q);
      if (!v.is_zero()) g.set(p, q, to_complex(v));
    }
  return g;
}

Cq eval_exact(const FsFunction& f, const Cq& z) {
  const Cq zb = z.conj();
  Cq num(0);
  Cq zp(1);
  for (int p = 0; p <= f.deg_z(); ++p) {
    Cq zq = zp;
    for (int q = 0; q <= f.deg_zb(); ++q) {
      const Cq v = f.at(p, q);
      if (!v.is_zero()) num += v * zq;
      zq *= zb;
    }
    zp *= z;
  }
  Cq den(1);
  const Cq t = Cq(1) + z * zb;
  for (int w = 0; w < f.weight(); ++w) den *= t;
  return num / den;
}

namespace {
// Chart sample spread: small, moderate and large |z|, the latter standing in
// for the neighbourhood of the point at infinity.
const cd kSamples[] = {
    {0.0, 0.0},   {0.3, 0.1},    {-0.7, 0.4}, {1.2, -0.9}, {0.05, 0.02},
    {2.0, 1.0},   {-1.6, -2.3},  {0.9, 0.0},  {8.0, -3.0}, {-20.0, 15.0},
};
}  // namespace

double eval_distance(const FsFunctionD& f, const FsFunctionD& g) {
  double worst = 0;
  for (cd z : kSamples) worst = std::max(worst, std::abs(f.eval(z) - g.eval(z)));
  return worst;
}

double eval_distance(const FsFunctionD& f, const FsFunction& g) {
  return eval_distance(f, to_numeric(g));
}

}  // namespace btq
