#include "btq/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "btq/geometry.hpp"
#include "btq/parallel.hpp"

namespace btq {

namespace {

// All beta values at one level; the matrix builders index this table instead
// of recomputing factorial ratios per entry.
std::vector<Rational> beta_table(int w) {
  std::vector<Rational> t(size_t(w) + 1);
  for (int j = 0; j <= w; ++j) t[size_t(j)] = beta_integral(unsigned(j), unsigned(w));
  return t;
}

// <f z^b, z^a> with beta precomputed at level w = weight(f) + d. Only the
// numerator diagonal p - q = a - b contributes; p + b <= w holds whenever f is
// globally smooth, so the table lookup never leaves range.
Cq raw_entry(const FsFunction& f, const std::vector<Rational>& beta, int a, int b) {
  Cq out(0);
  for (int p = 0; p <= f.deg_z(); ++p) {
    int q = p - (a - b);
    if (q < 0 || q > f.deg_zb()) continue;
    Cq c = f.at(p, q);
    if (!c.is_zero()) out += Cq(beta[size_t(p + b)]) * c;
  }
  return out;
}

cd round_entry(const Cq& r, const Rational& den) {
  return {r.re == 0 ? 0.0 : div_sqrt(r.re, den), r.im == 0 ? 0.0 : div_sqrt(r.im, den)};
}

FsFunction smooth_symbol(const FsFunction& f) {
  FsFunction g = f;
  g.canonicalize();
  if (!g.globally_smooth()) throw std::invalid_argument("toeplitz: symbol must be globally smooth");
  return g;
}

void check_same_grid(const OperatorFamily& f, const OperatorFamily& g) {
  if (f.ks != g.ks) throw std::invalid_argument("operator families: k-grids do not match");
  for (size_t i = 0; i < f.ks.size(); ++i)
    if (f.mats[i].spec != g.mats[i].spec)
      throw std::invalid_argument("operator families: bundle shapes do not match");
}

}  // namespace

ExactOperator::ExactOperator(BundleSpec spec, std::vector<Cq> pairing_table)
    : spec_(spec), gram_(gram(spec)), r_(std::move(pairing_table)) {
  if (spec_.dim() > kExactDimCap)
    throw std::invalid_argument("ExactOperator: dimension exceeds the exact-mode cap");
  if (r_.size() != size_t(spec_.dim()) * spec_.dim())
    throw std::invalid_argument("ExactOperator: pairing table has the wrong size");
}

ExactOperator ExactOperator::identity_op(const BundleSpec& spec) {
  GramData gd = gram(spec);
  const int dim = spec.dim();
  std::vector<Cq> r(size_t(dim) * dim);
  for (int a = 0; a < dim; ++a) r[size_t(a) * dim + a] = Cq(gd.n[size_t(a)]);
  return ExactOperator(spec, std::move(r));
}

const Cq& ExactOperator::pairing(int a, int b) const {
  if (a < 0 || a >= dim() || b < 0 || b >= dim())
    throw std::invalid_argument("ExactOperator: index out of range");
  return r_[size_t(a) * dim() + b];
}

bool ExactOperator::is_hermitian() const {
  const int n = dim();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      if (r_[size_t(a) * n + b] != r_[size_t(b) * n + a].conj()) return false;
  return true;
}

bool ExactOperator::is_diagonal() const {
  const int n = dim();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && !r_[size_t(a) * n + b].is_zero()) return false;
  return true;
}

std::vector<Rational> ExactOperator::diagonal() const {
  const int n = dim();
  std::vector<Rational> out(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    const Cq& v = r_[size_t(a) * n + a];
    if (!v.is_real()) throw std::domain_error("ExactOperator: diagonal entry is not real");
    out[size_t(a)] = v.re / gram_.n[size_t(a)];
  }
  return out;
}

Rational ExactOperator::frobenius2() const {
  const int n = dim();
  Rational s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Cq& v = r_[size_t(a) * n + b];
      if (!v.is_zero()) s += v.norm2() / (gram_.n[size_t(a)] * gram_.n[size_t(b)]);
    }
  return s;
}

Rational ExactOperator::op_norm_diagonal() const {
  if (!is_diagonal()) throw std::invalid_argument("op_norm_diagonal: operator is not diagonal");
  Rational best = 0;
  for (const Rational& x : diagonal()) {
    Rational a = x < 0 ? Rational(-x) : x;
    if (a > best) best = a;
  }
  return best;
}

Mat ExactOperator::to_mat() const {
  const int n = dim();
  Mat m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Cq& v = r_[size_t(a) * n + b];
      if (!v.is_zero()) m(a, b) = round_entry(v, gram_.n[size_t(a)] * gram_.n[size_t(b)]);
    }
  return m;
}

HoloSection ExactOperator::apply(const HoloSection& s) const {
  if (s.spec != spec_) throw std::invalid_argument("ExactOperator: section level mismatch");
  const int n = dim();
  if (int(s.coeff.size()) != n) throw std::invalid_argument("ExactOperator: section length mismatch");
  HoloSection out{spec_, std::vector<Cq>(size_t(n))};
  for (int a = 0; a < n; ++a) {
    Cq acc(0);
    for (int b = 0; b < n; ++b) {
      const Cq& v = r_[size_t(a) * n + b];
      if (!v.is_zero() && !s.coeff[size_t(b)].is_zero()) acc += v * s.coeff[size_t(b)];
    }
    out.coeff[size_t(a)] = acc * Cq(Rational(1) / gram_.n[size_t(a)]);
  }
  return out;
}

ExactOperator ExactOperator::adjoint() const {
  const int n = dim();
  ExactOperator out = *this;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.r_[size_t(a) * n + b] = r_[size_t(b) * n + a].conj();
  return out;
}

ExactOperator& ExactOperator::operator+=(const ExactOperator& o) {
  if (spec_ != o.spec_) throw std::invalid_argument("ExactOperator: level mismatch");
  for (size_t i = 0; i < r_.size(); ++i) r_[i] += o.r_[i];
  return *this;
}

ExactOperator& ExactOperator::operator-=(const ExactOperator& o) {
  if (spec_ != o.spec_) throw std::invalid_argument("ExactOperator: level mismatch");
  for (size_t i = 0; i < r_.size(); ++i) r_[i] -= o.r_[i];
  return *this;
}

ExactOperator& ExactOperator::operator*=(const Cq& c) {
  for (Cq& v : r_) v *= c;
  return *this;
}

ExactOperator operator*(const ExactOperator& a, const ExactOperator& b) {
  if (a.spec_ != b.spec_) throw std::invalid_argument("ExactOperator: level mismatch");
  const int n = a.dim();
  std::vector<Rational> inv_n(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) inv_n[size_t(c)] = Rational(1) / a.gram_.n[size_t(c)];
  std::vector<Cq> r(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) {
      const Cq& l = a.r_[size_t(i) * n + c];
      if (l.is_zero()) continue;
      Cq w = l * Cq(inv_n[size_t(c)]);
      for (int j = 0; j < n; ++j) {
        const Cq& v = b.r_[size_t(c) * n + j];
        if (!v.is_zero()) r[size_t(i) * n + j] += w * v;
      }
    }
  return ExactOperator(a.spec_, std::move(r));
}

ExactOperator commutator(const ExactOperator& a, const ExactOperator& b) { return a * b - b * a; }

Cq toeplitz_pairing(const FsFunction& f, const BundleSpec& spec, int a, int b) {
  spec.validate();
  const int d = spec.d();
  if (a < 0 || a > d || b < 0 || b > d)
    throw std::invalid_argument("toeplitz_pairing: index out of range");
  FsFunction g = f;
  g.canonicalize();
  const int w = g.weight() + d;
  Cq out(0);
  for (int p = 0; p <= g.deg_z(); ++p) {
    int q = p - (a - b);
    if (q < 0 || q > g.deg_zb()) continue;
    Cq c = g.at(p, q);
    if (!c.is_zero()) out += Cq(beta_integral(unsigned(p + b), unsigned(w))) * c;
  }
  return out;
}

ExactOperator toeplitz_exact(const FsFunction& f, const BundleSpec& spec) {
  spec.validate();
  if (spec.dim() > kExactDimCap)
    throw std::invalid_argument("toeplitz_exact: dimension exceeds the exact-mode cap");
  FsFunction g = smooth_symbol(f);
  const int d = spec.d(), dim = d + 1;
  auto beta = beta_table(g.weight() + d);
  std::vector<Cq> r(size_t(dim) * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      if (a - b > g.deg_z() || b - a > g.deg_zb()) continue;
      r[size_t(a) * dim + b] = raw_entry(g, beta, a, b);
    }
  return ExactOperator(spec, std::move(r));
}

namespace {

// Realizes and canonicalizes the column images, rejecting terms that make the
// compression integral diverge at this level.
std::vector<FsFunction> materialize_columns(const BundleSpec& spec,
                                            const std::function<FsFunction(int)>& column) {
  const int d = spec.d(), dim = d + 1;
  std::vector<FsFunction> cols(static_cast<size_t>(dim));
  for (int b = 0; b < dim; ++b) {
    cols[size_t(b)] = column(b);
    cols[size_t(b)].canonicalize();
  }
  for (const FsFunction& v : cols) {
    if (v.is_zero_fn()) continue;
    const int w = v.weight() + d;
    for (int p = w + 1; p <= v.deg_z(); ++p)
      for (int q = 0; q <= v.deg_zb(); ++q)
        if (p - q >= 0 && p - q <= d && !v.at(p, q).is_zero())
          throw std::domain_error("matrix_from_columns: column does not decay");
  }
  return cols;
}

// Exact pairing table of the operator z^b -> cols[b], with beta tables
// shared across columns of equal weight.
std::vector<Cq> column_pairings(const BundleSpec& spec, const std::vector<FsFunction>& cols) {
  const int d = spec.d(), dim = d + 1;
  std::map<int, std::vector<Rational>> tables;
  for (const FsFunction& v : cols)
    if (!v.is_zero_fn()) tables.emplace(v.weight() + d, std::vector<Rational>{});
  for (auto& [w, t] : tables) t = beta_table(w);

  std::vector<Cq> r(size_t(dim) * dim);
  parallel_for(dim, [&](int64_t bi) {
    const int b = int(bi);
    const FsFunction& v = cols[size_t(b)];
    if (v.is_zero_fn()) return;
    const int w = v.weight() + d;
    const auto& beta = tables.at(w);
    for (int a = 0; a < dim; ++a) {
      Cq acc(0);
      // selection rule: only numerator terms with p - q = a contribute
      for (int q = 0; q <= v.deg_zb() && q + a <= std::min(v.deg_z(), w); ++q) {
        Cq c = v.at(q + a, q);
        if (!c.is_zero()) acc += Cq(beta[size_t(q + a)]) * c;
      }
      r[size_t(a) * dim + b] = acc;
    }
  });
  return r;
}

// Past this weight the central beta values leave the normal double range.
constexpr int kNumericBetaWeightCap = 960;

// Numeric twin of column_pairings for large levels, where the exact pairings
// carry hundreds of digits per entry and dominate the build time. Beta-ratio
// roundoff sits near 1e-15, far under the float consumers' gates, and the
// Gram normalization folds in during accumulation.
Mat numeric_column_matrix(const BundleSpec& spec, const std::vector<FsFunction>& cols) {
  const int d = spec.d(), dim = d + 1;
  std::map<int, std::vector<double>> tables;
  for (const FsFunction& v : cols)
    if (!v.is_zero_fn()) tables.emplace(v.weight() + d, std::vector<double>{});
  for (auto& [w, t] : tables) {
    t.resize(size_t(w) + 1);
    for (int j = 0; j <= w; ++j)
      t[size_t(j)] = to_double(beta_integral(unsigned(j), unsigned(w)));
  }
  GramData gd = gram(spec);
  Mat m(dim, dim);
  parallel_for(dim, [&](int64_t bi) {
    const int b = int(bi);
    const FsFunction& v = cols[size_t(b)];
    if (v.is_zero_fn()) return;
    const int w = v.weight() + d;
    const auto& beta = tables.at(w);
    for (int a = 0; a < dim; ++a) {
      cd acc = 0;
      for (int q = 0; q <= v.deg_zb() && q + a <= std::min(v.deg_z(), w); ++q) {
        Cq c = v.at(q + a, q);
        if (!c.is_zero()) acc += beta[size_t(q + a)] * cd(to_double(c.re), to_double(c.im));
      }
      if (acc != cd(0)) m(a, b) = acc / (gd.sqrt_n[size_t(a)] * gd.sqrt_n[size_t(b)]);
    }
  });
  return m;
}

// Orthonormal-basis matrix from a raw pairing table, rounded once per entry.
Mat rounded_matrix(const BundleSpec& spec, const std::vector<Cq>& r) {
  const int dim = spec.dim();
  GramData gd = gram(spec);
  Mat m(dim, dim);
  parallel_for(dim, [&](int64_t a) {
    for (int b = 0; b < dim; ++b) {
      const Cq& v = r[size_t(a) * dim + b];
      if (!v.is_zero()) m(int(a), b) = round_entry(v, gd.n[size_t(a)] * gd.n[size_t(b)]);
    }
  });
  return m;
}

// z^b mult + b z^(b-1) vel, the explicit column of the first-order operator.
FsFunction first_order_column(const FsFunction& mult, const FsFunction& vel, int b) {
  FsFunction r = FsFunction::monomial(b, 0, Cq(1), 0) * mult;
  if (b > 0) r = r + Cq(b) * (FsFunction::monomial(b - 1, 0, Cq(1), 0) * vel);
  return r;
}

// The largest beta index the split parts reach is d + min(p, q) for a mult
// term and d + min(p - 1, q) for a vel term; both must stay within w + d.
bool split_in_beta_range(const FsFunction& mult, const FsFunction& vel) {
  for (int p = 0; p <= mult.deg_z(); ++p)
    for (int q = 0; q <= mult.deg_zb(); ++q)
      if (!mult.at(p, q).is_zero() && std::min(p, q) > mult.weight()) return false;
  for (int p = 0; p <= vel.deg_z(); ++p)
    for (int q = 0; q <= vel.deg_zb(); ++q)
      if (!vel.at(p, q).is_zero() && std::min(p - 1, q) > vel.weight()) return false;
  return true;
}

// Exact raw pairings of the first-order operator, one beta table per part.
std::vector<Cq> first_order_pairings(const FsFunction& mult, const FsFunction& vel,
                                     const BundleSpec& spec) {
  const int d = spec.d(), dim = d + 1;
  const auto bm = mult.is_zero_fn() ? std::vector<Rational>{} : beta_table(mult.weight() + d);
  const auto bv = vel.is_zero_fn() ? std::vector<Rational>{} : beta_table(vel.weight() + d);
  std::vector<Cq> r(size_t(dim) * dim);
  parallel_for(dim, [&](int64_t bi) {
    const int b = int(bi);
    for (int p = 0; p <= mult.deg_z(); ++p)
      for (int q = 0; q <= mult.deg_zb(); ++q) {
        const int a = b + p - q;
        if (a < 0 || a > d) continue;
        Cq c = mult.at(p, q);
        if (!c.is_zero()) r[size_t(a) * dim + b] += Cq(bm[size_t(p + b)]) * c;
      }
    if (b == 0) return;
    for (int p = 0; p <= vel.deg_z(); ++p)
      for (int q = 0; q <= vel.deg_zb(); ++q) {
        const int a = b - 1 + p - q;
        if (a < 0 || a > d) continue;
        Cq c = vel.at(p, q);
        if (!c.is_zero()) r[size_t(a) * dim + b] += Cq(Rational(b) * bv[size_t(p + b - 1)]) * c;
      }
  });
  return r;
}

// Numeric twin of first_order_pairings with the Gram normalization folded in.
Mat first_order_numeric(const FsFunction& mult, const FsFunction& vel, const BundleSpec& spec) {
  const int d = spec.d(), dim = d + 1;
  auto dtable = [&](const FsFunction& f) {
    std::vector<double> t;
    if (f.is_zero_fn()) return t;
    const int w = f.weight() + d;
    t.resize(size_t(w) + 1);
    for (int j = 0; j <= w; ++j) t[size_t(j)] = to_double(beta_integral(unsigned(j), unsigned(w)));
    return t;
  };
  const std::vector<double> bm = dtable(mult), bv = dtable(vel);
  GramData gd = gram(spec);
  Mat m(dim, dim);
  parallel_for(dim, [&](int64_t bi) {
    const int b = int(bi);
    for (int p = 0; p <= mult.deg_z(); ++p)
      for (int q = 0; q <= mult.deg_zb(); ++q) {
        const int a = b + p - q;
        if (a < 0 || a > d) continue;
        Cq c = mult.at(p, q);
        if (!c.is_zero())
          m(a, b) += bm[size_t(p + b)] * cd(to_double(c.re), to_double(c.im));
      }
    if (b > 0)
      for (int p = 0; p <= vel.deg_z(); ++p)
        for (int q = 0; q <= vel.deg_zb(); ++q) {
          const int a = b - 1 + p - q;
          if (a < 0 || a > d) continue;
          Cq c = vel.at(p, q);
          if (!c.is_zero())
            m(a, b) += double(b) * bv[size_t(p + b - 1)] * cd(to_double(c.re), to_double(c.im));
        }
    for (int a = 0; a < dim; ++a)
      if (m(a, b) != cd(0)) m(a, b) /= gd.sqrt_n[size_t(a)] * gd.sqrt_n[size_t(b)];
  });
  return m;
}

}  // namespace

ExactOperator operator_from_columns(const BundleSpec& spec,
                                    const std::function<FsFunction(int)>& column) {
  spec.validate();
  return ExactOperator(spec, column_pairings(spec, materialize_columns(spec, column)));
}

OperatorMatrix matrix_from_columns(const BundleSpec& spec,
                                   const std::function<FsFunction(int)>& column, bool keep_exact) {
  spec.validate();
  if (keep_exact) {
    ExactOperator ex = operator_from_columns(spec, column);
    Mat m = ex.to_mat();
    return {spec, std::move(m), std::move(ex)};
  }
  const int dim = spec.dim();
  std::vector<FsFunction> cols = materialize_columns(spec, column);
  int wmax = 0;
  for (const FsFunction& v : cols)
    if (!v.is_zero_fn()) wmax = std::max(wmax, v.weight() + spec.d());
  if (dim > kExactDimCap && wmax <= kNumericBetaWeightCap)
    return {spec, numeric_column_matrix(spec, cols), std::nullopt};
  // Small levels keep the exact pairings: they are cheap there and round once
  // at the end, so conjugate-symmetric tables stay bit-exact in float.
  return {spec, rounded_matrix(spec, column_pairings(spec, cols)), std::nullopt};
}

ExactOperator first_order_compression_exact(const FsFunction& mult, const FsFunction& vel,
                                            const BundleSpec& spec) {
  spec.validate();
  FsFunction u = mult, v = vel;
  u.canonicalize();
  v.canonicalize();
  if (!split_in_beta_range(u, v))
    return operator_from_columns(spec, [&](int b) { return first_order_column(u, v, b); });
  return ExactOperator(spec, first_order_pairings(u, v, spec));
}

OperatorMatrix first_order_compression(const FsFunction& mult, const FsFunction& vel,
                                       const BundleSpec& spec, bool keep_exact) {
  spec.validate();
  FsFunction u = mult, v = vel;
  u.canonicalize();
  v.canonicalize();
  if (keep_exact) {
    ExactOperator ex = first_order_compression_exact(u, v, spec);
    Mat m = ex.to_mat();
    return {spec, std::move(m), std::move(ex)};
  }
  if (!split_in_beta_range(u, v))
    return matrix_from_columns(spec, [&](int b) { return first_order_column(u, v, b); }, false);
  const int wmax =
      std::max(u.is_zero_fn() ? 0 : u.weight() + spec.d(), v.is_zero_fn() ? 0 : v.weight() + spec.d());
  if (spec.dim() > kExactDimCap && wmax <= kNumericBetaWeightCap)
    return {spec, first_order_numeric(u, v, spec), std::nullopt};
  return {spec, rounded_matrix(spec, first_order_pairings(u, v, spec)), std::nullopt};
}

OperatorMatrix toeplitz(const FsFunction& f, const BundleSpec& spec, bool keep_exact) {
  spec.validate();
  if (keep_exact) {
    ExactOperator ex = toeplitz_exact(f, spec);
    Mat m = ex.to_mat();
    return {spec, std::move(m), std::move(ex)};
  }
  FsFunction g = smooth_symbol(f);
  const int d = spec.d(), dim = d + 1;
  auto beta = beta_table(g.weight() + d);
  GramData gd = gram(spec);
  Mat m(dim, dim);
  parallel_for(dim, [&](int64_t row) {
    const int a = int(row);
    const int blo = std::max(0, a - g.deg_z());
    const int bhi = std::min(d, a + g.deg_zb());
    for (int b = blo; b <= bhi; ++b) {
      Cq r = raw_entry(g, beta, a, b);
      if (!r.is_zero()) m(a, b) = round_entry(r, gd.n[size_t(a)] * gd.n[size_t(b)]);
    }
  });
  return {spec, std::move(m), std::nullopt};
}

double op_norm(const OperatorMatrix& m) {
  if (m.entries.hermiticity_defect() <= 1e-12 * (1 + m.entries.max_abs()))
    return op_norm_hermitian(m.entries);
  return op_norm(m.entries);
}

const OperatorMatrix& OperatorFamily::at_k(int k) const {
  for (size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k) return mats[i];
  throw std::invalid_argument("OperatorFamily: no member at the requested k");
}

std::vector<int> default_k_grid() { return {8, 12, 16, 24, 32, 48, 64, 96, 128}; }

OperatorFamily toeplitz_family(const FsFunction& f, const std::vector<int>& ks, int twist_m,
                               bool half_form, std::string provenance) {
  if (ks.empty()) throw std::invalid_argument("toeplitz_family: empty k-grid");
  for (size_t i = 0; i < ks.size(); ++i)
    if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1]))
      throw std::invalid_argument("toeplitz_family: k-grid must be strictly increasing and >= 1");
  FsFunction g = smooth_symbol(f);
  OperatorFamily fam;
  fam.provenance = std::move(provenance);
  fam.ks = ks;
  fam.mats.resize(ks.size());
  parallel_for(int64_t(ks.size()), [&](int64_t i) {
    BundleSpec spec =
        half_form ? half_form_spec(ks[size_t(i)], twist_m) : plain_spec(ks[size_t(i)], twist_m);
    fam.mats[size_t(i)] = toeplitz(g, spec);
  });
  return fam;
}

OperatorFamily product_family(const OperatorFamily& f, const OperatorFamily& g) {
  check_same_grid(f, g);
  OperatorFamily out;
  out.provenance = "product(" + f.provenance + ", " + g.provenance + ")";
  out.ks = f.ks;
  out.mats.resize(f.ks.size());
  parallel_for(int64_t(f.ks.size()), [&](int64_t i) {
    const OperatorMatrix& a = f.mats[size_t(i)];
    const OperatorMatrix& b = g.mats[size_t(i)];
    OperatorMatrix m{a.spec, matmul(a.entries, b.entries), std::nullopt};
    if (a.exact && b.exact) m.exact = (*a.exact) * (*b.exact);
    out.mats[size_t(i)] = std::move(m);
  });
  return out;
}

OperatorFamily commutator_family(const OperatorFamily& f, const OperatorFamily& g, bool scale_ik) {
  check_same_grid(f, g);
  OperatorFamily out;
  out.provenance = std::string(scale_ik ? "commutator_ik(" : "commutator(") + f.provenance + ", " +
                   g.provenance + ")";
  out.ks = f.ks;
  out.mats.resize(f.ks.size());
  parallel_for(int64_t(f.ks.size()), [&](int64_t i) {
    const int k = f.ks[size_t(i)];
    const OperatorMatrix& a = f.mats[size_t(i)];
    const OperatorMatrix& b = g.mats[size_t(i)];
    Mat c = commutator(a.entries, b.entries);
    if (scale_ik) c *= cd(0, double(k));
    OperatorMatrix m{a.spec, std::move(c), std::nullopt};
    if (a.exact && b.exact) {
      ExactOperator ce = commutator(*a.exact, *b.exact);
      if (scale_ik) ce *= Cq(Rational(0), Rational(k));
      m.exact = std::move(ce);
    }
    out.mats[size_t(i)] = std::move(m);
  });
  return out;
}

OperatorFamily scale_by_inverse_k(const OperatorFamily& f) {
  OperatorFamily out;
  out.provenance = "inv_k(" + f.provenance + ")";
  out.ks = f.ks;
  out.mats.resize(f.ks.size());
  parallel_for(int64_t(f.ks.size()), [&](int64_t i) {
    const int k = f.ks[size_t(i)];
    OperatorMatrix m = f.mats[size_t(i)];
    m.entries *= cd(1.0 / k);
    if (m.exact) *m.exact *= Cq(Rational(1) / k);
    out.mats[size_t(i)] = std::move(m);
  });
  return out;
}

OperatorFamily adjoint_family(const OperatorFamily& f) {
  OperatorFamily out;
  out.provenance = "adjoint(" + f.provenance + ")";
  out.ks = f.ks;
  out.mats.resize(f.ks.size());
  parallel_for(int64_t(f.ks.size()), [&](int64_t i) {
    const OperatorMatrix& a = f.mats[size_t(i)];
    OperatorMatrix m{a.spec, a.entries.adjoint(), std::nullopt};
    if (a.exact) m.exact = a.exact->adjoint();
    out.mats[size_t(i)] = std::move(m);
  });
  return out;
}

OperatorFamily k_scaled_difference(const OperatorFamily& a, const OperatorFamily& b) {
  check_same_grid(a, b);
  OperatorFamily out;
  out.provenance = "k_diff(" + a.provenance + ", " + b.provenance + ")";
  out.ks = a.ks;
  out.mats.resize(a.ks.size());
  parallel_for(int64_t(a.ks.size()), [&](int64_t i) {
    const int k = a.ks[size_t(i)];
    const OperatorMatrix& x = a.mats[size_t(i)];
    const OperatorMatrix& y = b.mats[size_t(i)];
    Mat d = x.entries - y.entries;
    d *= cd(double(k));
    OperatorMatrix m{x.spec, std::move(d), std::nullopt};
    if (x.exact && y.exact) {
      ExactOperator e = *x.exact;
      e -= *y.exact;
      e *= Cq(Rational(k));
      m.exact = std::move(e);
    }
    out.mats[size_t(i)] = std::move(m);
  });
  return out;
}

std::vector<std::pair<int, double>> residual_norm_table(const OperatorFamily& a,
                                                        const OperatorFamily& b) {
  check_same_grid(a, b);
  std::vector<std::pair<int, double>> out(a.ks.size());
  parallel_for(int64_t(a.ks.size()), [&](int64_t i) {
    OperatorMatrix diff{a.mats[size_t(i)].spec,
                        a.mats[size_t(i)].entries - b.mats[size_t(i)].entries, std::nullopt};
    out[size_t(i)] = {a.ks[size_t(i)], op_norm(diff)};
  });
  return out;
}

NormAsymptotics norm_asymptotics(const OperatorFamily& fam, const FsFunction& f,
                                 const FitWindow& window) {
  if (fam.ks.empty()) throw std::invalid_argument("norm_asymptotics: empty family");
  NormAsymptotics out;
  out.sup = sup_abs_sphere(f);
  out.residuals.resize(fam.ks.size());
  parallel_for(int64_t(fam.ks.size()), [&](int64_t i) {
    out.residuals[size_t(i)] = {fam.ks[size_t(i)],
                                std::abs(op_norm(fam.mats[size_t(i)]) - out.sup)};
  });
  bool all_tiny = true;
  for (const auto& [k, r] : out.residuals) all_tiny = all_tiny && r <= 1e-12;
  if (all_tiny) {
    out.report.table = out.residuals;
    out.report.k_min = window.k_min;
    out.report.r2 = 1;
    out.report.verdict = "exact";
    out.alpha = 0;
    return out;
  }
  out.report = fit_rate(out.residuals, window);
  out.alpha = -out.report.slope;
  return out;
}

}  // namespace btq
