#include "btq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "btq/parallel.hpp"

namespace btq {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::adjoint() const {
  Mat m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

double Mat::frobenius() const {
  double s = 0;
  for (const cd& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double Mat::max_abs() const {
  double s = 0;
  for (const cd& v : a_) s = std::max(s, std::abs(v));
  return s;
}

double Mat::hermiticity_defect() const {
  double s = 0;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j <= i; ++j)
      s = std::max(s, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return s;
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Mat& Mat::operator*=(cd s) {
  for (cd& v : a_) v *= s;
  return *this;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Mat c(a.rows(), b.cols());
  parallel_for(a.rows(), [&](int64_t i) {
    for (int k = 0; k < a.cols(); ++k) {
      cd aik = a(int(i), k);
      if (aik == cd(0)) continue;
      for (int j = 0; j < b.cols(); ++j) c(int(i), j) += aik * b(k, j);
    }
  });
  return c;
}

Mat commutator(const Mat& a, const Mat& b) { return matmul(a, b) - matmul(b, a); }

namespace {

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form; fills d (diagonal), e (off-diagonal, e[i] couples i and i+1) and, when
// q is non-null, accumulates the unitary change of basis into it.
void tridiagonalize(Mat a, std::vector<double>& d, std::vector<double>& e, Mat* q) {
  const int n = a.rows();
  d.assign(n, 0.0);
  e.assign(std::max(n - 1, 0), 0.0);
  if (q) *q = Mat::identity(n);

  std::vector<cd> v(n), p(n), w(n);
  for (int k = 0; k + 2 < n; ++k) {
    const int m = n - k - 1;  // length of the column below the diagonal
    double xnorm2 = 0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
    double xnorm = std::sqrt(xnorm2);
    if (xnorm <= 1e-300) continue;

    cd x0 = a(k + 1, k);
    cd phase = (std::abs(x0) > 0) ? x0 / std::abs(x0) : cd(1);
    cd alpha = -phase * xnorm;

    double vnorm2 = 0;
    for (int i = 0; i < m; ++i) {
      v[i] = a(k + 1 + i, k);
      if (i == 0) v[i] -= alpha;
      vnorm2 += std::norm(v[i]);
    }
    double vnorm = std::sqrt(vnorm2);
    if (vnorm <= 1e-300) continue;
    for (int i = 0; i < m; ++i) v[i] /= vnorm;

    // Trailing-block similarity: B <- B - 2 q v* - 2 v q*, q = Bv - (v*Bv) v.
    for (int i = 0; i < m; ++i) {
      cd s = 0;
      for (int j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = s;
    }
    cd K = 0;
    for (int i = 0; i < m; ++i) K += std::conj(v[i]) * p[i];
    for (int i = 0; i < m; ++i) w[i] = p[i] - K * v[i];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        a(k + 1 + i, k + 1 + j) -= 2.0 * (w[i] * std::conj(v[j]) + v[i] * std::conj(w[j]));

    a(k + 1, k) = alpha;
    a(k, k + 1) = std::conj(alpha);
    for (int i = k + 2; i < n; ++i) {
      a(i, k) = 0;
      a(k, i) = 0;
    }

    if (q) {
      for (int r = 0; r < n; ++r) {
        cd s = 0;
        for (int j = 0; j < m; ++j) s += (*q)(r, k + 1 + j) * v[j];
        s *= 2.0;
        for (int j = 0; j < m; ++j) (*q)(r, k + 1 + j) -= s * std::conj(v[j]);
      }
    }
  }

  // Absorb the residual complex phases of the sub-diagonal into the basis so
  // the tridiagonal data is real with non-negative couplings.
  std::vector<cd> phi(n, cd(1));
  for (int i = 0; i + 1 < n; ++i) {
    cd beta = a(i + 1, i);
    double ab = std::abs(beta);
    phi[i + 1] = (ab > 0) ? phi[i] * (beta / ab) : phi[i];
    e[i] = ab;
  }
  for (int i = 0; i < n; ++i) d[i] = a(i, i).real();
  if (q)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) (*q)(r, c) *= phi[c];
}

// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
// rotating the columns of q alongside when present.
void tql_implicit(std::vector<double>& d, std::vector<double>& e, Mat* q) {
  const int n = int(d.size());
  if (n <= 1) return;
  e.push_back(0.0);  // sentinel

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("eigh: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (q) {
            for (int row = 0; row < q->rows(); ++row) {
              cd f2 = (*q)(row, i + 1);
              (*q)(row, i + 1) = s * (*q)(row, i) + c * f2;
              (*q)(row, i) = c * (*q)(row, i) - s * f2;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

}  // namespace

EigResult eigh(const Mat& m, bool want_vectors) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigh: square matrix required");
  if (m.hermiticity_defect() > 1e-8) throw std::invalid_argument("eigh: matrix is not Hermitian");
  const int n = m.rows();
  Mat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

  EigResult res;
  std::vector<double> e;
  Mat q;
  tridiagonalize(std::move(h), res.values, e, want_vectors ? &q : nullptr);
  tql_implicit(res.values, e, want_vectors ? &q : nullptr);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return res.values[a] < res.values[b]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = res.values[order[i]];
  res.values = std::move(sorted);
  if (want_vectors) {
    res.vectors = Mat(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) res.vectors(r, c) = q(r, order[c]);
  }
  return res;
}

std::vector<double> eigvalsh(const Mat& m) { return eigh(m, false).values; }

double op_norm_hermitian(const Mat& m) {
  auto vals = eigvalsh(m);
  if (vals.empty()) return 0;
  return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

double op_norm(const Mat& m) {
  if (m.rows() == m.cols() && m.hermiticity_defect() <= 1e-12 * (1.0 + m.max_abs()))
    return op_norm_hermitian(m);
  Mat g = matmul(m.adjoint(), m);
  auto vals = eigvalsh(g);
  double lmax = vals.empty() ? 0.0 : std::max(0.0, vals.back());
  return std::sqrt(lmax);
}

LsResult lstsq(const Mat& a, const std::vector<cd>& b) {
  const int m = a.rows(), n = a.cols();
  if (int(b.size()) != m) throw std::invalid_argument("lstsq: rhs length mismatch");
  if (m < n) throw std::invalid_argument("lstsq: system must be square or overdetermined");

  Mat r = a;
  std::vector<cd> y = b;
  std::vector<int> piv(n);
  std::iota(piv.begin(), piv.end(), 0);

  std::vector<cd> v(m);
  double scale = 0;  // norm of the first pivot column, the rank yardstick
  for (int k = 0; k < n; ++k) {
    // Column pivot on the exact remaining norms (cheap at these sizes).
    int best = k;
    double bestn = -1;
    for (int j = k; j < n; ++j) {
      double s = 0;
      for (int i = k; i < m; ++i) s += std::norm(r(i, j));
      if (s > bestn) {
        bestn = s;
        best = j;
      }
    }
    if (best != k) {
      for (int i = 0; i < m; ++i) std::swap(r(i, k), r(i, best));
      std::swap(piv[k], piv[best]);
    }

    double xnorm = std::sqrt(bestn);
    if (k == 0) scale = xnorm;
    if (xnorm <= std::max(1e-300, 1e-13 * scale))
      throw std::runtime_error("lstsq: rank-deficient system");
    cd x0 = r(k, k);
    cd phase = (std::abs(x0) > 0) ? x0 / std::abs(x0) : cd(1);
    cd alpha = -phase * xnorm;

    double vnorm2 = 0;
    for (int i = k; i < m; ++i) {
      v[i] = r(i, k);
      if (i == k) v[i] -= alpha;
      vnorm2 += std::norm(v[i]);
    }
    double vnorm = std::sqrt(vnorm2);
    if (vnorm <= 1e-300) {
      r(k, k) = alpha;
      continue;
    }
    for (int i = k; i < m; ++i) v[i] /= vnorm;

    for (int j = k; j < n; ++j) {
      cd s = 0;
      for (int i = k; i < m; ++i) s += std::conj(v[i]) * r(i, j);
      s *= 2.0;
      for (int i = k; i < m; ++i) r(i, j) -= s * v[i];
    }
    cd s = 0;
    for (int i = k; i < m; ++i) s += std::conj(v[i]) * y[i];
    s *= 2.0;
    for (int i = k; i < m; ++i) y[i] -= s * v[i];
    r(k, k) = alpha;
  }

  double dmax = 0, dmin = 1e300;
  for (int k = 0; k < n; ++k) {
    double dk = std::abs(r(k, k));
    dmax = std::max(dmax, dk);
    dmin = std::min(dmin, dk);
  }

  LsResult out;
  out.cond = (dmin > 0) ? dmax / dmin : 1e300;
  out.x.assign(n, cd(0));
  // Back-substitution in pivoted coordinates, then undo the permutation.
  std::vector<cd> xp(n);
  for (int k = n - 1; k >= 0; --k) {
    cd s = y[k];
    for (int j = k + 1; j < n; ++j) s -= r(k, j) * xp[j];
    xp[k] = s / r(k, k);
  }
  for (int k = 0; k < n; ++k) out.x[piv[k]] = xp[k];

  double tail = 0;
  for (int i = n; i < m; ++i) tail += std::norm(y[i]);
  out.residual = std::sqrt(tail);
  return out;
}

}  // namespace btq
