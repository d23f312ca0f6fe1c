#pragma once

// Dense complex linear algebra sized for the quantum spaces in this project
// (dim <= ~300): matrix arithmetic, a self-contained Hermitian eigensolver
// (Householder tridiagonalization + implicit-shift QL), spectral norms, and
// Householder least squares with a condition estimate.

#include <complex>
#include <vector>

namespace btq {

using cd = std::complex<double>;

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cd& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const cd& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  Mat adjoint() const;
  double frobenius() const;
  double max_abs() const;
  double hermiticity_defect() const;  // max |a_ij - conj(a_ji)|

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(cd s);
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, cd s) { return a *= s; }
  friend Mat operator*(cd s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cd> a_;
};

// Parallel dense product.
Mat matmul(const Mat& a, const Mat& b);
inline Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }
Mat commutator(const Mat& a, const Mat& b);  // ab - ba

struct EigResult {
  std::vector<double> values;  // ascending
  Mat vectors;                 // columns; empty when not requested
};

// Eigenvalues (and optionally vectors) of a Hermitian matrix. The input is
// symmetrized once; a hermiticity defect above 1e-8 is a contract violation.
EigResult eigh(const Mat& m, bool want_vectors = false);
std::vector<double> eigvalsh(const Mat& m);

// Spectral norm: Hermitian fast path, general case via the Gram matrix.
double op_norm_hermitian(const Mat& m);
double op_norm(const Mat& m);

struct LsResult {
  std::vector<cd> x;
  double residual = 0;  // ||Ax - b||
  double cond = 0;      // diagonal-ratio estimate from the pivoted QR factor
};

// Minimum-norm-residual solve of an overdetermined system by Householder QR
// with column pivoting. Requires rows >= cols and full column rank.
LsResult lstsq(const Mat& a, const std::vector<cd>& b);

}  // namespace btq
