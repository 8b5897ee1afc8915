#include "bimcalc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bimcalc {

double opnorm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> hermitian_eigen(const Mat& a) {
  require(a.rows() == a.cols(), ErrorKind::Structural, "square matrix expected");
  Mat h = 0.5 * (a + a.adjoint());
  return Eigen::SelfAdjointEigenSolver<Mat>(h);
}

}  // namespace

Mat positive_sqrt(const Mat& a, bool invertible, double floor) {
  if (a.size() == 0) return a;
  auto es = hermitian_eigen(a);
  RVec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (invertible && ev(i) < floor)
      fail(ErrorKind::Precondition,
           "positive operator is singular (eigenvalue " + std::to_string(ev(i)) + ")");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat positive_inverse_sqrt(const Mat& a, double floor) {
  if (a.size() == 0) return a;
  auto es = hermitian_eigen(a);
  RVec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor)
      fail(ErrorKind::Precondition,
           "positive operator is singular (eigenvalue " + std::to_string(ev(i)) + ")");
    ev(i) = 1.0 / std::sqrt(ev(i));
  }
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat polar_unitary(const Mat& a) {
  if (a.size() == 0) return a;
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace {

// Reduces a tall matrix to its R factor so the SVD runs on a small square problem.
Mat compress_rows(const Mat& a) {
  if (a.rows() <= 2 * a.cols()) return a;
  Eigen::HouseholderQR<Mat> qr(a);
  Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  return r;
}

}  // namespace

Mat nullspace(const Mat& a, double rtol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(n, n);
  Mat r = compress_rows(a);
  Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  double cut = rtol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

int numerical_rank(const Mat& a, double rtol) {
  if (a.size() == 0) return 0;
  Mat r = a.rows() > a.cols() ? compress_rows(a) : compress_rows(Mat(a.adjoint()));
  Eigen::JacobiSVD<Mat> svd(r);
  const RVec& s = svd.singularValues();
  if (s.size() == 0) return 0;
  double cut = rtol * std::max(1.0, s(0));
  int rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return rank;
}

Mat least_squares(const Mat& a, const Mat& b, double* residual) {
  Mat x = a.completeOrthogonalDecomposition().solve(b);
  if (residual) *residual = (a * x - b).norm();
  return x;
}

Mat random_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = g(rng);
      double im = g(rng);
      out(i, j) = cplx(re, im);
    }
  return out;
}

Mat random_hermitian(Rng& rng, int n) {
  Mat a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  return u(rng);
}

std::vector<std::vector<int>> cluster_eigenvalues(const RVec& v, double gap) {
  std::vector<std::vector<int>> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (out.empty() || v(i) - v(out.back().back()) > gap)
      out.push_back({static_cast<int>(i)});
    else
      out.back().push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace bimcalc
