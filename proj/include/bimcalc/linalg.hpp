#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimcalc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

// Operator-norm tolerance used when a caller does not pass one.
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorKind { Structural, Precondition, Numerical, Parse };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

// Spectral norm; 0 for empty matrices.
double opnorm(const Mat& a);

// Largest residual; NaN wins so a broken computation never looks small.
inline double worst(std::initializer_list<double> xs) {
  double r = 0;
  for (double x : xs)
    if (!(x <= r)) r = x;
  return r;
}

Mat kron(const Mat& a, const Mat& b);

// Square root of a Hermitian positive matrix. Eigenvalues below `floor` are an error
// when `invertible` is set, and are clamped to zero otherwise.
Mat positive_sqrt(const Mat& a, bool invertible, double floor = 1e-12);
Mat positive_inverse_sqrt(const Mat& a, double floor = 1e-12);

// Unitary factor of the polar decomposition of an invertible square matrix.
Mat polar_unitary(const Mat& a);

// Orthonormal basis (columns) of the null space of `a`; singular values below
// rtol * max(1, largest singular value) count as zero.
Mat nullspace(const Mat& a, double rtol = 1e-9);
int numerical_rank(const Mat& a, double rtol = 1e-9);

// Least-squares solution of a x = b together with ||a x - b||.
Mat least_squares(const Mat& a, const Mat& b, double* residual = nullptr);

Mat random_matrix(Rng& rng, int rows, int cols);
Mat random_hermitian(Rng& rng, int n);
double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

// Groups sorted real values into clusters whose consecutive gaps exceed `gap`.
std::vector<std::vector<int>> cluster_eigenvalues(const RVec& sorted_values, double gap);

}  // namespace bimcalc
