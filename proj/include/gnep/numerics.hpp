#pragma once

#include <span>
#include <vector>

#include "gnep/errors.hpp"

namespace gnep {

/// Dense row-major matrix for the small problems this library deals with
/// (dimensions rarely exceed ~20). Entries must stay finite; the bulk
/// constructors reject NaN/Inf.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);
  DenseMatrix(int rows, int cols, std::vector<double> entries);

  static DenseMatrix identity(int n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  DenseMatrix transposed() const;
  DenseMatrix multiply(const DenseMatrix& rhs) const;
  std::vector<double> multiply(std::span<const double> v) const;
  DenseMatrix symmetric_part() const;  // (A + A^T)/2, square only

  double max_abs() const;
  double frobenius_norm() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

/// Thin singular value decomposition A = U diag(sigma) V^T with singular
/// values sorted descending. Computed by one-sided Jacobi rotations, which is
/// accurate and simple at these sizes.
struct Svd {
  DenseMatrix u;              // m x k, k = min(m, n)
  std::vector<double> sigma;  // length k, descending, all >= 0
  DenseMatrix v;              // n x n orthogonal
};

Svd svd(const DenseMatrix& a);

/// Default rank tolerance: max(m, n) * eps * sigma_max.
double default_rank_tolerance(const DenseMatrix& a, double sigma_max);

/// Number of singular values above the tolerance. Negative tol selects the
/// default.
int rank(const DenseMatrix& a, double tol = -1.0);

/// Orthonormal basis of the kernel {z : Az = 0}, one column per basis vector.
/// Returns an n x 0 matrix when the kernel is trivial.
DenseMatrix nullspace_basis(const DenseMatrix& a, double tol = -1.0);

/// Kernel basis in row-echelon style: each free column contributes a basis
/// vector with a unit entry in that coordinate. Not orthonormal, but it
/// reproduces the basis a hand computation would pick, which keeps reduced
/// quantities comparable with closed-form values.
DenseMatrix elimination_nullspace_basis(const DenseMatrix& a, double tol = -1.0);

/// Solves Ax = b for square A. Throws SingularMatrixError when the condition
/// estimate sigma_max/sigma_min exceeds cond_limit.
std::vector<double> solve_square(const DenseMatrix& a, std::span<const double> b,
                                 double cond_limit = 1e12);

struct LeastSquaresResult {
  std::vector<double> solution;  // minimum-norm minimizer of |Az - b|_2
  double residual_norm;          // |Az - b|_2 at the solution
  int rank;
  double min_singular;  // smallest singular value of A (0 when empty)
  double max_singular;
};

LeastSquaresResult least_squares(const DenseMatrix& a, std::span<const double> b,
                                 double rank_tol = -1.0);

/// Eigenvalues of the symmetrized matrix (S + S^T)/2, ascending, by cyclic
/// Jacobi rotations driven to off-diagonal norm 1e-12.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& s);

double symmetric_min_eigenvalue(const DenseMatrix& s);

double determinant(const DenseMatrix& a);

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// maximize c.z subject to Az <= b, z free.
///
/// Two-phase dense simplex with Bland's rule; the tiny LPs this library
/// builds are frequently degenerate (t* = 0 boundary cases), so termination
/// matters more than speed. Callers must box their variables: an unbounded
/// verdict indicates a missing box constraint.
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double optimum = 0.0;
  std::vector<double> argument;
};

LpResult lp_max(std::span<const double> c, const DenseMatrix& a, std::span<const double> b);

}  // namespace gnep
