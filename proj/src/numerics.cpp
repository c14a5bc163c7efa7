#include "gnep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gnep {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_finite(const std::vector<double>& entries) {
  for (double e : entries) {
    if (!std::isfinite(e)) throw Error("matrix entry is not finite");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0) throw Error("negative matrix dimension");
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows < 0 || cols < 0) throw Error("negative matrix dimension");
  if (a_.size() != static_cast<std::size_t>(rows) * cols)
    throw Error("matrix entry count does not match dimensions");
  check_finite(a_);
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  DenseMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw Error("ragged rows");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  check_finite(m.a_);
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error("matrix product dimension mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != cols_) throw Error("matrix-vector dimension mismatch");
  std::vector<double> out(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

DenseMatrix DenseMatrix::symmetric_part() const {
  if (rows_ != cols_) throw Error("symmetric_part requires a square matrix");
  DenseMatrix s(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
  return s;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double e : a_) m = std::max(m, std::fabs(e));
  return m;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double e : a_) s += e * e;
  return std::sqrt(s);
}

Svd svd(const DenseMatrix& a) {
  const int m = a.rows();
  const int n = a.cols();
  const int p = std::max(m, n);

  // Work on a copy padded with zero rows so there are always at least as many
  // rows as columns; padding leaves A^T A and hence sigma and V unchanged.
  DenseMatrix w(p, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);
  DenseMatrix v = DenseMatrix::identity(n);

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int c1 = 0; c1 < n - 1; ++c1) {
      for (int c2 = c1 + 1; c2 < n; ++c2) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < p; ++i) {
          alpha += w(i, c1) * w(i, c1);
          beta += w(i, c2) * w(i, c2);
          gamma += w(i, c1) * w(i, c2);
        }
        if (std::fabs(gamma) <= 1e-30 ||
            std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < p; ++i) {
          const double w1 = w(i, c1), w2 = w(i, c2);
          w(i, c1) = cs * w1 - sn * w2;
          w(i, c2) = sn * w1 + cs * w2;
        }
        for (int i = 0; i < n; ++i) {
          const double v1 = v(i, c1), v2 = v(i, c2);
          v(i, c1) = cs * v1 - sn * v2;
          v(i, c2) = sn * v1 + cs * v2;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < p; ++i) s += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(s);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return sigma[x] > sigma[y]; });

  Svd out;
  out.sigma.resize(n);
  out.u = DenseMatrix(m, n);
  out.v = DenseMatrix(n, n);
  for (int jj = 0; jj < n; ++jj) {
    const int j = order[jj];
    out.sigma[jj] = sigma[j];
    for (int i = 0; i < n; ++i) out.v(i, jj) = v(i, j);
    if (sigma[j] > 0.0) {
      for (int i = 0; i < m; ++i) out.u(i, jj) = w(i, j) / sigma[j];
    }
  }
  return out;
}

double default_rank_tolerance(const DenseMatrix& a, double sigma_max) {
  return std::max(a.rows(), a.cols()) * kEps * sigma_max;
}

namespace {

double effective_tol(const DenseMatrix& a, const std::vector<double>& sigma, double tol) {
  const double smax = sigma.empty() ? 0.0 : sigma.front();
  if (tol >= 0.0) return tol * std::max(smax, 1e-300);
  return default_rank_tolerance(a, smax);
}

}  // namespace

int rank(const DenseMatrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const Svd s = svd(a);
  const double t = effective_tol(a, s.sigma, tol);
  int r = 0;
  const int k = std::min(a.rows(), a.cols());
  for (int i = 0; i < k; ++i)
    if (s.sigma[i] > t) ++r;
  return r;
}

DenseMatrix nullspace_basis(const DenseMatrix& a, double tol) {
  const int n = a.cols();
  if (a.rows() == 0) return DenseMatrix::identity(n);
  const Svd s = svd(a);
  const double t = effective_tol(a, s.sigma, tol);
  std::vector<int> keep;
  for (int j = 0; j < n; ++j)
    if (s.sigma[j] <= t) keep.push_back(j);
  DenseMatrix basis(n, static_cast<int>(keep.size()));
  for (int jj = 0; jj < static_cast<int>(keep.size()); ++jj)
    for (int i = 0; i < n; ++i) basis(i, jj) = s.v(i, keep[jj]);
  return basis;
}

DenseMatrix elimination_nullspace_basis(const DenseMatrix& a, double tol) {
  const int m = a.rows();
  const int n = a.cols();
  if (m == 0) return DenseMatrix::identity(n);

  DenseMatrix r = a;
  const double scale = std::max(r.max_abs(), 1e-300);
  const double piv_tol = (tol >= 0.0 ? tol : 1e-12) * scale;

  std::vector<int> pivot_col_of_row;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int best = -1;
    double best_abs = piv_tol;
    for (int i = row; i < m; ++i) {
      if (std::fabs(r(i, col)) > best_abs) {
        best_abs = std::fabs(r(i, col));
        best = i;
      }
    }
    if (best < 0) continue;
    for (int j = 0; j < n; ++j) std::swap(r(row, j), r(best, j));
    const double piv = r(row, col);
    for (int j = 0; j < n; ++j) r(row, j) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = r(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) r(i, j) -= f * r(row, j);
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col_of_row) is_pivot[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);

  DenseMatrix basis(n, static_cast<int>(free_cols.size()));
  for (int jj = 0; jj < static_cast<int>(free_cols.size()); ++jj) {
    const int fc = free_cols[jj];
    basis(fc, jj) = 1.0;
    for (int pr = 0; pr < static_cast<int>(pivot_col_of_row.size()); ++pr)
      basis(pivot_col_of_row[pr], jj) = -r(pr, fc);
  }
  return basis;
}

std::vector<double> solve_square(const DenseMatrix& a, std::span<const double> b,
                                 double cond_limit) {
  const int n = a.rows();
  if (a.cols() != n) throw Error("solve_square requires a square matrix");
  if (static_cast<int>(b.size()) != n) throw Error("right-hand side dimension mismatch");
  if (n == 0) return {};

  const Svd s = svd(a);
  const double smax = s.sigma.front();
  const double smin = s.sigma.back();
  if (smax <= 0.0 || smin <= 0.0 || smax / smin > cond_limit)
    throw SingularMatrixError("matrix is singular to working precision");

  auto apply_inverse = [&](std::span<const double> rhs) {
    std::vector<double> x(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double utb = 0.0;
      for (int i = 0; i < n; ++i) utb += s.u(i, j) * rhs[i];
      const double f = utb / s.sigma[j];
      for (int i = 0; i < n; ++i) x[i] += s.v(i, j) * f;
    }
    return x;
  };

  std::vector<double> x = apply_inverse(b);
  // One step of iterative refinement.
  std::vector<double> res(n);
  const std::vector<double> ax = a.multiply(x);
  for (int i = 0; i < n; ++i) res[i] = b[i] - ax[i];
  const std::vector<double> dx = apply_inverse(res);
  for (int i = 0; i < n; ++i) x[i] += dx[i];
  return x;
}

LeastSquaresResult least_squares(const DenseMatrix& a, std::span<const double> b,
                                 double rank_tol) {
  const int m = a.rows();
  const int n = a.cols();
  if (static_cast<int>(b.size()) != m) throw Error("right-hand side dimension mismatch");

  LeastSquaresResult out;
  out.solution.assign(n, 0.0);
  if (n == 0 || m == 0) {
    double s = 0.0;
    for (double e : b) s += e * e;
    out.residual_norm = std::sqrt(s);
    out.rank = 0;
    out.min_singular = 0.0;
    out.max_singular = 0.0;
    return out;
  }

  const Svd s = svd(a);
  const double t = effective_tol(a, s.sigma, rank_tol);
  int r = 0;
  for (int j = 0; j < n; ++j) {
    if (s.sigma[j] <= t) continue;
    ++r;
    double utb = 0.0;
    for (int i = 0; i < m; ++i) utb += s.u(i, j) * b[i];
    const double f = utb / s.sigma[j];
    for (int i = 0; i < n; ++i) out.solution[i] += s.v(i, j) * f;
  }
  const std::vector<double> ax = a.multiply(out.solution);
  double res = 0.0;
  for (int i = 0; i < m; ++i) res += (ax[i] - b[i]) * (ax[i] - b[i]);
  out.residual_norm = std::sqrt(res);
  out.rank = r;
  const int k = std::min(m, n);
  out.max_singular = s.sigma.empty() ? 0.0 : s.sigma.front();
  out.min_singular = k > 0 ? s.sigma[k - 1] : 0.0;
  return out;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& s_in) {
  DenseMatrix s = s_in.symmetric_part();
  const int n = s.rows();
  if (n == 0) return {};

  const double scale = std::max(s.max_abs(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * s(i, j) * s(i, j);
    if (std::sqrt(off) <= 1e-12 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(s(p, q)) <= 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (int k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = s(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double symmetric_min_eigenvalue(const DenseMatrix& s) {
  const std::vector<double> e = symmetric_eigenvalues(s);
  if (e.empty()) throw Error("min eigenvalue of an empty matrix");
  return e.front();
}

double determinant(const DenseMatrix& a) {
  const int n = a.rows();
  if (a.cols() != n) throw Error("determinant requires a square matrix");
  if (n == 0) return 1.0;
  DenseMatrix lu = a;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(lu(i, col)) > std::fabs(lu(piv, col))) piv = i;
    if (lu(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(lu(col, j), lu(piv, j));
      det = -det;
    }
    det *= lu(col, col);
    for (int i = col + 1; i < n; ++i) {
      const double f = lu(i, col) / lu(col, col);
      for (int j = col; j < n; ++j) lu(i, j) -= f * lu(col, j);
    }
  }
  return det;
}

namespace {

// Dense simplex tableau used by both phases. Minimization convention.
struct Tableau {
  int m = 0;       // constraint rows
  int ncols = 0;   // structural + slack + artificial columns
  std::vector<std::vector<double>> t;  // m rows of ncols + 1 (rhs last)
  std::vector<double> obj;             // reduced costs, ncols + 1 (last = -value)
  std::vector<int> basis;              // basic column per row

  void pivot(int row, int col) {
    const double piv = t[row][col];
    for (double& e : t[row]) e /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols; ++j) t[i][j] -= f * t[row][j];
    }
    const double fo = obj[col];
    if (fo != 0.0)
      for (int j = 0; j <= ncols; ++j) obj[j] -= fo * t[row][j];
    basis[row] = col;
  }

  // Bland's rule: entering = lowest-index column with negative reduced cost;
  // leaving = lowest ratio, ties broken by lowest basic column index.
  // Returns Optimal or Unbounded.
  LpStatus iterate(const std::vector<bool>& allowed) {
    const double cost_tol = 1e-9;
    const double piv_tol = 1e-11;
    for (int iter = 0; iter < 20000; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (!allowed[j]) continue;
        if (obj[j] < -cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= piv_tol) continue;
        const double ratio = t[i][ncols] / t[i][enter];
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::fabs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw Error("simplex iteration cap exceeded");
  }
};

}  // namespace

LpResult lp_max(std::span<const double> c, const DenseMatrix& a, std::span<const double> b) {
  const int m = a.rows();
  const int k = a.cols();
  if (static_cast<int>(c.size()) != k) throw Error("objective dimension mismatch");
  if (static_cast<int>(b.size()) != m) throw Error("right-hand side dimension mismatch");

  // Free variables are split as z = z+ - z-.
  const int nstruct = 2 * k;
  std::vector<int> art_of_row(m, -1);
  int nart = 0;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0.0) ++nart;

  Tableau tab;
  tab.m = m;
  tab.ncols = nstruct + m + nart;
  tab.t.assign(m, std::vector<double>(tab.ncols + 1, 0.0));
  tab.basis.assign(m, -1);

  int art = nstruct + m;
  for (int i = 0; i < m; ++i) {
    const double sgn = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < k; ++j) {
      tab.t[i][2 * j] = sgn * a(i, j);
      tab.t[i][2 * j + 1] = -sgn * a(i, j);
    }
    tab.t[i][nstruct + i] = sgn;  // slack
    tab.t[i][tab.ncols] = sgn * b[i];
    if (b[i] < 0.0) {
      art_of_row[i] = art;
      tab.t[i][art] = 1.0;
      tab.basis[i] = art;
      ++art;
    } else {
      tab.basis[i] = nstruct + i;
    }
  }

  LpResult out;
  std::vector<bool> allowed(tab.ncols, true);

  if (nart > 0) {
    // Phase 1: minimize the sum of artificials.
    tab.obj.assign(tab.ncols + 1, 0.0);
    for (int j = nstruct + m; j < tab.ncols; ++j) tab.obj[j] = 1.0;
    for (int i = 0; i < m; ++i)
      if (art_of_row[i] >= 0)
        for (int j = 0; j <= tab.ncols; ++j) tab.obj[j] -= tab.t[i][j];

    const LpStatus st = tab.iterate(allowed);
    if (st == LpStatus::Unbounded) throw Error("phase-1 simplex reported unbounded");
    const double infeas = -tab.obj[tab.ncols];
    double bscale = 1.0;
    for (double bi : b) bscale = std::max(bscale, std::fabs(bi));
    if (infeas > 1e-7 * bscale) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    for (int j = nstruct + m; j < tab.ncols; ++j) allowed[j] = false;
    // Drive any artificial still basic (at value zero) out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < nstruct + m) continue;
      int col = -1;
      for (int j = 0; j < nstruct + m; ++j) {
        if (std::fabs(tab.t[i][j]) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) tab.pivot(i, col);
    }
  }

  // Phase 2: minimize -c.z.
  tab.obj.assign(tab.ncols + 1, 0.0);
  for (int j = 0; j < k; ++j) {
    tab.obj[2 * j] = -c[j];
    tab.obj[2 * j + 1] = c[j];
  }
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis[i];
    const double cb = tab.obj[bj];
    if (cb != 0.0)
      for (int j = 0; j <= tab.ncols; ++j) tab.obj[j] -= cb * tab.t[i][j];
  }

  const LpStatus st = tab.iterate(allowed);
  if (st == LpStatus::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  std::vector<double> vals(tab.ncols, 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] >= 0) vals[tab.basis[i]] = tab.t[i][tab.ncols];
  out.argument.assign(k, 0.0);
  double opt = 0.0;
  for (int j = 0; j < k; ++j) {
    out.argument[j] = vals[2 * j] - vals[2 * j + 1];
    opt += c[j] * out.argument[j];
  }
  out.optimum = opt;
  out.status = LpStatus::Optimal;
  return out;
}

}  // namespace gnep
