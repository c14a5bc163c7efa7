#include "gnep/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gnep {

namespace {

// Stacked full-space gradient rows of the active constraints, individuals
// first (player by player), then shared.
DenseMatrix active_gradient_rows(const GnepInstance& inst, std::span<const double> x,
                                 const ActiveSetProfile& active) {
  return active_gradient_columns(inst, x, active).transposed();
}

LicqReport licq_for_active(const GnepInstance& inst, std::span<const double> x,
                           const ActiveSetProfile& active, double rank_tol = -1.0) {
  LicqReport out;
  out.required_rank = active.total_active();
  if (out.required_rank == 0) {
    out.holds = true;
    return out;
  }
  const DenseMatrix rows = active_gradient_rows(inst, x, active);
  const Svd s = svd(rows);
  const double tol = rank_tol >= 0.0 ? rank_tol * std::max(s.sigma.front(), 1e-300)
                                     : default_rank_tolerance(rows, s.sigma.front());
  const int k = std::min(rows.rows(), rows.cols());
  for (int i = 0; i < k; ++i)
    if (s.sigma[i] > tol) ++out.rank;
  out.min_singular = k > 0 ? s.sigma[k - 1] : 0.0;
  if (rows.rows() > rows.cols()) out.min_singular = 0.0;  // more rows than columns
  out.holds = out.rank == out.required_rank;
  return out;
}

// maximize t subject to d.xi >= t over the given gradient rows,
// |xi_i| <= 1 and t <= 1. Positive optimum certifies MFCQ.
MfcqReport mfcq_lp(const std::vector<std::vector<double>>& gradients, int dim) {
  MfcqReport out;
  const int nvars = dim + 1;  // (xi, t)
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& d : gradients) {
    std::vector<double> row(nvars, 0.0);
    for (int i = 0; i < dim; ++i) row[i] = -d[i];
    row[dim] = 1.0;  // t - d.xi <= 0
    rows.push_back(std::move(row));
    rhs.push_back(0.0);
  }
  for (int i = 0; i < dim; ++i) {
    std::vector<double> row(nvars, 0.0);
    row[i] = 1.0;
    rows.push_back(row);
    rhs.push_back(1.0);
    row[i] = -1.0;
    rows.push_back(std::move(row));
    rhs.push_back(1.0);
  }
  {
    std::vector<double> row(nvars, 0.0);
    row[dim] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(1.0);
  }
  std::vector<double> c(nvars, 0.0);
  c[dim] = 1.0;
  const LpResult lp = lp_max(c, DenseMatrix::from_rows(rows), rhs);
  if (lp.status != LpStatus::Optimal) throw Error("MFCQ feasibility LP failed unexpectedly");
  out.lp_optimum = lp.optimum;
  out.witness.assign(lp.argument.begin(), lp.argument.begin() + dim);
  out.holds = lp.optimum > 1e-9;
  return out;
}

}  // namespace

LicqReport check_gnep_licq(const GnepInstance& inst, std::span<const double> x,
                           double activity_tol) {
  return licq_for_active(inst, x, active_sets(inst, x, activity_tol));
}

MfcqReport check_gnep_mfcq(const GnepInstance& inst, std::span<const double> x,
                           double activity_tol) {
  const ActiveSetProfile active = active_sets(inst, x, activity_tol);
  std::vector<std::vector<double>> gradients;
  for (int p = 0; p < inst.player_count(); ++p)
    for (int j : active.individual[p]) gradients.push_back(inst.individual[p][j].gradient_at(x));
  for (int j : active.shared) gradients.push_back(inst.shared[j].gradient_at(x));
  return mfcq_lp(gradients, inst.total_dim());
}

MfcqReport check_player_mfcq(const GnepInstance& inst, std::span<const double> x, int player,
                             double activity_tol) {
  const ActiveSetProfile active = active_sets(inst, x, activity_tol);
  const int off = inst.vars.block_offset(player);
  const int dim = inst.vars.dim(player);
  std::vector<std::vector<double>> gradients;
  auto block_grad = [&](const SmoothFunction& f) {
    std::vector<double> g(dim);
    for (int i = 0; i < dim; ++i) g[i] = f.gradient[off + i].evaluate(x);
    return g;
  };
  for (int j : active.individual[player]) gradients.push_back(block_grad(inst.individual[player][j]));
  for (int j : active.shared) gradients.push_back(block_grad(inst.shared[j]));
  return mfcq_lp(gradients, dim);
}

bool check_slater_point(const GnepInstance& inst, std::span<const double> x, double tol) {
  if (!inst.convex_c2) throw NotConvexFlaggedError();
  for (int p = 0; p < inst.player_count(); ++p)
    for (const auto& g : inst.individual[p])
      if (g.value(x) <= tol) return false;
  for (const auto& g : inst.shared)
    if (g.value(x) <= tol) return false;
  return true;
}

TangentBasis tangent_basis(const GnepInstance& inst, std::span<const double> x,
                           const ActiveSetProfile& active, double tol) {
  const LicqReport licq = licq_for_active(inst, x, active);
  if (!licq.holds)
    throw LicqFailedError("active gradients are linearly dependent; tangent dimension formula invalid");
  TangentBasis out;
  if (active.total_active() == 0) {
    out.v = DenseMatrix::identity(inst.total_dim());
    out.dimension = inst.total_dim();
    return out;
  }
  const DenseMatrix rows = active_gradient_rows(inst, x, active);
  out.v = nullspace_basis(rows, tol);
  out.dimension = out.v.cols();
  return out;
}

CertificateReport check_nondegenerate(const GnepInstance& inst, const NormalizedKktPoint& point,
                                      const NondegeneracyTolerances& tols) {
  CertificateReport rep;
  const std::span<const double> x(point.x);
  const ActiveSetProfile& active = point.active;

  rep.gnep_licq = licq_for_active(inst, x, active, tols.rank_tol);
  rep.gnep_mfcq = check_gnep_mfcq(inst, x);

  rep.nd2.vacuous = active.total_active() == 0;
  rep.nd2.min_multiplier =
      rep.nd2.vacuous ? std::numeric_limits<double>::infinity() : point.multipliers.min_value();
  rep.nd2.holds = rep.nd2.vacuous || rep.nd2.min_multiplier > tols.nd2_tol;

  const DenseMatrix jl =
      jacobian_lagrangian_pseudogradient(inst, x, active, point.multipliers, point.r);
  if (rep.gnep_licq.holds) {
    const TangentBasis basis = tangent_basis(inst, x, active);
    rep.nd3.tangent_dimension = basis.dimension;
    if (basis.dimension == 0) {
      rep.nd3.vacuous = true;
      rep.nd3.holds = true;
      rep.nd3.min_singular = std::numeric_limits<double>::infinity();
      rep.nd3.reduced_determinant = 1.0;
    } else {
      const DenseMatrix reduced = basis.v.transposed().multiply(jl).multiply(basis.v);
      const Svd s = svd(reduced);
      rep.nd3.min_singular = s.sigma.back();
      rep.nd3.holds = rep.nd3.min_singular > tols.nd3_tol * (1.0 + jl.frobenius_norm());
      // The value a hand computation would report: reduce with the
      // elimination basis, whose vectors have unit free coordinates.
      DenseMatrix w = elimination_nullspace_basis(active_gradient_rows(inst, x, active));
      if (w.cols() == basis.dimension) {
        rep.nd3.reduced_determinant = determinant(w.transposed().multiply(jl).multiply(w));
      } else {
        rep.nd3.reduced_determinant = determinant(reduced);
      }
    }
  } else {
    // Without ND1 the tangent space is not well defined; ND3 fails by
    // convention and the report carries no reduced values.
    rep.nd3.holds = false;
    rep.nd3.tangent_dimension = -1;
  }

  for (int p = 0; p < inst.player_count(); ++p) {
    PlayerDiagnostics d;
    d.player = p;
    const int off = inst.vars.block_offset(p);
    const int dim = inst.vars.dim(p);
    const int m = static_cast<int>(active.individual[p].size() + active.shared.size());
    d.required_rank = m;
    if (m > 0) {
      DenseMatrix rows(m, dim);
      int rr = 0;
      for (int j : active.individual[p]) {
        for (int i = 0; i < dim; ++i) rows(rr, i) = inst.individual[p][j].gradient[off + i].evaluate(x);
        ++rr;
      }
      for (int j : active.shared) {
        for (int i = 0; i < dim; ++i) rows(rr, i) = inst.shared[j].gradient[off + i].evaluate(x);
        ++rr;
      }
      d.rank = rank(rows);
    }
    d.licq = d.rank == d.required_rank;
    const MfcqReport pm = check_player_mfcq(inst, x, p);
    d.mfcq = pm.holds;
    d.mfcq_lp_optimum = pm.lp_optimum;
    const PerPlayerKktResult pk = per_player_kkt(inst, x, p);
    d.kkt_status = pk.status;
    double mn = std::numeric_limits<double>::infinity();
    for (double v : pk.individual) mn = std::min(mn, v);
    for (double v : pk.shared) mn = std::min(mn, v);
    d.min_shared_multiplier = mn;
    d.strict_complementarity =
        pk.status == PlayerKktStatus::KktWithMultipliers && (m == 0 || mn > tols.nd2_tol);
    rep.players.push_back(std::move(d));
  }

  rep.nondegenerate = rep.gnep_licq.holds && rep.nd2.holds && rep.nd3.holds;
  return rep;
}

C3Report check_c3_sampled(const GnepInstance& inst, const RatioParameters& r,
                          const std::vector<StrategyProfile>& sample_points) {
  C3Report out;
  out.samples = static_cast<int>(sample_points.size());
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& x : sample_points) {
    const DenseMatrix jf = jacobian_pseudogradient_objectives(inst, x, r);
    const double eig = symmetric_min_eigenvalue(jf);
    if (eig < out.min_eigenvalue) {
      out.min_eigenvalue = eig;
      if (eig < -1e-10) out.failing_point = x;
    }
  }
  if (sample_points.empty()) out.min_eigenvalue = 0.0;
  out.refuted = out.min_eigenvalue < -1e-10;
  return out;
}

std::vector<StrategyProfile> feasible_grid_samples(const GnepInstance& inst,
                                                   std::span<const double> lo,
                                                   std::span<const double> hi, int grid,
                                                   double tol) {
  const int n = inst.total_dim();
  std::vector<StrategyProfile> out;
  std::vector<int> idx(n, 0);
  StrategyProfile x(n, 0.0);
  for (;;) {
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (grid - 1);
    if (feasible(inst, x, tol)) out.push_back(x);
    int d = 0;
    while (d < n && ++idx[d] == grid) idx[d++] = 0;
    if (d == n) break;
  }
  return out;
}

}  // namespace gnep
