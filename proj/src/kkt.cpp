#include "gnep/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gnep {

RatioParameters::RatioParameters(std::vector<double> values) : r(std::move(values)) {
  if (r.empty()) throw Error("ratio parameters must be nonempty");
  for (double v : r)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("ratio parameters must be positive");
}

RatioParameters RatioParameters::from_two_player_ratio(double rho) {
  if (!(rho > 0.0)) throw Error("ratio must be positive");
  return RatioParameters({rho, 1.0});
}

double RatioParameters::two_player_ratio() const {
  if (size() != 2) throw Error("scalar ratio is defined for two players only");
  return r[0] / r[1];
}

std::vector<double> RatioParameters::normalized() const {
  std::vector<double> out = r;
  for (double& v : out) v /= r[0];
  return out;
}

std::vector<double> Multipliers::stacked() const {
  std::vector<double> out;
  for (const auto& pl : individual) out.insert(out.end(), pl.begin(), pl.end());
  out.insert(out.end(), shared.begin(), shared.end());
  return out;
}

Multipliers Multipliers::from_stacked(std::span<const double> mu,
                                      const ActiveSetProfile& active) {
  Multipliers m;
  std::size_t k = 0;
  for (const auto& pl : active.individual) {
    m.individual.emplace_back(mu.begin() + k, mu.begin() + k + pl.size());
    k += pl.size();
  }
  m.shared.assign(mu.begin() + k, mu.begin() + k + active.shared.size());
  k += active.shared.size();
  if (k != mu.size()) throw Error("multiplier count does not match active sets");
  return m;
}

double Multipliers::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pl : individual)
    for (double v : pl) m = std::min(m, v);
  for (double v : shared) m = std::min(m, v);
  return m;
}

std::vector<double> pseudogradient_objectives(const GnepInstance& inst,
                                              std::span<const double> x,
                                              const RatioParameters& r) {
  if (r.size() != inst.player_count()) throw Error("one weight per player required");
  std::vector<double> g(inst.total_dim(), 0.0);
  for (int p = 0; p < inst.player_count(); ++p) {
    const int off = inst.vars.block_offset(p);
    for (int i = 0; i < inst.vars.dim(p); ++i)
      g[off + i] = r[p] * inst.objectives[p].gradient[off + i].evaluate(x);
  }
  return g;
}

DenseMatrix jacobian_pseudogradient_objectives(const GnepInstance& inst,
                                               std::span<const double> x,
                                               const RatioParameters& r) {
  const int n = inst.total_dim();
  DenseMatrix jac(n, n);
  for (int p = 0; p < inst.player_count(); ++p) {
    const DenseMatrix h = inst.objectives[p].hessian(x);
    const int off = inst.vars.block_offset(p);
    for (int i = 0; i < inst.vars.dim(p); ++i)
      for (int k = 0; k < n; ++k) jac(off + i, k) = r[p] * h(off + i, k);
  }
  return jac;
}

namespace {

void check_multiplier_shape(const GnepInstance& inst, const ActiveSetProfile& active,
                            const Multipliers& mult) {
  if (static_cast<int>(mult.individual.size()) != inst.player_count())
    throw Error("multiplier blocks do not match player count");
  for (int p = 0; p < inst.player_count(); ++p)
    if (mult.individual[p].size() != active.individual[p].size())
      throw Error("individual multiplier count does not match active set");
  if (mult.shared.size() != active.shared.size())
    throw Error("shared multiplier count does not match active set");
}

}  // namespace

std::vector<double> lagrangian_pseudogradient(const GnepInstance& inst,
                                              std::span<const double> x,
                                              const ActiveSetProfile& active,
                                              const Multipliers& mult,
                                              const RatioParameters& r) {
  check_multiplier_shape(inst, active, mult);
  std::vector<double> g = pseudogradient_objectives(inst, x, r);
  for (int p = 0; p < inst.player_count(); ++p) {
    const int off = inst.vars.block_offset(p);
    const int dim = inst.vars.dim(p);
    for (std::size_t k = 0; k < active.individual[p].size(); ++k) {
      const SmoothFunction& gj = inst.individual[p][active.individual[p][k]];
      const double lam = mult.individual[p][k];
      for (int i = 0; i < dim; ++i) g[off + i] -= lam * gj.gradient[off + i].evaluate(x);
    }
    for (std::size_t k = 0; k < active.shared.size(); ++k) {
      const SmoothFunction& gj = inst.shared[active.shared[k]];
      const double cap = mult.shared[k];
      for (int i = 0; i < dim; ++i) g[off + i] -= cap * gj.gradient[off + i].evaluate(x);
    }
  }
  return g;
}

DenseMatrix jacobian_lagrangian_pseudogradient(const GnepInstance& inst,
                                               std::span<const double> x,
                                               const ActiveSetProfile& active,
                                               const Multipliers& mult,
                                               const RatioParameters& r) {
  check_multiplier_shape(inst, active, mult);
  const int n = inst.total_dim();
  DenseMatrix jac = jacobian_pseudogradient_objectives(inst, x, r);
  for (int p = 0; p < inst.player_count(); ++p) {
    const int off = inst.vars.block_offset(p);
    const int dim = inst.vars.dim(p);
    for (std::size_t k = 0; k < active.individual[p].size(); ++k) {
      const DenseMatrix h = inst.individual[p][active.individual[p][k]].hessian(x);
      const double lam = mult.individual[p][k];
      if (lam == 0.0) continue;
      for (int i = 0; i < dim; ++i)
        for (int c = 0; c < n; ++c) jac(off + i, c) -= lam * h(off + i, c);
    }
    for (std::size_t k = 0; k < active.shared.size(); ++k) {
      const DenseMatrix h = inst.shared[active.shared[k]].hessian(x);
      const double cap = mult.shared[k];
      if (cap == 0.0) continue;
      for (int i = 0; i < dim; ++i)
        for (int c = 0; c < n; ++c) jac(off + i, c) -= cap * h(off + i, c);
    }
  }
  return jac;
}

DenseMatrix active_gradient_columns(const GnepInstance& inst, std::span<const double> x,
                                    const ActiveSetProfile& active) {
  const int n = inst.total_dim();
  const int m = active.total_active();
  DenseMatrix cols(n, m);
  int c = 0;
  for (int p = 0; p < inst.player_count(); ++p) {
    for (int j : active.individual[p]) {
      const std::vector<double> g = inst.individual[p][j].gradient_at(x);
      for (int i = 0; i < n; ++i) cols(i, c) = g[i];
      ++c;
    }
  }
  for (int j : active.shared) {
    const std::vector<double> g = inst.shared[j].gradient_at(x);
    for (int i = 0; i < n; ++i) cols(i, c) = g[i];
    ++c;
  }
  return cols;
}

std::vector<double> residual_stationarity_system(const GnepInstance& inst,
                                                 std::span<const double> x,
                                                 const ActiveSetProfile& active,
                                                 const Multipliers& mult,
                                                 const RatioParameters& r) {
  std::vector<double> res = lagrangian_pseudogradient(inst, x, active, mult, r);
  for (int p = 0; p < inst.player_count(); ++p)
    for (int j : active.individual[p]) res.push_back(inst.individual[p][j].value(x));
  for (int j : active.shared) res.push_back(inst.shared[j].value(x));
  return res;
}

DenseMatrix jacobian_stationarity_system(const GnepInstance& inst,
                                         std::span<const double> x,
                                         const ActiveSetProfile& active,
                                         const Multipliers& mult,
                                         const RatioParameters& r) {
  const int n = inst.total_dim();
  const int m = active.total_active();
  const DenseMatrix jl = jacobian_lagrangian_pseudogradient(inst, x, active, mult, r);
  const DenseMatrix cols = active_gradient_columns(inst, x, active);
  DenseMatrix jac(n + m, n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac(i, j) = jl(i, j);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c) {
      jac(i, n + c) = -cols(i, c);
      jac(n + c, i) = cols(i, c);
    }
  return jac;
}

MultiplierRecovery recover_multipliers(const GnepInstance& inst, std::span<const double> x,
                                       const RatioParameters& r, double activity_tol) {
  MultiplierRecovery out;
  out.active = active_sets(inst, x, activity_tol);
  const DenseMatrix cols = active_gradient_columns(inst, x, out.active);
  const std::vector<double> gf = pseudogradient_objectives(inst, x, r);

  const LeastSquaresResult ls = least_squares(cols, gf);
  out.multipliers = Multipliers::from_stacked(ls.solution, out.active);
  out.full_rank = ls.rank == cols.cols();
  out.min_singular = ls.min_singular;

  const std::vector<double> gl =
      lagrangian_pseudogradient(inst, x, out.active, out.multipliers, r);
  double inf = 0.0;
  for (double v : gl) inf = std::max(inf, std::fabs(v));
  out.residual = inf;
  return out;
}

namespace {

// Player-block gradient columns of the constraints active in player p's own
// problem: active individual constraints first, then active shared ones.
DenseMatrix player_active_columns(const GnepInstance& inst, std::span<const double> x,
                                  const ActiveSetProfile& active, int p) {
  const int off = inst.vars.block_offset(p);
  const int dim = inst.vars.dim(p);
  const int m = static_cast<int>(active.individual[p].size() + active.shared.size());
  DenseMatrix cols(dim, m);
  int c = 0;
  for (int j : active.individual[p]) {
    for (int i = 0; i < dim; ++i)
      cols(i, c) = inst.individual[p][j].gradient[off + i].evaluate(x);
    ++c;
  }
  for (int j : active.shared) {
    for (int i = 0; i < dim; ++i) cols(i, c) = inst.shared[j].gradient[off + i].evaluate(x);
    ++c;
  }
  return cols;
}

std::vector<double> player_objective_gradient(const GnepInstance& inst,
                                              std::span<const double> x, int p) {
  const int off = inst.vars.block_offset(p);
  const int dim = inst.vars.dim(p);
  std::vector<double> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = inst.objectives[p].gradient[off + i].evaluate(x);
  return v;
}

// Feasibility of {M mu = v, 0 <= mu <= bound} via the simplex.
LpResult nonnegative_combination(const DenseMatrix& m, std::span<const double> v,
                                 double bound = 1e6) {
  const int rows = m.rows();
  const int cols = m.cols();
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  auto add_row = [&](const std::vector<double>& row, double rhs) {
    a.push_back(row);
    b.push_back(rhs);
  };
  for (int i = 0; i < rows; ++i) {
    std::vector<double> row(cols);
    for (int j = 0; j < cols; ++j) row[j] = m(i, j);
    add_row(row, v[i]);
    for (double& e : row) e = -e;
    add_row(row, -v[i]);
  }
  for (int j = 0; j < cols; ++j) {
    std::vector<double> row(cols, 0.0);
    row[j] = -1.0;
    add_row(row, 0.0);
    row[j] = 1.0;
    add_row(row, bound);
  }
  const std::vector<double> c(cols, 0.0);
  return lp_max(c, DenseMatrix::from_rows(a), b);
}

}  // namespace

PerPlayerKktResult per_player_kkt(const GnepInstance& inst, std::span<const double> x,
                                  int player, double activity_tol) {
  const ActiveSetProfile active = active_sets(inst, x, activity_tol);
  PerPlayerKktResult out;
  out.player = player;

  const std::vector<double> v = player_objective_gradient(inst, x, player);
  const DenseMatrix m = player_active_columns(inst, x, active, player);
  const int nind = static_cast<int>(active.individual[player].size());
  const int mcols = m.cols();

  out.unique = mcols == 0 || rank(m) == mcols;

  if (mcols == 0) {
    double inf = 0.0;
    for (double e : v) inf = std::max(inf, std::fabs(e));
    out.residual = inf;
    out.status = inf <= 1e-8 ? PlayerKktStatus::KktWithMultipliers
                             : PlayerKktStatus::StationarityInfeasible;
    return out;
  }

  const LpResult kkt_lp = nonnegative_combination(m, v);
  if (kkt_lp.status == LpStatus::Optimal) {
    out.status = PlayerKktStatus::KktWithMultipliers;
    std::vector<double> mu = kkt_lp.argument;
    if (out.unique) {
      // The solution is unique; the least-squares values are cleaner than the
      // simplex vertex.
      mu = least_squares(m, v).solution;
    }
    out.individual.assign(mu.begin(), mu.begin() + nind);
    out.shared.assign(mu.begin() + nind, mu.end());
    const std::vector<double> mv = m.multiply(mu);
    double inf = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) inf = std::max(inf, std::fabs(mv[i] - v[i]));
    out.residual = inf;
    return out;
  }

  // Fritz-John certificate with zero objective weight: nonzero mu >= 0 with
  // M mu = 0, normalized by sum(mu) = 1.
  DenseMatrix fj(m.rows() + 1, mcols);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < mcols; ++j) fj(i, j) = m(i, j);
  for (int j = 0; j < mcols; ++j) fj(m.rows(), j) = 1.0;
  std::vector<double> rhs(m.rows() + 1, 0.0);
  rhs.back() = 1.0;
  const LpResult fj_lp = nonnegative_combination(fj, rhs);
  out.status = fj_lp.status == LpStatus::Optimal ? PlayerKktStatus::FritzJohnOnly
                                                 : PlayerKktStatus::StationarityInfeasible;
  out.residual = least_squares(m, v).residual_norm;
  return out;
}

namespace {

ConsistencyResult consistency_via_unique_multipliers(
    const GnepInstance& inst, const ActiveSetProfile& active,
    const std::vector<PerPlayerKktResult>& players, double zero_tol) {
  ConsistencyResult out;
  out.via_unique_multipliers = true;
  const int nplayers = inst.player_count();

  // Zero-vs-positive screen per active shared constraint.
  std::vector<int> positive_rows;
  for (std::size_t k = 0; k < active.shared.size(); ++k) {
    std::vector<double> vals(nplayers);
    int positives = 0, zeros = 0;
    for (int p = 0; p < nplayers; ++p) {
      vals[p] = players[p].shared[k];
      if (vals[p] > zero_tol) {
        ++positives;
      } else if (vals[p] >= -zero_tol) {
        ++zeros;
      } else {
        out.verdict = ConsistencyVerdict::Inconsistent;
        out.reason = "negative per-player multiplier for an active shared constraint";
        out.witness_shared_index = active.shared[k];
        out.witness_multipliers = vals;
        return out;
      }
    }
    if (positives > 0 && zeros > 0) {
      std::ostringstream os;
      os << "shared constraint " << active.shared[k] + 1
         << " has a vanishing multiplier for one player and a positive one for another; "
            "no positive weights can equalize them";
      out.verdict = ConsistencyVerdict::Inconsistent;
      out.reason = os.str();
      out.witness_shared_index = active.shared[k];
      out.witness_multipliers = vals;
      return out;
    }
    if (positives == nplayers) positive_rows.push_back(static_cast<int>(k));
  }

  // log r^p + log v_p = log c_k for the all-positive constraints; r^1 = 1.
  const int nu = nplayers - 1 + static_cast<int>(positive_rows.size());
  DenseMatrix a(nplayers * static_cast<int>(positive_rows.size()), std::max(nu, 1));
  std::vector<double> b;
  int row = 0;
  for (std::size_t kk = 0; kk < positive_rows.size(); ++kk) {
    const int k = positive_rows[kk];
    for (int p = 0; p < nplayers; ++p) {
      if (p >= 1) a(row, p - 1) = 1.0;
      a(row, nplayers - 1 + static_cast<int>(kk)) = -1.0;
      b.push_back(-std::log(players[p].shared[k]));
      ++row;
    }
  }
  std::vector<double> witness(nplayers, 1.0);
  if (!positive_rows.empty()) {
    const LeastSquaresResult ls = least_squares(a, b);
    if (ls.residual_norm > 1e-7) {
      out.verdict = ConsistencyVerdict::Inconsistent;
      out.reason = "multiplier ratios differ across active shared constraints";
      return out;
    }
    for (int p = 1; p < nplayers; ++p) witness[p] = std::exp(ls.solution[p - 1]);
  }
  out.verdict = ConsistencyVerdict::Consistent;
  out.witness_r = witness;
  return out;
}

ConsistencyResult consistency_via_joint_lp(const GnepInstance& inst,
                                           std::span<const double> x,
                                           const ActiveSetProfile& active) {
  ConsistencyResult out;
  out.via_unique_multipliers = false;
  const int nplayers = inst.player_count();
  const int nshared = static_cast<int>(active.shared.size());
  int nind = 0;
  for (const auto& s : active.individual) nind += static_cast<int>(s.size());

  // Unknowns: weights r^2..r^N, then per-player individual multipliers, then
  // the common shared multipliers.
  const int nvars = (nplayers - 1) + nind + nshared;
  const double wlo = 1e-6, whi = 1e6, mhi = 1e6;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto add_le = [&](std::vector<double> row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  };
  auto add_eq = [&](const std::vector<double>& row, double b) {
    add_le(row, b);
    std::vector<double> neg(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) neg[i] = -row[i];
    add_le(std::move(neg), -b);
  };

  int ind_base = nplayers - 1;
  std::vector<int> ind_offset(nplayers, 0);
  {
    int off = ind_base;
    for (int p = 0; p < nplayers; ++p) {
      ind_offset[p] = off;
      off += static_cast<int>(active.individual[p].size());
    }
  }
  const int shared_base = ind_base + nind;

  for (int p = 0; p < nplayers; ++p) {
    const int boff = inst.vars.block_offset(p);
    const std::vector<double> df = player_objective_gradient(inst, x, p);
    for (int i = 0; i < inst.vars.dim(p); ++i) {
      std::vector<double> row(nvars, 0.0);
      double b = 0.0;
      if (p == 0) {
        b = df[i];  // r^1 = 1
      } else {
        row[p - 1] = -df[i];
      }
      int c = ind_offset[p];
      for (int j : active.individual[p]) {
        row[c++] = inst.individual[p][j].gradient[boff + i].evaluate(x);
      }
      for (int k = 0; k < nshared; ++k) {
        row[shared_base + k] = inst.shared[active.shared[k]].gradient[boff + i].evaluate(x);
      }
      add_eq(row, b);
    }
  }
  for (int v = 0; v < nvars; ++v) {
    std::vector<double> row(nvars, 0.0);
    row[v] = 1.0;
    add_le(row, v < nplayers - 1 ? whi : mhi);
    row[v] = -1.0;
    add_le(std::move(row), v < nplayers - 1 ? -wlo : 0.0);
  }

  const std::vector<double> c(nvars, 0.0);
  const LpResult lp = lp_max(c, DenseMatrix::from_rows(rows), rhs);
  if (lp.status == LpStatus::Optimal) {
    out.verdict = ConsistencyVerdict::Consistent;
    out.witness_r.assign(nplayers, 1.0);
    for (int p = 1; p < nplayers; ++p) out.witness_r[p] = lp.argument[p - 1];
    out.reason = "joint feasibility over weights and common multipliers";
  } else {
    out.verdict = ConsistencyVerdict::Inconsistent;
    out.reason =
        "no positive weights admit common multipliers (weights searched in [1e-6, 1e6])";
  }
  return out;
}

}  // namespace

ConsistencyResult normalized_consistency(const GnepInstance& inst, std::span<const double> x,
                                         double activity_tol, double zero_tol) {
  const ActiveSetProfile active = active_sets(inst, x, activity_tol);

  std::vector<PerPlayerKktResult> players;
  bool all_unique = true;
  bool all_kkt = true;
  for (int p = 0; p < inst.player_count(); ++p) {
    players.push_back(per_player_kkt(inst, x, p, activity_tol));
    all_unique = all_unique && players.back().unique;
    all_kkt = all_kkt && players.back().status == PlayerKktStatus::KktWithMultipliers;
  }

  if (all_unique) {
    if (!all_kkt) {
      ConsistencyResult out;
      out.verdict = ConsistencyVerdict::Inconsistent;
      out.via_unique_multipliers = true;
      for (const auto& pr : players) {
        if (pr.status != PlayerKktStatus::KktWithMultipliers) {
          out.reason = "player " + std::to_string(pr.player + 1) +
                       (pr.status == PlayerKktStatus::FritzJohnOnly
                            ? " admits only a Fritz-John certificate"
                            : " has an infeasible stationarity system");
          break;
        }
      }
      return out;
    }
    return consistency_via_unique_multipliers(inst, active, players, zero_tol);
  }
  return consistency_via_joint_lp(inst, x, active);
}

}  // namespace gnep
