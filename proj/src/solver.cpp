#include "gnep/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace gnep {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::fabs(e));
  return m;
}

double inf_dist(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

SolveConfig SolveConfig::defaults(const GnepInstance& inst, double lo, double hi) {
  SolveConfig cfg;
  cfg.box_lo.assign(inst.total_dim(), lo);
  cfg.box_hi.assign(inst.total_dim(), hi);
  return cfg;
}

void SolveConfig::validate(const GnepInstance& inst) const {
  const int n = inst.total_dim();
  if (static_cast<int>(box_lo.size()) != n || static_cast<int>(box_hi.size()) != n)
    throw Error("search box must provide one interval per coordinate");
  for (int i = 0; i < n; ++i)
    if (!(box_lo[i] < box_hi[i])) throw Error("search box is empty in some coordinate");
  if (grid < 2) throw Error("grid resolution must be at least 2");
}

NewtonOutcome newton_refine(const SystemFn& f, const SystemJacobianFn& jac,
                            std::span<const double> start, double tol, int max_iter) {
  NewtonOutcome out;
  std::vector<double> z(start.begin(), start.end());
  const double cond_limit = 1e12;

  auto final_jacobian_stats = [&](std::span<const double> at) {
    const Svd s = svd(jac(at));
    out.max_singular = s.sigma.empty() ? 0.0 : s.sigma.front();
    out.min_singular = s.sigma.empty() ? 0.0 : s.sigma.back();
    if (out.min_singular <= out.max_singular / cond_limit) out.singular_jacobian = true;
  };

  for (int it = 0; it <= max_iter; ++it) {
    const std::vector<double> fv = f(z);
    const double res = inf_norm(fv);
    if (!std::isfinite(res)) {
      out.status = NewtonStatus::Diverged;
      return out;
    }
    if (res <= tol) {
      out.status = NewtonStatus::Converged;
      out.z = z;
      out.residual = res;
      out.iterations = it;
      final_jacobian_stats(z);
      return out;
    }
    if (it == max_iter) break;

    const Svd s = svd(jac(z));
    const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double smin = s.sigma.empty() ? 0.0 : s.sigma.back();
    if (smax <= 0.0) {
      out.status = NewtonStatus::Singular;
      return out;
    }
    if (smin <= smax / cond_limit) out.singular_jacobian = true;

    // Pseudoinverse step; directions below the cutoff are dropped, which
    // makes the step the minimum-norm one on rank-deficient systems.
    const double cutoff = smax * 1e-12;
    const int dim = static_cast<int>(z.size());
    std::vector<double> step(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
      if (s.sigma[j] <= cutoff) continue;
      double utf = 0.0;
      for (int i = 0; i < dim; ++i) utf += s.u(i, j) * fv[i];
      const double c = utf / s.sigma[j];
      for (int i = 0; i < dim; ++i) step[i] += s.v(i, j) * c;
    }
    double znorm = 0.0;
    for (int i = 0; i < dim; ++i) {
      z[i] -= step[i];
      znorm = std::max(znorm, std::fabs(z[i]));
    }
    if (!std::isfinite(znorm) || znorm > 1e10) {
      out.status = NewtonStatus::Diverged;
      return out;
    }
  }

  out.status = out.singular_jacobian ? NewtonStatus::Singular : NewtonStatus::Diverged;
  out.z = z;
  out.residual = inf_norm(f(z));
  out.iterations = max_iter;
  return out;
}

namespace {

std::vector<ActiveSetProfile> enumerate_profiles(const GnepInstance& inst, long long cap) {
  const auto too_many = [cap] {
    return CombinatorialCapError("active-set combinations exceed the configured cap of " +
                                 std::to_string(cap));
  };
  long long total = 1;
  for (int p = 0; p < inst.player_count(); ++p) {
    if (inst.individual_count(p) > 30) throw too_many();
    total *= 1LL << inst.individual_count(p);
    if (total > cap) throw too_many();
  }
  if (inst.shared_count() > 30) throw too_many();
  total *= 1LL << inst.shared_count();
  if (total > cap) throw too_many();

  std::vector<ActiveSetProfile> profiles;
  std::vector<int> masks(inst.player_count() + 1, 0);
  for (;;) {
    ActiveSetProfile a;
    a.individual.resize(inst.player_count());
    for (int p = 0; p < inst.player_count(); ++p)
      for (int j = 0; j < inst.individual_count(p); ++j)
        if (masks[p] & (1 << j)) a.individual[p].push_back(j);
    for (int j = 0; j < inst.shared_count(); ++j)
      if (masks.back() & (1 << j)) a.shared.push_back(j);
    profiles.push_back(std::move(a));

    int d = 0;
    for (; d <= inst.player_count(); ++d) {
      const int limit =
          d < inst.player_count() ? 1 << inst.individual_count(d) : 1 << inst.shared_count();
      if (++masks[d] < limit) break;
      masks[d] = 0;
    }
    if (d > inst.player_count()) break;
  }
  return profiles;
}

struct ProfileOutcome {
  std::vector<NormalizedKktPoint> kept;
  ActiveSetStats stats;
};

ProfileOutcome solve_profile(const GnepInstance& inst, const RatioParameters& r,
                             const SolveConfig& cfg, const ActiveSetProfile& active) {
  const int n = inst.total_dim();
  const int m = active.total_active();

  ProfileOutcome out;
  out.stats.key = active.key();

  SystemFn fn = [&](std::span<const double> z) {
    const std::span<const double> x = z.subspan(0, n);
    const Multipliers mult = Multipliers::from_stacked(z.subspan(n), active);
    return residual_stationarity_system(inst, x, active, mult, r);
  };
  SystemJacobianFn jfn = [&](std::span<const double> z) {
    const std::span<const double> x = z.subspan(0, n);
    const Multipliers mult = Multipliers::from_stacked(z.subspan(n), active);
    return jacobian_stationarity_system(inst, x, active, mult, r);
  };

  auto try_start = [&](std::span<const double> x0) {
    ++out.stats.starts;
    std::vector<double> z0(n + m, 0.0);
    std::copy(x0.begin(), x0.end(), z0.begin());
    if (m > 0) {
      const DenseMatrix cols = active_gradient_columns(inst, x0, active);
      const std::vector<double> gf = pseudogradient_objectives(inst, x0, r);
      const std::vector<double> mu0 = least_squares(cols, gf).solution;
      std::copy(mu0.begin(), mu0.end(), z0.begin() + n);
    }

    const NewtonOutcome nw = newton_refine(fn, jfn, z0, cfg.newton_tol, cfg.newton_max_iter);
    if (nw.status != NewtonStatus::Converged) return;
    ++out.stats.converged;
    const std::span<const double> xs(nw.z.data(), n);
    const Multipliers mult =
        Multipliers::from_stacked(std::span<const double>(nw.z.data() + n, m), active);

    bool infeasible = false, ambiguous = false;
    for (int p = 0; p < inst.player_count() && !infeasible; ++p) {
      for (int j = 0; j < inst.individual_count(p); ++j) {
        if (active.individual_active(p, j)) continue;
        const double v = inst.individual[p][j].value(xs);
        if (v < -cfg.activity_tol) infeasible = true;
        else if (v <= cfg.activity_tol) ambiguous = true;
      }
    }
    for (int j = 0; j < inst.shared_count() && !infeasible; ++j) {
      if (active.shared_active(j)) continue;
      const double v = inst.shared[j].value(xs);
      if (v < -cfg.activity_tol) infeasible = true;
      else if (v <= cfg.activity_tol) ambiguous = true;
    }

    if (infeasible) {
      ++out.stats.filtered_feasibility;
    } else if (ambiguous) {
      ++out.stats.filtered_ambiguous;
    } else if (mult.min_value() < -cfg.sign_tol) {
      ++out.stats.filtered_sign;
    } else {
      for (const auto& kept : out.kept)
        if (inf_dist(kept.x, xs) <= cfg.dedupe_radius) return;
      NormalizedKktPoint pt;
      pt.x.assign(xs.begin(), xs.end());
      pt.active = active;
      pt.multipliers = mult;
      pt.r = r;
      pt.stationarity_residual = inf_norm(lagrangian_pseudogradient(inst, xs, active, mult, r));
      pt.newton_jacobian_min_singular_value = nw.min_singular;
      pt.degenerate_jacobian = nw.singular_jacobian || nw.min_singular <= 1e-6 * nw.max_singular;
      out.kept.push_back(std::move(pt));
      ++out.stats.kept;
    }
  };

  std::vector<int> idx(n, 0);
  std::vector<double> x0(n, 0.0);
  for (;;) {
    for (int i = 0; i < n; ++i)
      x0[i] = cfg.box_lo[i] + (cfg.box_hi[i] - cfg.box_lo[i]) * idx[i] / (cfg.grid - 1);
    try_start(x0);
    int d = 0;
    while (d < n && ++idx[d] == cfg.grid) idx[d++] = 0;
    if (d == n) break;
  }

  // A singular stationarity Jacobian signals a solution manifold: probe
  // along its kernel (in x) for further members, so a continuum shows up as
  // several deduped points rather than one.
  double width = 0.0;
  for (int i = 0; i < n; ++i) width = std::max(width, cfg.box_hi[i] - cfg.box_lo[i]);
  const std::size_t seeds = out.kept.size();
  for (std::size_t s = 0; s < seeds; ++s) {
    if (!out.kept[s].degenerate_jacobian) continue;
    const NormalizedKktPoint seed = out.kept[s];
    std::vector<double> z(n + m);
    std::copy(seed.x.begin(), seed.x.end(), z.begin());
    const std::vector<double> mu = seed.multipliers.stacked();
    std::copy(mu.begin(), mu.end(), z.begin() + n);
    const DenseMatrix kernel = nullspace_basis(jfn(z), 1e-8);
    for (int c = 0; c < kernel.cols(); ++c) {
      std::vector<double> dir(n, 0.0);
      double nrm = 0.0;
      for (int i = 0; i < n; ++i) {
        dir[i] = kernel(i, c);
        nrm += dir[i] * dir[i];
      }
      nrm = std::sqrt(nrm);
      if (nrm < 1e-8) continue;  // kernel direction lives in multiplier space
      for (const int k : {-4, -3, -2, -1, 1, 2, 3, 4}) {
        std::vector<double> probe(n);
        for (int i = 0; i < n; ++i)
          probe[i] = seed.x[i] + 0.05 * width * k * dir[i] / nrm;
        try_start(probe);
      }
    }
  }
  return out;
}

bool lexicographic_less(const NormalizedKktPoint& a, const NormalizedKktPoint& b) {
  const std::string ka = a.active.key(), kb = b.active.key();
  if (ka != kb) return ka < kb;
  return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

}  // namespace

SolveReport enumerate_normalized_kkt(const GnepInstance& inst, const RatioParameters& r,
                                     const SolveConfig& cfg) {
  cfg.validate(inst);
  if (r.size() != inst.player_count()) throw Error("one weight per player required");

  const std::vector<ActiveSetProfile> profiles = enumerate_profiles(inst, cfg.active_set_cap);
  std::vector<ProfileOutcome> outcomes(profiles.size());

  const int nthreads = std::max(1, cfg.threads);
  if (nthreads <= 1 || profiles.size() <= 1) {
    for (std::size_t i = 0; i < profiles.size(); ++i)
      outcomes[i] = solve_profile(inst, r, cfg, profiles[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= profiles.size()) return;
        outcomes[i] = solve_profile(inst, r, cfg, profiles[i]);
      }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<std::size_t>(nthreads, profiles.size());
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SolveReport report;
  for (auto& oc : outcomes) {
    for (auto& pt : oc.kept) {
      if (pt.degenerate_jacobian)
        report.degenerate_points.push_back(std::move(pt));
      else
        report.points.push_back(std::move(pt));
    }
    report.stats.push_back(std::move(oc.stats));
  }

  std::sort(report.points.begin(), report.points.end(), lexicographic_less);
  std::sort(report.degenerate_points.begin(), report.degenerate_points.end(),
            lexicographic_less);

  // Group aligned degenerate points of one active set into families.
  const int n = inst.total_dim();
  for (std::size_t lo = 0; lo < report.degenerate_points.size();) {
    std::size_t hi = lo;
    const std::string key = report.degenerate_points[lo].active.key();
    while (hi < report.degenerate_points.size() &&
           report.degenerate_points[hi].active.key() == key)
      ++hi;
    const std::size_t count = hi - lo;
    if (count >= 2) {
      StrategyProfile origin(n, 0.0);
      for (std::size_t k = lo; k < hi; ++k)
        for (int i = 0; i < n; ++i) origin[i] += report.degenerate_points[k].x[i] / count;
      DenseMatrix centered(static_cast<int>(count), n);
      for (std::size_t k = lo; k < hi; ++k)
        for (int i = 0; i < n; ++i)
          centered(static_cast<int>(k - lo), i) = report.degenerate_points[k].x[i] - origin[i];
      const Svd s = svd(centered);
      std::vector<double> direction(n, 0.0);
      for (int i = 0; i < n; ++i) direction[i] = s.v(i, 0);
      double max_dev = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        double along = 0.0;
        for (int i = 0; i < n; ++i)
          along += (report.degenerate_points[k].x[i] - origin[i]) * direction[i];
        double dev = 0.0;
        for (int i = 0; i < n; ++i) {
          const double off =
              report.degenerate_points[k].x[i] - origin[i] - along * direction[i];
          dev += off * off;
        }
        max_dev = std::max(max_dev, std::sqrt(dev));
      }
      if (max_dev <= 10.0 * cfg.dedupe_radius) {
        DegenerateFamily fam;
        fam.active_key = key;
        for (std::size_t k = lo; k < hi; ++k) fam.members.push_back(static_cast<int>(k));
        fam.line_origin = origin;
        fam.line_direction = direction;
        fam.max_line_deviation = max_dev;
        report.families.push_back(std::move(fam));
        report.warnings.push_back(
            "continuum candidate: " + std::to_string(count) +
            " degenerate solutions on a line with active set " + key +
            "; the solution set appears to be a family, not isolated points");
      }
    }
    lo = hi;
  }
  if (report.families.empty() && !report.degenerate_points.empty())
    report.warnings.push_back("degenerate solutions found (singular stationarity Jacobian)");

  return report;
}

bool validate_kkt_point(const GnepInstance& inst, const NormalizedKktPoint& point,
                        const SolveConfig& cfg, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (static_cast<int>(point.x.size()) != inst.total_dim()) return fail("dimension mismatch");
  if (!feasible(inst, point.x, cfg.activity_tol)) return fail("point is infeasible");
  for (int p = 0; p < inst.player_count(); ++p) {
    for (int j = 0; j < inst.individual_count(p); ++j) {
      const double v = inst.individual[p][j].value(point.x);
      if (point.active.individual_active(p, j)) {
        if (std::fabs(v) > cfg.activity_tol) return fail("listed-active individual constraint not active");
      } else if (v <= cfg.activity_tol) {
        return fail("listed-inactive individual constraint not strictly positive");
      }
    }
  }
  for (int j = 0; j < inst.shared_count(); ++j) {
    const double v = inst.shared[j].value(point.x);
    if (point.active.shared_active(j)) {
      if (std::fabs(v) > cfg.activity_tol) return fail("listed-active shared constraint not active");
    } else if (v <= cfg.activity_tol) {
      return fail("listed-inactive shared constraint not strictly positive");
    }
  }
  if (point.multipliers.min_value() < -cfg.sign_tol) return fail("negative multiplier");
  const double res = inf_norm(
      lagrangian_pseudogradient(inst, point.x, point.active, point.multipliers, point.r));
  if (res > std::max(cfg.newton_tol * 100.0, 1e-8)) return fail("stationarity residual too large");
  return true;
}

namespace {

struct OracleWorkspace {
  const GnepInstance& inst;
  const RatioParameters& r;
  const SolveConfig& cfg;
  std::vector<double> base;  // x, the profile the others keep playing

  explicit OracleWorkspace(const GnepInstance& inst, const RatioParameters& r,
                           const SolveConfig& cfg, std::span<const double> x)
      : inst(inst), r(r), cfg(cfg), base(x.begin(), x.end()) {}

  double aggregate(std::span<const double> y) const {
    double total = 0.0;
    std::vector<double> t = base;
    for (int p = 0; p < inst.player_count(); ++p) {
      const int off = inst.vars.block_offset(p);
      for (int i = 0; i < inst.vars.dim(p); ++i) t[off + i] = y[off + i];
      total += r[p] * inst.objectives[p].value(t);
      for (int i = 0; i < inst.vars.dim(p); ++i) t[off + i] = base[off + i];
    }
    return total;
  }

  bool admissible(std::span<const double> y) const {
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] < cfg.box_lo[i] - 1e-12 || y[i] > cfg.box_hi[i] + 1e-12) return false;
    return feasible(inst, y, 1e-9);
  }
};

StrategyProfile pattern_search(const OracleWorkspace& ws, StrategyProfile y) {
  const int n = static_cast<int>(y.size());
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> d(n, 0.0);
    d[i] = 1.0;
    dirs.push_back(d);
    d[i] = -1.0;
    dirs.push_back(d);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (const double si : {1.0, -1.0}) {
        for (const double sj : {1.0, -1.0}) {
          std::vector<double> d(n, 0.0);
          d[i] = si;
          d[j] = sj;
          dirs.push_back(d);
        }
      }
    }
  }

  double width = 0.0;
  for (int i = 0; i < n; ++i) width = std::max(width, ws.cfg.box_hi[i] - ws.cfg.box_lo[i]);
  double step = 2.0 * width / (ws.cfg.grid - 1);
  double fy = ws.aggregate(y);
  StrategyProfile trial(n, 0.0);

  int moves = 0;
  while (step > 1e-8 && moves < 100000) {
    bool improved = false;
    for (const auto& d : dirs) {
      for (int i = 0; i < n; ++i) trial[i] = y[i] + step * d[i];
      if (!ws.admissible(trial)) continue;
      const double ft = ws.aggregate(trial);
      if (ft < fy) {
        y = trial;
        fy = ft;
        improved = true;
        ++moves;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return y;
}

// Per-player-block value tables over the block grids, plus the joint feasible
// combinations; lets a grid minimization cost O(sum block grids) expression
// evaluations instead of O(grid^n).
struct BlockGrid {
  std::vector<std::vector<StrategyProfile>> block_points;  // per player, block coords
  std::vector<std::vector<int>> feasible_combos;           // per combo, block index per player

  BlockGrid(const GnepInstance& inst, const SolveConfig& cfg) {
    const int np = inst.player_count();
    block_points.resize(np);
    for (int p = 0; p < np; ++p) {
      const int off = inst.vars.block_offset(p);
      const int dim = inst.vars.dim(p);
      std::vector<int> idx(dim, 0);
      for (;;) {
        StrategyProfile b(dim, 0.0);
        for (int i = 0; i < dim; ++i)
          b[i] = cfg.box_lo[off + i] +
                 (cfg.box_hi[off + i] - cfg.box_lo[off + i]) * idx[i] / (cfg.grid - 1);
        block_points[p].push_back(std::move(b));
        int d = 0;
        while (d < dim && ++idx[d] == cfg.grid) idx[d++] = 0;
        if (d == dim) break;
      }
    }

    // Per-block individual feasibility, then joint shared feasibility.
    std::vector<std::vector<bool>> block_ok(np);
    StrategyProfile y(inst.total_dim(), 0.0);
    for (int p = 0; p < np; ++p) {
      block_ok[p].resize(block_points[p].size(), true);
      const int off = inst.vars.block_offset(p);
      for (std::size_t k = 0; k < block_points[p].size(); ++k) {
        for (int i = 0; i < inst.vars.dim(p); ++i) y[off + i] = block_points[p][k][i];
        for (const auto& g : inst.individual[p]) {
          if (g.value(y) < -1e-9) {
            block_ok[p][k] = false;
            break;
          }
        }
      }
    }

    std::vector<int> combo(np, 0);
    for (;;) {
      bool ok = true;
      for (int p = 0; p < np && ok; ++p) ok = block_ok[p][combo[p]];
      if (ok) {
        for (int p = 0; p < np; ++p) {
          const int off = inst.vars.block_offset(p);
          for (int i = 0; i < inst.vars.dim(p); ++i) y[off + i] = block_points[p][combo[p]][i];
        }
        for (const auto& g : inst.shared) {
          if (g.value(y) < -1e-9) {
            ok = false;
            break;
          }
        }
        if (ok) feasible_combos.push_back(combo);
      }
      int d = 0;
      while (d < np && ++combo[d] == static_cast<int>(block_points[d].size())) combo[d++] = 0;
      if (d == np) break;
    }
  }

  StrategyProfile assemble(const GnepInstance& inst, const std::vector<int>& combo) const {
    StrategyProfile y(inst.total_dim(), 0.0);
    for (int p = 0; p < inst.player_count(); ++p) {
      const int off = inst.vars.block_offset(p);
      for (int i = 0; i < inst.vars.dim(p); ++i) y[off + i] = block_points[p][combo[p]][i];
    }
    return y;
  }

  // Value tables of the aggregate objective against the fixed profile x.
  std::vector<std::vector<double>> tables(const GnepInstance& inst, const RatioParameters& r,
                                          std::span<const double> x) const {
    std::vector<std::vector<double>> t(inst.player_count());
    std::vector<double> work(x.begin(), x.end());
    for (int p = 0; p < inst.player_count(); ++p) {
      const int off = inst.vars.block_offset(p);
      t[p].resize(block_points[p].size());
      for (std::size_t k = 0; k < block_points[p].size(); ++k) {
        for (int i = 0; i < inst.vars.dim(p); ++i) work[off + i] = block_points[p][k][i];
        t[p][k] = r[p] * inst.objectives[p].value(work);
      }
      for (int i = 0; i < inst.vars.dim(p); ++i) work[off + i] = x[off + i];
    }
    return t;
  }
};

OracleResult oracle_with_grid(const GnepInstance& inst, std::span<const double> x,
                              const RatioParameters& r, const SolveConfig& cfg,
                              const BlockGrid& bg) {
  const OracleWorkspace ws(inst, r, cfg, x);

  const std::vector<std::vector<double>> tables = bg.tables(inst, r, x);
  double best = std::numeric_limits<double>::infinity();
  const std::vector<int>* best_combo = nullptr;
  for (const auto& combo : bg.feasible_combos) {
    double v = 0.0;
    for (int p = 0; p < inst.player_count(); ++p) v += tables[p][combo[p]];
    if (v < best) {
      best = v;
      best_combo = &combo;
    }
  }

  bool have_grid = best_combo != nullptr;
  StrategyProfile y_grid;
  double v_grid = std::numeric_limits<double>::infinity();
  if (have_grid) {
    y_grid = pattern_search(ws, bg.assemble(inst, *best_combo));
    v_grid = ws.aggregate(y_grid);
  }

  StrategyProfile xcopy(x.begin(), x.end());
  const bool x_ok = ws.admissible(xcopy);
  OracleResult out;
  if (x_ok) {
    const StrategyProfile y_x = pattern_search(ws, xcopy);
    const double v_x = ws.aggregate(y_x);
    // Prefer the from-x refinement on ties: when the minimizer set is a face
    // containing x, any point of the face is a legitimate answer and the one
    // at x is the informative one.
    if (!have_grid || v_x <= v_grid + 1e-9 * (1.0 + std::fabs(v_grid))) {
      out.minimizer = y_x;
      out.value = v_x;
    } else {
      out.minimizer = y_grid;
      out.value = v_grid;
    }
  } else {
    if (!have_grid) throw Error("no feasible grid point inside the search box");
    out.minimizer = y_grid;
    out.value = v_grid;
  }
  out.residual = inf_dist(out.minimizer, x);
  return out;
}

}  // namespace

OracleResult rho_fixed_point_residual(const GnepInstance& inst, std::span<const double> x,
                                      const RatioParameters& r, const SolveConfig& cfg) {
  if (!inst.convex_flagged()) throw NotConvexFlaggedError();
  cfg.validate(inst);
  const BlockGrid bg(inst, cfg);
  return oracle_with_grid(inst, x, r, cfg, bg);
}

std::vector<OracleScanHit> oracle_near_fixed_points(const GnepInstance& inst,
                                                    const RatioParameters& r,
                                                    const SolveConfig& cfg,
                                                    double residual_threshold) {
  if (!inst.convex_flagged()) throw NotConvexFlaggedError();
  cfg.validate(inst);
  const BlockGrid bg(inst, cfg);

  std::vector<OracleScanHit> hits;
  for (const auto& combo : bg.feasible_combos) {
    const StrategyProfile x = bg.assemble(inst, combo);
    const std::vector<std::vector<double>> tables = bg.tables(inst, r, x);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c2 : bg.feasible_combos) {
      double v = 0.0;
      for (int p = 0; p < inst.player_count(); ++p) v += tables[p][c2[p]];
      best = std::min(best, v);
    }
    double self = 0.0;
    for (int p = 0; p < inst.player_count(); ++p) self += tables[p][combo[p]];
    // Value-gap prefilter: a true near-fixed point cannot be more than a
    // Lipschitz sliver above the grid minimum.
    if (self - best > 1e-5 * (1.0 + std::fabs(best))) continue;
    const OracleResult res = oracle_with_grid(inst, x, r, cfg, bg);
    if (res.residual <= residual_threshold) hits.push_back({x, res.residual});
  }
  return hits;
}

LocalSolutionStatus local_solution_check(const GnepInstance& inst, std::span<const double> x,
                                         int player, double tol) {
  const PerPlayerKktResult pk = per_player_kkt(inst, x, player);
  if (pk.status != PlayerKktStatus::KktWithMultipliers)
    return LocalSolutionStatus::StationarityFails;
  if (inst.convex_flagged()) return LocalSolutionStatus::SecondOrderSufficient;

  const ActiveSetProfile active = active_sets(inst, x);
  const int off = inst.vars.block_offset(player);
  const int dim = inst.vars.dim(player);

  // Own-block Hessian of the player's Lagrangian.
  DenseMatrix h(dim, dim);
  {
    const DenseMatrix hf = inst.objectives[player].hessian(x);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) h(i, j) = hf(off + i, off + j);
    int k = 0;
    for (int j : active.individual[player]) {
      const DenseMatrix hg = inst.individual[player][j].hessian(x);
      const double lam = pk.individual[k++];
      for (int i = 0; i < dim; ++i)
        for (int c = 0; c < dim; ++c) h(i, c) -= lam * hg(off + i, off + c);
    }
    k = 0;
    for (int j : active.shared) {
      const DenseMatrix hg = inst.shared[j].hessian(x);
      const double cap = pk.shared[k++];
      for (int i = 0; i < dim; ++i)
        for (int c = 0; c < dim; ++c) h(i, c) -= cap * hg(off + i, off + c);
    }
  }

  const int m = static_cast<int>(active.individual[player].size() + active.shared.size());
  DenseMatrix rows(m, dim);
  int rr = 0;
  for (int j : active.individual[player]) {
    for (int i = 0; i < dim; ++i)
      rows(rr, i) = inst.individual[player][j].gradient[off + i].evaluate(x);
    ++rr;
  }
  for (int j : active.shared) {
    for (int i = 0; i < dim; ++i) rows(rr, i) = inst.shared[j].gradient[off + i].evaluate(x);
    ++rr;
  }
  const DenseMatrix w = nullspace_basis(rows);
  if (w.cols() == 0) return LocalSolutionStatus::SecondOrderSufficient;

  const DenseMatrix reduced = w.transposed().multiply(h).multiply(w);
  return symmetric_min_eigenvalue(reduced) > tol ? LocalSolutionStatus::SecondOrderSufficient
                                                 : LocalSolutionStatus::SecondOrderNecessaryOnly;
}

}  // namespace gnep
