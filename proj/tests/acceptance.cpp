// Acceptance suite: reproduces the headline behaviors end to end and prints
// one pass/fail line per criterion. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gnep/certify.hpp"
#include "gnep/fixtures.hpp"
#include "gnep/kkt.hpp"
#include "gnep/solver.hpp"
#include "gnep/sweep.hpp"

using namespace gnep;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      why << what;
      ok = false;
    }
  }
  void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << " (got " << got << ", want " << want << " +/- " << tol << ")";
      expect(false, os.str());
    }
  }
};

double inf_dist(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

Fixture fx(const char* name) { return load_fixture(name, GNEP_FIXTURE_DIR); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GNEP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

NormalizedKktPoint recovered_point(const GnepInstance& inst, const std::vector<double>& x,
                                   const RatioParameters& r) {
  const MultiplierRecovery rec = recover_multipliers(inst, x, r);
  NormalizedKktPoint pt;
  pt.x = x;
  pt.active = rec.active;
  pt.multipliers = rec.multipliers;
  pt.r = r;
  pt.stationarity_residual = rec.residual;
  return pt;
}

// ---- criterion bodies ------------------------------------------------------

void criterion_1(Check& c) {
  const GnepInstance ex3 = fx("ex3_individual_degen").instance;
  const std::vector<double> x{0.5, 0.5};

  const MultiplierRecovery rec = recover_multipliers(ex3, x, RatioParameters({1.0, 2.0}));
  c.expect(rec.multipliers.shared.size() == 2, "two active shared constraints expected");
  if (rec.multipliers.shared.size() == 2) {
    c.expect_near(rec.multipliers.shared[0], 1.5, 1e-8, "first multiplier");
    c.expect_near(rec.multipliers.shared[1], 0.5, 1e-8, "second multiplier");
  }
  const CertificateReport cert =
      check_nondegenerate(ex3, recovered_point(ex3, x, RatioParameters({1.0, 2.0})));
  c.expect(cert.nondegenerate, "point must certify nondegenerate at weights (1,2)");
  c.expect(cert.nd3.vacuous && cert.nd3.tangent_dimension == 0,
           "trivial tangent space expected");

  const MultiplierRecovery flipped = recover_multipliers(ex3, x, RatioParameters({2.0, 1.0}));
  c.expect_near(flipped.multipliers.shared[1], -0.5, 1e-8, "sign-violating multiplier");
  const CertificateReport cert2 =
      check_nondegenerate(ex3, recovered_point(ex3, x, RatioParameters({2.0, 1.0})));
  c.expect(!cert2.nd2.holds, "strict complementarity must fail at weights (2,1)");
}

void criterion_2(Check& c) {
  const GnepInstance ex4p = fx("ex4_perturbed").instance;
  const SolveConfig cfg = SolveConfig::defaults(ex4p);
  const SolveReport rep = enumerate_normalized_kkt(ex4p, RatioParameters({1.0, 1.0}), cfg);
  c.expect(rep.points.size() == 1 && rep.degenerate_points.empty(),
           "exactly one equilibrium expected");
  if (rep.points.size() == 1) {
    const NormalizedKktPoint& p = rep.points[0];
    c.expect(inf_dist(p.x, std::vector<double>{2.0 / 3.0, 1.0 / 3.0}) <= 1e-8,
             "equilibrium location");
    c.expect(p.multipliers.shared.size() == 1, "single active shared constraint");
    if (p.multipliers.shared.size() == 1)
      c.expect_near(p.multipliers.shared[0], 1.0 - 2.0 * 0.1 / 3.0, 1e-8, "multiplier value");
    const CertificateReport cert = check_nondegenerate(ex4p, p);
    c.expect_near(cert.nd3.reduced_determinant, 0.3, 1e-8, "reduced-Jacobian witness");
    c.expect(cert.nondegenerate, "perturbed equilibrium must be nondegenerate");
  }

  const GnepInstance ex4 = fx("ex4_family").instance;
  const SolveReport fam =
      enumerate_normalized_kkt(ex4, RatioParameters({1.0, 1.0}), SolveConfig::defaults(ex4));
  c.expect(fam.degenerate_family_found(), "degenerate family flag must be raised at ratio 1");
}

void criterion_3(Check& c) {
  const GnepInstance ex5 = fx("ex5_compar").instance;
  const SolveConfig cfg = SolveConfig::defaults(ex5);

  const std::vector<SweepRow> rows = sweep_ratio(ex5, {0.4, 1.0, 2.0}, cfg);
  const std::vector<std::vector<std::vector<double>>> want = {
      {{0.5, 0.5}},
      {{1.0, 0.0}, {0.5, 0.5}, {2.0 / 3.0, 1.0 / 3.0}},
      {{1.0, 0.0}}};
  for (int i = 0; i < 3; ++i) {
    c.expect(rows[i].entries.size() == want[i].size(),
             "equilibrium count at ratio " + std::to_string(rows[i].ratio));
    for (const auto& w : want[i]) {
      bool found = false;
      for (const auto& e : rows[i].entries)
        if (inf_dist(e.point.x, w) <= 1e-6) found = true;
      c.expect(found, "expected equilibrium missing at ratio " + std::to_string(rows[i].ratio));
    }
  }

  const std::vector<SweepRow> fit_rows = sweep_ratio(ex5, {0.75, 1.0, 1.25}, cfg);
  const FamilyFitResult fit = interior_family_fit(fit_rows);
  c.expect(fit.ok, "interior family fit must succeed");
  if (fit.ok) {
    c.expect(fit.residual <= 1e-8, "family fit residual");
    for (double rho : {0.75, 1.0, 1.25})
      c.expect_near(fit.eval(rho), (rho - 0.5) / (rho + 0.5), 1e-8, "family location law");
  }

  const std::vector<double> lo{-2.0, -2.0}, hi{2.0, 2.0};
  const C3Report c3 =
      check_c3_sampled(ex5, RatioParameters({1.0, 1.0}), feasible_grid_samples(ex5, lo, hi, 9));
  c.expect(c3.refuted, "definiteness must be refuted on samples");
  c.expect_near(c3.min_eigenvalue, -0.75, 1e-8, "sampled minimum eigenvalue");
}

void criterion_4(Check& c) {
  const std::string fixture_dir = GNEP_FIXTURE_DIR;
  // Each diagnostic must finish inside a second on its own.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const GnepInstance ex1 = fx("ex1_fj").instance;
    const std::vector<double> origin3{0.0, 0.0, 0.0};
    c.expect(per_player_kkt(ex1, origin3, 0).status == PlayerKktStatus::FritzJohnOnly,
             "player 1 must classify Fritz-John-only");
    const MfcqReport pm = check_player_mfcq(ex1, origin3, 0);
    c.expect(std::fabs(pm.lp_optimum) <= 1e-9 && !pm.holds,
             "player 1 constraint-qualification LP optimum must be zero");
    const LicqReport licq = check_gnep_licq(ex1, origin3);
    c.expect(licq.holds && licq.rank == 2, "joint LICQ must hold with rank 2");
    c.expect(run_cli("certify " + fixture_dir + "/ex1_fj.json --point 0,0,0 --r 1,1") == 5,
             "exit code 5 for the Fritz-John failure");
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(dt < 1.0, "Fritz-John diagnostic too slow");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const GnepInstance ex2 = fx("ex2_strictcomp").instance;
    const ConsistencyResult cons = normalized_consistency(ex2, std::vector<double>{0.0, 0.0});
    c.expect(cons.verdict == ConsistencyVerdict::Inconsistent,
             "origin must be inconsistent for every weight vector");
    c.expect(cons.witness_multipliers.size() == 2 &&
                 std::fabs(cons.witness_multipliers[0]) <= 1e-9 &&
                 std::fabs(cons.witness_multipliers[1] - 0.5) <= 1e-9,
             "witness pair (0, 1/2)");
    c.expect(run_cli("certify " + fixture_dir + "/ex2_strictcomp.json --point 0,0 --r 1,1") == 5,
             "exit code 5 for the strict-complementarity failure");
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(dt < 1.0, "strict-complementarity diagnostic too slow");
  }
}

void criterion_5(Check& c) {
  std::mt19937 rng(987654321u);
  const double h = 1e-5;
  for (const char* name : kFixtureNames) {
    const GnepInstance inst = fx(name).instance;
    const int n = inst.total_dim();
    std::uniform_real_distribution<double> uni(-2.0, 2.0);

    std::vector<const SmoothFunction*> fns;
    for (int p = 0; p < inst.player_count(); ++p) {
      fns.push_back(&inst.objectives[p]);
      for (int j = 0; j < inst.individual_count(p); ++j) fns.push_back(&inst.individual[p][j]);
    }
    for (int j = 0; j < inst.shared_count(); ++j) fns.push_back(&inst.shared[j]);

    for (int s = 0; s < 100; ++s) {
      std::vector<double> x(n);
      for (double& v : x) v = uni(rng);
      for (const SmoothFunction* f : fns) {
        std::vector<double> xp = x, xm = x;
        for (int i = 0; i < n; ++i) {
          xp[i] = x[i] + h;
          xm[i] = x[i] - h;
          const double fd = (f->value(xp) - f->value(xm)) / (2 * h);
          const double exact = f->gradient[i].evaluate(x);
          if (!(std::fabs(exact - fd) <= std::max(1e-6 * std::fabs(exact), 1e-8))) {
            c.expect(false, std::string("gradient mismatch in ") + name);
            return;
          }
          xp[i] = x[i];
          xm[i] = x[i];
        }
        const DenseMatrix hess = f->hessian(x);
        for (int j = 0; j < n; ++j) {
          xp[j] = x[j] + h;
          xm[j] = x[j] - h;
          for (int i = 0; i < n; ++i) {
            const double fd =
                (f->gradient[i].evaluate(xp) - f->gradient[i].evaluate(xm)) / (2 * h);
            if (!(std::fabs(hess(i, j) - fd) <=
                  std::max(1e-6 * std::fabs(hess(i, j)), 1e-8))) {
              c.expect(false, std::string("hessian mismatch in ") + name);
              return;
            }
          }
          xp[j] = x[j];
          xm[j] = x[j];
        }
      }
    }
  }
}

struct ConvexCase {
  const char* name;
  std::vector<double> r;
};

const std::vector<ConvexCase>& convex_cases() {
  static const std::vector<ConvexCase> cases = {
      {"ex3_individual_degen", {1.0, 2.0}},
      {"ex4_perturbed", {1.0, 1.0}},
      {"ex5_compar", {1.0, 1.0}},
      {"trivial_1p", {1.0}},
      {"trivial_unconstrained", {1.0}},
  };
  return cases;
}

void criterion_6(Check& c) {
  for (const auto& cc : convex_cases()) {
    const GnepInstance inst = fx(cc.name).instance;
    const RatioParameters r{cc.r};
    const SolveConfig solve_cfg = SolveConfig::defaults(inst);
    SolveConfig oracle_cfg = SolveConfig::defaults(inst);
    oracle_cfg.grid = 201;

    const SolveReport rep = enumerate_normalized_kkt(inst, r, solve_cfg);
    std::vector<NormalizedKktPoint> outputs = rep.points;
    outputs.insert(outputs.end(), rep.degenerate_points.begin(), rep.degenerate_points.end());
    c.expect(!outputs.empty(), std::string("no solver output on ") + cc.name);

    for (const auto& p : outputs) {
      const OracleResult res = rho_fixed_point_residual(inst, p.x, r, oracle_cfg);
      if (!(res.residual <= 1e-3)) {
        std::ostringstream os;
        os << "fixed-point residual " << res.residual << " too large on " << cc.name;
        c.expect(false, os.str());
      }
    }

    const std::vector<OracleScanHit> hits = oracle_near_fixed_points(inst, r, oracle_cfg, 1e-6);
    for (const auto& h : hits) {
      bool near = false;
      for (const auto& p : outputs)
        if (inf_dist(h.x, p.x) <= 1e-3) near = true;
      if (!near) {
        std::ostringstream os;
        os << "grid fixed point not matched by any solver output on " << cc.name << " at (";
        for (std::size_t i = 0; i < h.x.size(); ++i) os << (i ? "," : "") << h.x[i];
        os << ")";
        c.expect(false, os.str());
      }
    }
  }
}

void criterion_7(Check& c) {
  std::mt19937 rng(13571113u);
  std::uniform_real_distribution<double> ball(-1e-3, 1e-3);

  auto restart_newton = [&](const GnepInstance& inst, const NormalizedKktPoint& p)
      -> std::vector<std::vector<double>> {
    const int n = inst.total_dim();
    const int m = p.active.total_active();
    SystemFn f = [&](std::span<const double> z) {
      const Multipliers mult = Multipliers::from_stacked(z.subspan(n), p.active);
      return residual_stationarity_system(inst, z.subspan(0, n), p.active, mult, p.r);
    };
    SystemJacobianFn j = [&](std::span<const double> z) {
      const Multipliers mult = Multipliers::from_stacked(z.subspan(n), p.active);
      return jacobian_stationarity_system(inst, z.subspan(0, n), p.active, mult, p.r);
    };
    std::vector<double> z0(n + m);
    std::copy(p.x.begin(), p.x.end(), z0.begin());
    const std::vector<double> mu = p.multipliers.stacked();
    std::copy(mu.begin(), mu.end(), z0.begin() + n);

    std::vector<std::vector<double>> results;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> z = z0;
      for (double& v : z) v += ball(rng);
      const NewtonOutcome out = newton_refine(f, j, z, 1e-10, 50);
      if (out.status == NewtonStatus::Converged)
        results.emplace_back(out.z.begin(), out.z.begin() + n);
    }
    return results;
  };

  // Nondegenerate points: every restart must come home.
  for (const auto& cc : convex_cases()) {
    const GnepInstance inst = fx(cc.name).instance;
    const RatioParameters r{cc.r};
    const SolveReport rep = enumerate_normalized_kkt(inst, r, SolveConfig::defaults(inst));
    for (const auto& p : rep.points) {
      if (!check_nondegenerate(inst, p).nondegenerate) continue;
      const auto results = restart_newton(inst, p);
      c.expect(results.size() == 20,
               std::string("all restarts must converge on ") + cc.name);
      for (const auto& xr : results) {
        const double d = inf_dist(xr, p.x);
        if (d > 1e-6) {
          std::ostringstream os;
          os << "restart drifted " << d << " from its equilibrium on " << cc.name;
          c.expect(d > 1e-2, os.str());  // anything in (1e-6, 1e-2] is a distinct solution
          c.expect(false, "locally unique point lost under restart on " +
                              std::string(cc.name));
        }
      }
    }
  }

  // Degenerate family: restarts must scatter onto distinct members.
  const GnepInstance ex4 = fx("ex4_family").instance;
  const SolveReport fam =
      enumerate_normalized_kkt(ex4, RatioParameters({1.0, 1.0}), SolveConfig::defaults(ex4));
  c.expect(!fam.degenerate_points.empty(), "family member expected");
  if (!fam.degenerate_points.empty()) {
    const auto results = restart_newton(ex4, fam.degenerate_points.front());
    std::vector<std::vector<double>> distinct;
    for (const auto& xr : results) {
      bool dup = false;
      for (const auto& d : distinct)
        if (inf_dist(xr, d) <= 1e-6) dup = true;
      if (!dup) distinct.push_back(xr);
    }
    c.expect(distinct.size() >= 2,
             "restarts from a continuum member must find distinct family members");
  }
}

void criterion_8(Check& c) {
  const double s = 3.7;

  // Multipliers scale exactly linearly.
  struct Case {
    const char* name;
    std::vector<double> x;
    std::vector<double> r;
  };
  const Case cases[] = {
      {"ex3_individual_degen", {0.5, 0.5}, {1.0, 2.0}},
      {"ex5_compar", {1.0, 0.0}, {1.0, 1.0}},
      {"trivial_1p", {1.0}, {1.0}},
  };
  for (const auto& cs : cases) {
    const GnepInstance inst = fx(cs.name).instance;
    std::vector<double> rs = cs.r;
    for (double& v : rs) v *= s;
    const MultiplierRecovery a = recover_multipliers(inst, cs.x, RatioParameters{cs.r});
    const MultiplierRecovery b = recover_multipliers(inst, cs.x, RatioParameters{rs});
    const std::vector<double> am = a.multipliers.stacked();
    const std::vector<double> bm = b.multipliers.stacked();
    for (std::size_t i = 0; i < am.size(); ++i)
      c.expect(std::fabs(bm[i] - s * am[i]) <= 1e-12 * (1.0 + std::fabs(s * am[i])),
               std::string("multiplier scaling on ") + cs.name);
  }

  // The solution set is invariant under global rescaling.
  for (const char* name : {"ex4_perturbed", "ex5_compar"}) {
    const GnepInstance inst = fx(name).instance;
    const SolveConfig cfg = SolveConfig::defaults(inst);
    const SolveReport a = enumerate_normalized_kkt(inst, RatioParameters({1.0, 1.0}), cfg);
    const SolveReport b = enumerate_normalized_kkt(inst, RatioParameters({s, s}), cfg);
    c.expect(a.points.size() == b.points.size(),
             std::string("solution count changed under rescaling on ") + name);
    for (const auto& p : a.points) {
      bool found = false;
      for (const auto& q : b.points)
        if (inf_dist(p.x, q.x) <= 1e-9) found = true;
      c.expect(found, std::string("solution moved under rescaling on ") + name);
    }
  }
}

void criterion_9(Check& c) {
  for (double eps : {0.1, 0.01}) {
    const GnepInstance inst = make_ex4_perturbed(eps);
    const SolveReport rep =
        enumerate_normalized_kkt(inst, RatioParameters({1.0, 1.0}), SolveConfig::defaults(inst));
    c.expect(!rep.degenerate_family_found(),
             "no degenerate family after perturbation eps=" + std::to_string(eps));
    std::vector<NormalizedKktPoint> outputs = rep.points;
    outputs.insert(outputs.end(), rep.degenerate_points.begin(), rep.degenerate_points.end());
    c.expect(!outputs.empty(), "perturbed instance must have equilibria");
    for (const auto& p : outputs)
      c.expect(check_nondegenerate(inst, p).nondegenerate,
               "every equilibrium must certify nondegenerate at eps=" + std::to_string(eps));
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<void(Check&)> body;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Criterion> criteria = {
      {1, "two-constraint vertex: multipliers, vacuous reduced block, sign flip", criterion_1, 1.0},
      {2, "perturbed continuum: unique nondegenerate equilibrium and family flag", criterion_2, 5.0},
      {3, "ratio table, interior family law, refuted definiteness", criterion_3, 10.0},
      {4, "failure diagnostics: Fritz-John player, zero-vs-positive multipliers", criterion_4, 2.0},
      {5, "exact derivatives match finite differences on every fixture", criterion_5, 0.0},
      {6, "solver outputs and best-response fixed points coincide", criterion_6, 0.0},
      {7, "nondegenerate points are restart-stable; the continuum is not", criterion_7, 0.0},
      {8, "weights enter multipliers linearly; solution sets are scale-invariant", criterion_8, 0.0},
      {9, "perturbation restores nondegeneracy at both strengths", criterion_9, 0.0},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (crit.time_limit > 0.0 && dt > crit.time_limit) {
      std::ostringstream os;
      os << "runtime " << dt << "s exceeds " << crit.time_limit << "s";
      c.expect(false, os.str());
    }
    if (c.ok) {
      std::printf("[PASS] criterion %d: %s (%.2fs)\n", crit.id, crit.label, dt);
    } else {
      std::printf("[FAIL] criterion %d: %s (%.2fs) -- %s\n", crit.id, crit.label, dt,
                  c.why.str().c_str());
      ++failures;
    }
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
