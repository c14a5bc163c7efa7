#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnep/instance.hpp"
#include "gnep/kkt.hpp"

namespace gnep {

struct SolveConfig {
  std::vector<double> box_lo;  // per coordinate
  std::vector<double> box_hi;
  int grid = 9;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double dedupe_radius = 1e-6;
  double activity_tol = kDefaultActivityTol;
  double sign_tol = 1e-7;
  long long active_set_cap = 4096;
  int threads = 0;  // 0 or 1 = sequential

  static SolveConfig defaults(const GnepInstance& inst, double lo = -2.0, double hi = 2.0);
  void validate(const GnepInstance& inst) const;
};

enum class NewtonStatus { Converged, Diverged, Singular };

struct NewtonOutcome {
  NewtonStatus status = NewtonStatus::Diverged;
  std::vector<double> z;
  double residual = 0.0;
  double min_singular = 0.0;  // of the Jacobian at the final iterate
  double max_singular = 0.0;
  int iterations = 0;
  bool singular_jacobian = false;  // rank-deficient steps were taken
};

using SystemFn = std::function<std::vector<double>(std::span<const double>)>;
using SystemJacobianFn = std::function<DenseMatrix(std::span<const double>)>;

/// Plain Newton iteration on a square system, terminating when |F|_inf <=
/// tol. A Jacobian whose condition estimate exceeds 1e12 switches the step to
/// the minimum-norm pseudoinverse step, which still converges onto solution
/// manifolds of rank-deficient (e.g. continuum) systems; such runs are marked
/// singular_jacobian.
NewtonOutcome newton_refine(const SystemFn& f, const SystemJacobianFn& jac,
                            std::span<const double> start, double tol, int max_iter);

struct ActiveSetStats {
  std::string key;
  int starts = 0;
  int converged = 0;
  int filtered_sign = 0;
  int filtered_feasibility = 0;
  int filtered_ambiguous = 0;  // inactive constraint within the activity band
  int kept = 0;
};

struct DegenerateFamily {
  std::string active_key;
  std::vector<int> members;  // indices into SolveReport::degenerate_points
  StrategyProfile line_origin;
  std::vector<double> line_direction;
  double max_line_deviation = 0.0;
};

struct SolveReport {
  std::vector<NormalizedKktPoint> points;             // regular solutions
  std::vector<NormalizedKktPoint> degenerate_points;  // singular-Jacobian solutions
  std::vector<DegenerateFamily> families;
  std::vector<ActiveSetStats> stats;
  std::vector<std::string> warnings;

  bool degenerate_family_found() const { return !families.empty(); }
};

/// Enumerates candidate normalized KKT points: for every active-set profile,
/// runs Newton on the square stationarity system from every grid start,
/// keeps converged solutions that are feasible with strictly inactive
/// remaining constraints and sign-feasible multipliers, and deduplicates.
/// Solutions with a near-singular system Jacobian are reported separately as
/// candidate continuum members, grouped into families when they align.
SolveReport enumerate_normalized_kkt(const GnepInstance& inst, const RatioParameters& r,
                                     const SolveConfig& cfg);

/// Independent re-validation of a reported point (feasibility, activity
/// pattern, multiplier signs, stationarity residual). Returns false and
/// fills `why` when some invariant fails.
bool validate_kkt_point(const GnepInstance& inst, const NormalizedKktPoint& point,
                        const SolveConfig& cfg, std::string* why = nullptr);

struct OracleResult {
  StrategyProfile minimizer;
  double residual = 0.0;  // |minimizer - x|_inf
  double value = 0.0;     // aggregate objective at the minimizer
};

/// Fixed-point test for the aggregate best-response map: minimizes
/// sum_nu r^nu f^nu(y^nu, x^{-nu}) over the feasible set intersected with the
/// box, by grid search plus pattern-search refinement (coordinate and
/// coordinate-pair directions, step halving, 1e-8 termination). A residual
/// near zero certifies x as an approximate fixed point. Deliberately
/// independent of the Newton machinery. Requires the convexity flags.
OracleResult rho_fixed_point_residual(const GnepInstance& inst, std::span<const double> x,
                                      const RatioParameters& r, const SolveConfig& cfg);

struct OracleScanHit {
  StrategyProfile x;
  double residual;
};

/// Scans every feasible grid point and returns those whose fixed-point
/// residual is at most `residual_threshold`. A cheap value-gap prefilter
/// keeps the scan quadratic-free; the full oracle runs only on survivors.
std::vector<OracleScanHit> oracle_near_fixed_points(const GnepInstance& inst,
                                                    const RatioParameters& r,
                                                    const SolveConfig& cfg,
                                                    double residual_threshold);

enum class LocalSolutionStatus {
  SecondOrderSufficient,
  SecondOrderNecessaryOnly,
  StationarityFails
};

/// Desk-scale proxy for "the player's block solves its own problem": checks
/// per-player KKT and then the projected own-block Hessian of the player's
/// Lagrangian on the player's active tangent space. Classification only, not
/// a global optimality proof.
LocalSolutionStatus local_solution_check(const GnepInstance& inst, std::span<const double> x,
                                         int player, double tol = 1e-8);

}  // namespace gnep
