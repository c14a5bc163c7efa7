#pragma once

#include <span>
#include <string>
#include <vector>

#include "gnep/instance.hpp"
#include "gnep/numerics.hpp"

namespace gnep {

/// Positive weights, one per player. The underlying equilibrium notion is
/// invariant under a global positive rescaling; reported multipliers scale
/// linearly with the weights actually passed in.
struct RatioParameters {
  std::vector<double> r;

  RatioParameters() = default;
  explicit RatioParameters(std::vector<double> values);
  static RatioParameters from_two_player_ratio(double rho);  // r = (rho, 1)

  int size() const { return static_cast<int>(r.size()); }
  double operator[](int i) const { return r[i]; }
  double two_player_ratio() const;            // r[0]/r[1]
  std::vector<double> normalized() const;     // scaled so the first entry is 1
};

/// Multipliers for a fixed active-set profile, stored in the same order the
/// residual map stacks them: player 1 individuals, player 2 individuals, ...,
/// then shared.
struct Multipliers {
  std::vector<std::vector<double>> individual;  // per player, per active index
  std::vector<double> shared;

  std::vector<double> stacked() const;
  static Multipliers from_stacked(std::span<const double> mu, const ActiveSetProfile& active);
  double min_value() const;  // +inf when empty
};

/// A candidate equilibrium produced or validated by the library: the point,
/// its active sets, the common multipliers, the weights, and the numerical
/// evidence gathered along the way.
struct NormalizedKktPoint {
  StrategyProfile x;
  ActiveSetProfile active;
  Multipliers multipliers;
  RatioParameters r;
  double stationarity_residual = 0.0;
  double newton_jacobian_min_singular_value = 0.0;
  bool degenerate_jacobian = false;
};

/// Stacked vector of weighted own-objective gradients: block nu holds
/// r^nu * grad_{x^nu} f^nu(x).
std::vector<double> pseudogradient_objectives(const GnepInstance& inst,
                                              std::span<const double> x,
                                              const RatioParameters& r);

/// n x n Jacobian of the objective pseudogradient.
DenseMatrix jacobian_pseudogradient_objectives(const GnepInstance& inst,
                                               std::span<const double> x,
                                               const RatioParameters& r);

/// Stacked vector of own-variable gradients of the per-player Lagrangians
/// (objective term minus multiplier-weighted active constraints).
std::vector<double> lagrangian_pseudogradient(const GnepInstance& inst,
                                              std::span<const double> x,
                                              const ActiveSetProfile& active,
                                              const Multipliers& mult,
                                              const RatioParameters& r);

/// n x n Jacobian of the Lagrangian pseudogradient in x. Block rows come
/// from different players' Lagrangians, so the matrix is generally not
/// symmetric.
DenseMatrix jacobian_lagrangian_pseudogradient(const GnepInstance& inst,
                                               std::span<const double> x,
                                               const ActiveSetProfile& active,
                                               const Multipliers& mult,
                                               const RatioParameters& r);

/// Residual of the square stationarity-plus-active-constraints system in the
/// unknowns (x, multipliers). Stacks the Lagrangian pseudogradient, the
/// active individual constraint values and the active shared constraint
/// values; size n + (number of active constraints).
std::vector<double> residual_stationarity_system(const GnepInstance& inst,
                                                 std::span<const double> x,
                                                 const ActiveSetProfile& active,
                                                 const Multipliers& mult,
                                                 const RatioParameters& r);

/// Jacobian of the same system with block structure
///   [ J_L   -Dg^T  -DG^T ]
///   [ Dg     0      0    ]
///   [ DG     0      0    ]
/// where Dg stacks full-space gradients of active individual constraints and
/// DG those of active shared constraints.
DenseMatrix jacobian_stationarity_system(const GnepInstance& inst,
                                         std::span<const double> x,
                                         const ActiveSetProfile& active,
                                         const Multipliers& mult,
                                         const RatioParameters& r);

/// Columns of the stationarity system in the multipliers: full-space
/// gradients of the active constraints, individuals first. n x m.
DenseMatrix active_gradient_columns(const GnepInstance& inst, std::span<const double> x,
                                    const ActiveSetProfile& active);

struct MultiplierRecovery {
  Multipliers multipliers;
  double residual;  // |G_L|_inf at the recovered multipliers
  bool full_rank;   // gradient matrix has full column rank (unique solution)
  double min_singular;
  ActiveSetProfile active;
};

/// Least-squares recovery of the common multipliers from the stationarity
/// conditions at a feasible point. When the active gradients are linearly
/// independent the solution is the unique one; otherwise the minimum-norm
/// solution is returned and full_rank is false.
MultiplierRecovery recover_multipliers(const GnepInstance& inst, std::span<const double> x,
                                       const RatioParameters& r,
                                       double activity_tol = kDefaultActivityTol);

enum class PlayerKktStatus { KktWithMultipliers, FritzJohnOnly, StationarityInfeasible };

struct PerPlayerKktResult {
  int player = 0;
  PlayerKktStatus status = PlayerKktStatus::StationarityInfeasible;
  // Multipliers of the player's own problem (unweighted), for the player's
  // active individual and active shared constraints; empty unless status is
  // KktWithMultipliers.
  std::vector<double> individual;
  std::vector<double> shared;
  bool unique = false;  // per-player gradients linearly independent
  double residual = 0.0;
};

/// Classifies one player's stationarity at a feasible point: KKT multipliers
/// exist (found by a sign-constrained feasibility LP), or only a Fritz-John
/// certificate with zero objective weight exists, or neither.
PerPlayerKktResult per_player_kkt(const GnepInstance& inst, std::span<const double> x,
                                  int player, double activity_tol = kDefaultActivityTol);

enum class ConsistencyVerdict { Consistent, Inconsistent, Undecidable };

struct ConsistencyResult {
  ConsistencyVerdict verdict = ConsistencyVerdict::Undecidable;
  std::vector<double> witness_r;  // positive weights proving consistency
  std::string reason;
  // For the zero-vs-positive failure: shared index (0-based) and the
  // per-player multiplier values of that constraint.
  int witness_shared_index = -1;
  std::vector<double> witness_multipliers;
  bool via_unique_multipliers = false;
};

/// Decides whether positive weights exist that make the per-player shared
/// multipliers proportional across players. Uses the unique per-player
/// multipliers when every player's active gradients are independent;
/// otherwise falls back to a joint feasibility LP over weights and common
/// multipliers (weights boxed to [1e-6, 1e6], first weight fixed to 1).
ConsistencyResult normalized_consistency(const GnepInstance& inst, std::span<const double> x,
                                         double activity_tol = kDefaultActivityTol,
                                         double zero_tol = 1e-7);

}  // namespace gnep
