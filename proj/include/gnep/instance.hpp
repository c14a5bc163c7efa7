#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnep/expr.hpp"
#include "gnep/numerics.hpp"

namespace gnep {

/// A point in the joint strategy space, stored flat. Player blocks follow the
/// layout of the instance's VariableTable.
using StrategyProfile = std::vector<double>;

std::span<const double> block_view(const VariableTable& vars, std::span<const double> x,
                                   int player);

/// Active individual constraint indices per player plus the active shared
/// constraint indices, all 0-based and sorted.
struct ActiveSetProfile {
  std::vector<std::vector<int>> individual;
  std::vector<int> shared;

  int total_active() const;
  bool individual_active(int player, int j) const;
  bool shared_active(int j) const;
  std::string key() const;  // canonical text form, 1-based for readability
};

/// A smooth function together with its precomputed first and second
/// derivatives. All gradients are full-space (length n); individual
/// constraints simply have zero entries outside their player's block.
struct SmoothFunction {
  Expr expr;
  std::vector<Expr> gradient;  // length n
  HessianEvaluator hessian;    // n x n

  double value(std::span<const double> x) const { return expr.evaluate(x); }
  std::vector<double> gradient_at(std::span<const double> x) const;
};

struct GnepInstance {
  std::string name;
  VariableTable vars;
  std::vector<SmoothFunction> objectives;               // per player
  std::vector<std::vector<SmoothFunction>> individual;  // per player
  std::vector<SmoothFunction> shared;
  bool convex_c1 = false;
  bool convex_c2 = false;
  std::optional<StrategyProfile> slater_point;
  // Optional user-supplied objective gradient expressions, one list of n
  // strings per player, cross-checked by the derivative check command.
  std::optional<std::vector<std::vector<Expr>>> declared_gradients;

  int player_count() const { return vars.player_count(); }
  int total_dim() const { return vars.total_dim(); }
  int individual_count(int player) const { return static_cast<int>(individual[player].size()); }
  int shared_count() const { return static_cast<int>(shared.size()); }
  bool convex_flagged() const { return convex_c1 && convex_c2; }
};

GnepInstance load_instance(const std::string& json_text);
GnepInstance load_instance_file(const std::string& path);
std::string save_instance(const GnepInstance& inst);

constexpr double kDefaultActivityTol = 1e-8;

bool feasible(const GnepInstance& inst, std::span<const double> x,
              double tol = kDefaultActivityTol);

/// Indices whose constraint value lies within tol of zero. The point must be
/// feasible at the same tolerance.
ActiveSetProfile active_sets(const GnepInstance& inst, std::span<const double> x,
                             double tol = kDefaultActivityTol);

/// Warning-level convexity probe: samples Hessian eigenvalues of objectives
/// (in own variables) and constraints on a small grid and reports violations
/// of the declared c1/c2 flags. Never authoritative.
std::vector<std::string> convexity_spot_check(const GnepInstance& inst,
                                              std::span<const double> lo,
                                              std::span<const double> hi, int grid);

}  // namespace gnep
