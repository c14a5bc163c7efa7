#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnep/errors.hpp"
#include "gnep/numerics.hpp"

namespace gnep {

/// Maps declared variables (player index, coordinate within the player's
/// block) to flat indices 0..n-1, grouped by player in declaration order.
/// Canonical names are "x<p>" for one-dimensional players and "x<p>_<i>"
/// otherwise, both 1-based.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<int> dims);

  int player_count() const { return static_cast<int>(dims_.size()); }
  int dim(int player) const { return dims_[player]; }
  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const { return total_; }
  int block_offset(int player) const { return offsets_[player]; }
  int player_of(int flat) const;

  const std::string& name(int flat) const { return names_[flat]; }
  std::optional<int> index_of(std::string_view name) const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  std::vector<std::string> names_;
  int total_ = 0;
};

/// Immutable expression tree over real literals, declared variables, the four
/// arithmetic operations, unary minus and nonnegative integer powers.
/// Expressions are closed under differentiation and safe to share across
/// threads.
class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double value);
  static Expr variable(int flat_index, std::string name);

  double evaluate(std::span<const double> x) const;
  Expr differentiate(int flat_var) const;

  bool is_constant() const;
  bool is_zero() const;
  double constant_value() const;  // valid only when is_constant()

  /// Sorted unique flat indices of the variables appearing in the tree.
  std::vector<int> variables() const;

  std::string to_string() const;

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  friend Expr operator-(const Expr&);
  Expr pow(int exponent) const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr parse_expression(std::string_view text, const VariableTable& vars);

/// Full-space gradient: one expression per flat coordinate.
std::vector<Expr> gradient_expressions(const Expr& e, const VariableTable& vars);

/// Gradient restricted to one player's block (length n_player).
std::vector<Expr> block_gradient_expressions(const Expr& e, const VariableTable& vars,
                                             int player);

/// Precomputed evaluators built from symbolic derivatives.
class GradientEvaluator {
 public:
  GradientEvaluator() = default;
  GradientEvaluator(const Expr& e, const VariableTable& vars);
  std::vector<double> operator()(std::span<const double> x) const;
  const std::vector<Expr>& parts() const { return parts_; }

 private:
  std::vector<Expr> parts_;
};

/// Hessian evaluator. Second derivatives commute for this grammar, so only
/// the upper triangle is stored and the result is exactly symmetric.
class HessianEvaluator {
 public:
  HessianEvaluator() = default;
  HessianEvaluator(const Expr& e, const VariableTable& vars);
  DenseMatrix operator()(std::span<const double> x) const;

 private:
  int n_ = 0;
  std::vector<Expr> upper_;  // row-major upper triangle including diagonal
};

}  // namespace gnep
