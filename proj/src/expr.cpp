#include "gnep/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace gnep {

VariableTable::VariableTable(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error("at least one player required");
  offsets_.reserve(dims_.size());
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    if (dims_[p] < 1) throw Error("player dimension must be >= 1");
    offsets_.push_back(total_);
    for (int i = 0; i < dims_[p]; ++i) {
      if (dims_[p] == 1) {
        names_.push_back("x" + std::to_string(p + 1));
      } else {
        names_.push_back("x" + std::to_string(p + 1) + "_" + std::to_string(i + 1));
      }
    }
    total_ += dims_[p];
  }
}

int VariableTable::player_of(int flat) const {
  for (int p = player_count() - 1; p >= 0; --p)
    if (flat >= offsets_[p]) return p;
  throw Error("flat index out of range");
}

std::optional<int> VariableTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

struct Expr::Node {
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow };
  Kind kind;
  double value = 0.0;    // Constant
  int var = -1;          // Variable
  std::string var_name;  // Variable, for printing
  int exponent = 0;      // Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::Constant && n->value == v;
}

NodePtr make_add(NodePtr a, NodePtr b);
NodePtr make_sub(NodePtr a, NodePtr b);
NodePtr make_mul(NodePtr a, NodePtr b);
NodePtr make_div(NodePtr a, NodePtr b);
NodePtr make_neg(NodePtr a);
NodePtr make_pow(NodePtr a, int k);

NodePtr make_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
    return make_constant(a->value + b->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
    return make_constant(a->value - b->value);
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
    return make_constant(a->value * b->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant &&
      std::fabs(b->value) > 1e-300)
    return make_constant(a->value / b->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (a->kind == Node::Kind::Constant) return make_constant(-a->value);
  if (a->kind == Node::Kind::Neg) return a->a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_pow(NodePtr a, int k) {
  if (k < 0) throw Error("negative exponent");
  if (k == 0) return make_constant(1.0);
  if (k == 1) return a;
  if (a->kind == Node::Kind::Constant) return make_constant(std::pow(a->value, k));
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Pow;
  n->exponent = k;
  n->a = std::move(a);
  return n;
}

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case Node::Kind::Constant:
      return n.value;
    case Node::Kind::Variable:
      if (n.var < 0 || n.var >= static_cast<int>(x.size()))
        throw EvaluationError("point dimension does not match variable table");
      return x[n.var];
    case Node::Kind::Add:
      return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Node::Kind::Sub:
      return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Node::Kind::Mul:
      return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Node::Kind::Div: {
      const double den = eval_node(*n.b, x);
      if (std::fabs(den) <= 1e-300) throw EvaluationError("division by zero");
      return eval_node(*n.a, x) / den;
    }
    case Node::Kind::Neg:
      return -eval_node(*n.a, x);
    case Node::Kind::Pow: {
      const double base = eval_node(*n.a, x);
      double r = 1.0;
      for (int i = 0; i < n.exponent; ++i) r *= base;
      return r;
    }
  }
  throw EvaluationError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->kind) {
    case Node::Kind::Constant:
      return make_constant(0.0);
    case Node::Kind::Variable:
      return make_constant(n->var == var ? 1.0 : 0.0);
    case Node::Kind::Add:
      return make_add(diff_node(n->a, var), diff_node(n->b, var));
    case Node::Kind::Sub:
      return make_sub(diff_node(n->a, var), diff_node(n->b, var));
    case Node::Kind::Mul:
      return make_add(make_mul(diff_node(n->a, var), n->b),
                      make_mul(n->a, diff_node(n->b, var)));
    case Node::Kind::Div:
      // (u/v)' = (u'v - uv') / v^2
      return make_div(make_sub(make_mul(diff_node(n->a, var), n->b),
                               make_mul(n->a, diff_node(n->b, var))),
                      make_pow(n->b, 2));
    case Node::Kind::Neg:
      return make_neg(diff_node(n->a, var));
    case Node::Kind::Pow:
      return make_mul(make_mul(make_constant(n->exponent), make_pow(n->a, n->exponent - 1)),
                      diff_node(n->a, var));
  }
  throw Error("corrupt expression node");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Printing uses minimal parentheses; precedence: +,- < *,/ < unary- < ^.
int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub:
      return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div:
      return 2;
    case Node::Kind::Neg:
      return 3;
    case Node::Kind::Pow:
      return 4;
    case Node::Kind::Constant:
    case Node::Kind::Variable:
      return 5;
  }
  return 5;
}

void print_node(const Node& n, std::string& out, int parent_prec, bool rhs_of_sub_or_div) {
  const int prec = precedence(n);
  const bool parens =
      prec < parent_prec || (prec == parent_prec && rhs_of_sub_or_div) ||
      (n.kind == Node::Kind::Constant && n.value < 0.0 && parent_prec > 1);
  if (parens) out += "(";
  switch (n.kind) {
    case Node::Kind::Constant:
      out += format_double(n.value);
      break;
    case Node::Kind::Variable:
      out += n.var_name;
      break;
    case Node::Kind::Add:
      print_node(*n.a, out, prec, false);
      out += " + ";
      print_node(*n.b, out, prec, false);
      break;
    case Node::Kind::Sub:
      print_node(*n.a, out, prec, false);
      out += " - ";
      print_node(*n.b, out, prec, true);
      break;
    case Node::Kind::Mul:
      print_node(*n.a, out, prec, false);
      out += "*";
      print_node(*n.b, out, prec, false);
      break;
    case Node::Kind::Div:
      print_node(*n.a, out, prec, false);
      out += "/";
      print_node(*n.b, out, prec, true);
      break;
    case Node::Kind::Neg:
      out += "-";
      print_node(*n.a, out, prec + 1, false);
      break;
    case Node::Kind::Pow:
      print_node(*n.a, out, prec + 1, false);
      out += "^";
      out += std::to_string(n.exponent);
      break;
  }
  if (parens) out += ")";
}

}  // namespace

Expr::Expr() : node_(make_constant(0.0)) {}

Expr Expr::constant(double value) { return Expr(make_constant(value)); }

Expr Expr::variable(int flat_index, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->var = flat_index;
  n->var_name = std::move(name);
  return Expr(std::move(n));
}

double Expr::evaluate(std::span<const double> x) const { return eval_node(*node_, x); }

Expr Expr::differentiate(int flat_var) const { return Expr(diff_node(node_, flat_var)); }

bool Expr::is_constant() const { return node_->kind == Node::Kind::Constant; }

bool Expr::is_zero() const { return is_const(node_, 0.0); }

double Expr::constant_value() const {
  if (!is_constant()) throw Error("expression is not a constant");
  return node_->value;
}

namespace {

void collect_vars(const Node& n, std::vector<int>& out) {
  if (n.kind == Node::Kind::Variable) out.push_back(n.var);
  if (n.a) collect_vars(*n.a, out);
  if (n.b) collect_vars(*n.b, out);
}

}  // namespace

std::vector<int> Expr::variables() const {
  std::vector<int> out;
  collect_vars(*node_, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string Expr::to_string() const {
  std::string out;
  print_node(*node_, out, 0, false);
  return out;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(make_add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make_sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make_mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make_div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(make_neg(a.node_)); }
Expr Expr::pow(int exponent) const { return Expr(make_pow(node_, exponent)); }

namespace {

// Recursive-descent parser.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' integer)?
//   atom   := number | identifier | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, const VariableTable& vars) : text_(text), vars_(vars) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw SyntaxError(pos_, std::string("unexpected '") + text_[pos_] +
                                  "', expected operator or end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = e + parse_term();
      } else if (eat('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (eat('*')) {
        e = e * parse_factor();
      } else if (eat('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    if (eat('-')) return -parse_factor();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (eat('^')) {
      skip_ws();
      const std::size_t start = pos_;
      int k = 0;
      bool any = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        k = k * 10 + (text_[pos_] - '0');
        ++pos_;
        any = true;
        if (k > 1000) throw SyntaxError(start, "exponent too large");
      }
      if (!any) throw SyntaxError(pos_, "expected a nonnegative integer exponent after '^'");
      return base.pow(k);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "expected number, variable or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(pos_, std::string("unexpected '") + c + "', expected number, variable or '('");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t dstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == dstart) throw SyntaxError(pos_, "expected digits in exponent");
    }
    const std::string tok(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw SyntaxError(start, "malformed number '" + tok + "'");
      return Expr::constant(v);
    } catch (const std::invalid_argument&) {
      throw SyntaxError(start, "malformed number '" + tok + "'");
    } catch (const std::out_of_range&) {
      throw SyntaxError(start, "number out of range '" + tok + "'");
    }
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    const auto idx = vars_.index_of(name);
    if (!idx) throw UnknownVariableError(name);
    return Expr::variable(*idx, name);
  }

  std::string_view text_;
  const VariableTable& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, const VariableTable& vars) {
  return Parser(text, vars).parse();
}

std::vector<Expr> gradient_expressions(const Expr& e, const VariableTable& vars) {
  std::vector<Expr> g;
  g.reserve(vars.total_dim());
  for (int i = 0; i < vars.total_dim(); ++i) g.push_back(e.differentiate(i));
  return g;
}

std::vector<Expr> block_gradient_expressions(const Expr& e, const VariableTable& vars,
                                             int player) {
  std::vector<Expr> g;
  g.reserve(vars.dim(player));
  const int off = vars.block_offset(player);
  for (int i = 0; i < vars.dim(player); ++i) g.push_back(e.differentiate(off + i));
  return g;
}

GradientEvaluator::GradientEvaluator(const Expr& e, const VariableTable& vars)
    : parts_(gradient_expressions(e, vars)) {}

std::vector<double> GradientEvaluator::operator()(std::span<const double> x) const {
  std::vector<double> g(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) g[i] = parts_[i].evaluate(x);
  return g;
}

HessianEvaluator::HessianEvaluator(const Expr& e, const VariableTable& vars)
    : n_(vars.total_dim()) {
  upper_.reserve(static_cast<std::size_t>(n_) * (n_ + 1) / 2);
  for (int i = 0; i < n_; ++i) {
    const Expr di = e.differentiate(i);
    for (int j = i; j < n_; ++j) upper_.push_back(di.differentiate(j));
  }
}

DenseMatrix HessianEvaluator::operator()(std::span<const double> x) const {
  DenseMatrix h(n_, n_);
  std::size_t k = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j, ++k) {
      const double v = upper_[k].evaluate(x);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

}  // namespace gnep
