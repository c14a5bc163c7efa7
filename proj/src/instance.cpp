#include "gnep/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gnep {

using nlohmann::json;

std::span<const double> block_view(const VariableTable& vars, std::span<const double> x,
                                   int player) {
  return x.subspan(vars.block_offset(player), vars.dim(player));
}

int ActiveSetProfile::total_active() const {
  int t = static_cast<int>(shared.size());
  for (const auto& s : individual) t += static_cast<int>(s.size());
  return t;
}

bool ActiveSetProfile::individual_active(int player, int j) const {
  const auto& s = individual[player];
  return std::find(s.begin(), s.end(), j) != s.end();
}

bool ActiveSetProfile::shared_active(int j) const {
  return std::find(shared.begin(), shared.end(), j) != shared.end();
}

std::string ActiveSetProfile::key() const {
  std::ostringstream os;
  for (std::size_t p = 0; p < individual.size(); ++p) {
    os << "p" << p + 1 << ":{";
    for (std::size_t k = 0; k < individual[p].size(); ++k) {
      if (k) os << ",";
      os << individual[p][k] + 1;
    }
    os << "} ";
  }
  os << "shared:{";
  for (std::size_t k = 0; k < shared.size(); ++k) {
    if (k) os << ",";
    os << shared[k] + 1;
  }
  os << "}";
  return os.str();
}

std::vector<double> SmoothFunction::gradient_at(std::span<const double> x) const {
  std::vector<double> g(gradient.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) g[i] = gradient[i].evaluate(x);
  return g;
}

namespace {

SmoothFunction make_smooth(const std::string& text, const VariableTable& vars) {
  SmoothFunction f;
  f.expr = parse_expression(text, vars);
  f.gradient = gradient_expressions(f.expr, vars);
  f.hessian = HessianEvaluator(f.expr, vars);
  return f;
}

}  // namespace

GnepInstance load_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("instance document must be a JSON object");
  if (!doc.contains("players") || !doc["players"].is_array() || doc["players"].empty())
    throw SchemaError("'players' must be a nonempty array");

  GnepInstance inst;
  inst.name = doc.value("name", std::string("unnamed"));

  std::vector<int> dims;
  for (const auto& p : doc["players"]) {
    if (!p.is_object() || !p.contains("dim") || !p["dim"].is_number_integer())
      throw SchemaError("each player needs an integer 'dim'");
    const int d = p["dim"].get<int>();
    if (d < 1) throw SchemaError("player 'dim' must be >= 1");
    dims.push_back(d);
  }
  inst.vars = VariableTable(dims);

  const int nplayers = inst.vars.player_count();
  inst.individual.resize(nplayers);
  for (int p = 0; p < nplayers; ++p) {
    const auto& pj = doc["players"][p];
    if (!pj.contains("objective") || !pj["objective"].is_string())
      throw SchemaError("each player needs an 'objective' string");
    inst.objectives.push_back(make_smooth(pj["objective"].get<std::string>(), inst.vars));
    if (pj.contains("individual")) {
      if (!pj["individual"].is_array()) throw SchemaError("'individual' must be an array");
      for (const auto& gj : pj["individual"]) {
        if (!gj.is_string()) throw SchemaError("individual constraints must be strings");
        SmoothFunction g = make_smooth(gj.get<std::string>(), inst.vars);
        const int off = inst.vars.block_offset(p);
        for (int v : g.expr.variables()) {
          if (v < off || v >= off + inst.vars.dim(p))
            throw CrossReferenceError("player " + std::to_string(p + 1) +
                                      " individual constraint '" + gj.get<std::string>() +
                                      "' references variable '" + inst.vars.name(v) + "'");
        }
        inst.individual[p].push_back(std::move(g));
      }
    }
  }

  if (doc.contains("shared")) {
    if (!doc["shared"].is_array()) throw SchemaError("'shared' must be an array");
    for (const auto& gj : doc["shared"]) {
      if (!gj.is_string()) throw SchemaError("shared constraints must be strings");
      inst.shared.push_back(make_smooth(gj.get<std::string>(), inst.vars));
    }
  }

  if (doc.contains("convex")) {
    const auto& cj = doc["convex"];
    if (!cj.is_object()) throw SchemaError("'convex' must be an object");
    inst.convex_c1 = cj.value("c1", false);
    inst.convex_c2 = cj.value("c2", false);
  }

  if (doc.contains("slater_point")) {
    const auto& sj = doc["slater_point"];
    if (!sj.is_array() || static_cast<int>(sj.size()) != inst.total_dim())
      throw SchemaError("'slater_point' must be an array of length n");
    StrategyProfile sp;
    for (const auto& v : sj) {
      if (!v.is_number()) throw SchemaError("'slater_point' entries must be numbers");
      sp.push_back(v.get<double>());
    }
    inst.slater_point = std::move(sp);
  }

  if (doc.contains("declared_gradients")) {
    const auto& dg = doc["declared_gradients"];
    if (!dg.is_array() || static_cast<int>(dg.size()) != nplayers)
      throw SchemaError("'declared_gradients' must have one entry per player");
    std::vector<std::vector<Expr>> all;
    for (int p = 0; p < nplayers; ++p) {
      const auto& row = dg[p];
      if (!row.is_array() || static_cast<int>(row.size()) != inst.total_dim())
        throw SchemaError("each 'declared_gradients' row must have n entries");
      std::vector<Expr> exprs;
      for (const auto& s : row) {
        if (!s.is_string()) throw SchemaError("'declared_gradients' entries must be strings");
        exprs.push_back(parse_expression(s.get<std::string>(), inst.vars));
      }
      all.push_back(std::move(exprs));
    }
    inst.declared_gradients = std::move(all);
  }

  return inst;
}

GnepInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

std::string save_instance(const GnepInstance& inst) {
  json doc;
  doc["name"] = inst.name;
  doc["players"] = json::array();
  for (int p = 0; p < inst.player_count(); ++p) {
    json pj;
    pj["dim"] = inst.vars.dim(p);
    pj["objective"] = inst.objectives[p].expr.to_string();
    json ind = json::array();
    for (const auto& g : inst.individual[p]) ind.push_back(g.expr.to_string());
    pj["individual"] = ind;
    doc["players"].push_back(pj);
  }
  json sh = json::array();
  for (const auto& g : inst.shared) sh.push_back(g.expr.to_string());
  doc["shared"] = sh;
  if (inst.convex_c1 || inst.convex_c2)
    doc["convex"] = {{"c1", inst.convex_c1}, {"c2", inst.convex_c2}};
  if (inst.slater_point) doc["slater_point"] = *inst.slater_point;
  if (inst.declared_gradients) {
    json dg = json::array();
    for (const auto& row : *inst.declared_gradients) {
      json r = json::array();
      for (const auto& e : row) r.push_back(e.to_string());
      dg.push_back(r);
    }
    doc["declared_gradients"] = dg;
  }
  return doc.dump(2);
}

bool feasible(const GnepInstance& inst, std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != inst.total_dim())
    throw Error("point dimension does not match instance");
  for (int p = 0; p < inst.player_count(); ++p)
    for (const auto& g : inst.individual[p])
      if (g.value(x) < -tol) return false;
  for (const auto& g : inst.shared)
    if (g.value(x) < -tol) return false;
  return true;
}

ActiveSetProfile active_sets(const GnepInstance& inst, std::span<const double> x, double tol) {
  if (!feasible(inst, x, tol))
    throw InfeasiblePointError("point is infeasible at tolerance " + std::to_string(tol));
  ActiveSetProfile a;
  a.individual.resize(inst.player_count());
  for (int p = 0; p < inst.player_count(); ++p)
    for (int j = 0; j < inst.individual_count(p); ++j)
      if (std::fabs(inst.individual[p][j].value(x)) <= tol) a.individual[p].push_back(j);
  for (int j = 0; j < inst.shared_count(); ++j)
    if (std::fabs(inst.shared[j].value(x)) <= tol) a.shared.push_back(j);
  return a;
}

std::vector<std::string> convexity_spot_check(const GnepInstance& inst,
                                              std::span<const double> lo,
                                              std::span<const double> hi, int grid) {
  std::vector<std::string> warnings;
  if (grid < 2) return warnings;
  const int n = inst.total_dim();
  std::vector<double> x(n, 0.0);
  std::vector<int> idx(n, 0);
  const double tol = 1e-9;
  for (;;) {
    for (int i = 0; i < n; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (grid - 1);

    if (inst.convex_c1) {
      for (int p = 0; p < inst.player_count(); ++p) {
        const DenseMatrix h = inst.objectives[p].hessian(x);
        const int off = inst.vars.block_offset(p);
        DenseMatrix hb(inst.vars.dim(p), inst.vars.dim(p));
        for (int i = 0; i < inst.vars.dim(p); ++i)
          for (int j = 0; j < inst.vars.dim(p); ++j) hb(i, j) = h(off + i, off + j);
        if (symmetric_min_eigenvalue(hb) < -tol) {
          warnings.push_back("objective of player " + std::to_string(p + 1) +
                             " looks nonconvex in own variables near a sample point");
        }
      }
    }
    if (inst.convex_c2) {
      auto check_concave = [&](const SmoothFunction& g, const std::string& label) {
        const std::vector<double> eig = symmetric_eigenvalues(g.hessian(x));
        if (!eig.empty() && eig.back() > tol)
          warnings.push_back(label + " looks nonconcave near a sample point");
      };
      for (int p = 0; p < inst.player_count(); ++p)
        for (int j = 0; j < inst.individual_count(p); ++j)
          check_concave(inst.individual[p][j],
                        "individual constraint " + std::to_string(j + 1) + " of player " +
                            std::to_string(p + 1));
      for (int j = 0; j < inst.shared_count(); ++j)
        check_concave(inst.shared[j], "shared constraint " + std::to_string(j + 1));
    }

    int d = 0;
    while (d < n && ++idx[d] == grid) idx[d++] = 0;
    if (d == n) break;
    if (!warnings.empty()) break;  // one witness is enough for a warning
  }
  return warnings;
}

}  // namespace gnep
