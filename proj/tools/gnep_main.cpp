// Command-line front end: solve, certify, sweep, check-derivs, oracle.
//
// Exit codes are a stable contract:
//   0 success, 2 usage/input error, 3 no solution found, 4 degenerate,
//   5 not a normalized KKT point, 6 derivative mismatch, 7 oracle reject.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gnep/certify.hpp"
#include "gnep/fixtures.hpp"
#include "gnep/instance.hpp"
#include "gnep/kkt.hpp"
#include "gnep/report_json.hpp"
#include "gnep/solver.hpp"
#include "gnep/sweep.hpp"

namespace {

using nlohmann::json;
using namespace gnep;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNoSolution = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitNotNormalized = 5;
constexpr int kExitDerivativeMismatch = 6;
constexpr int kExitOracleReject = 7;

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw Error("empty entry in '" + text + "'");
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw Error("expected comma-separated reals, got '" + text + "'");
  return out;
}

std::vector<double> parse_colon(const std::string& text, int expected) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) out.push_back(std::stod(tok));
  if (static_cast<int>(out.size()) != expected)
    throw Error("expected " + std::to_string(expected) + " colon-separated values in '" + text +
                "'");
  return out;
}

int env_threads() {
  if (const char* env = std::getenv("GNEP_THREADS"); env && *env) {
    const int t = std::atoi(env);
    return t > 0 ? t : 0;
  }
  return 0;
}

struct SolverFlags {
  std::string box = "-2:2";
  std::vector<std::string> box_dims;
  int grid = 9;
  double newton_tol = 1e-10;
  int newton_maxit = 50;
  double dedupe = 1e-6;
  double activity_tol = 1e-8;
  double sign_tol = 1e-7;
  long long cap = 4096;

  void attach(CLI::App* cmd) {
    cmd->add_option("--box", box, "search box lo:hi applied to every coordinate");
    cmd->add_option("--box-dim", box_dims,
                    "per-coordinate override i:lo:hi (1-based), repeatable");
    cmd->add_option("--grid", grid, "grid resolution per dimension");
    cmd->add_option("--tol-newton", newton_tol, "Newton residual tolerance");
    cmd->add_option("--maxit", newton_maxit, "Newton iteration cap");
    cmd->add_option("--dedupe", dedupe, "deduplication radius");
    cmd->add_option("--tol-activity", activity_tol, "activity tolerance");
    cmd->add_option("--tol-sign", sign_tol, "multiplier sign tolerance");
    cmd->add_option("--cap", cap, "active-set combination cap");
  }

  SolveConfig to_config(const GnepInstance& inst) const {
    const std::vector<double> b = parse_colon(box, 2);
    SolveConfig cfg = SolveConfig::defaults(inst, b[0], b[1]);
    for (const auto& od : box_dims) {
      const std::vector<double> v = parse_colon(od, 3);
      const int i = static_cast<int>(v[0]) - 1;
      if (i < 0 || i >= inst.total_dim()) throw Error("--box-dim index out of range");
      cfg.box_lo[i] = v[1];
      cfg.box_hi[i] = v[2];
    }
    cfg.grid = grid;
    cfg.newton_tol = newton_tol;
    cfg.newton_max_iter = newton_maxit;
    cfg.dedupe_radius = dedupe;
    cfg.activity_tol = activity_tol;
    cfg.sign_tol = sign_tol;
    cfg.active_set_cap = cap;
    cfg.threads = env_threads();
    return cfg;
  }

  json echo() const {
    return json{{"box", box},       {"grid", grid},           {"tol_newton", newton_tol},
                {"maxit", newton_maxit}, {"dedupe", dedupe},  {"tol_activity", activity_tol},
                {"tol_sign", sign_tol},  {"cap", cap}};
  }
};

json active_to_json(const ActiveSetProfile& a) {
  json ind = json::array();
  for (const auto& s : a.individual) {
    json one = json::array();
    for (int j : s) one.push_back(j + 1);
    ind.push_back(one);
  }
  json sh = json::array();
  for (int j : a.shared) sh.push_back(j + 1);
  return json{{"individual", ind}, {"shared", sh}};
}

json point_to_json(const NormalizedKktPoint& p) {
  json mult_ind = json::array();
  for (const auto& pl : p.multipliers.individual) mult_ind.push_back(pl);
  return json{{"x", p.x},
              {"active", active_to_json(p.active)},
              {"individual_multipliers", mult_ind},
              {"shared_multipliers", p.multipliers.shared},
              {"stationarity_residual", p.stationarity_residual},
              {"jacobian_min_singular_value", p.newton_jacobian_min_singular_value},
              {"degenerate_jacobian", p.degenerate_jacobian}};
}

json certificate_to_json(const CertificateReport& c) {
  json players = json::array();
  for (const auto& d : c.players) {
    players.push_back(json{{"player", d.player + 1},
                           {"licq", d.licq},
                           {"rank", d.rank},
                           {"required_rank", d.required_rank},
                           {"mfcq", d.mfcq},
                           {"mfcq_lp_optimum", d.mfcq_lp_optimum},
                           {"kkt_status", d.kkt_status == PlayerKktStatus::KktWithMultipliers
                                              ? "kkt"
                                              : d.kkt_status == PlayerKktStatus::FritzJohnOnly
                                                    ? "fritz_john_only"
                                                    : "stationarity_infeasible"},
                           {"strict_complementarity", d.strict_complementarity}});
  }
  json nd2{{"holds", c.nd2.holds}, {"vacuous", c.nd2.vacuous}};
  if (!c.nd2.vacuous) nd2["min_multiplier"] = c.nd2.min_multiplier;
  json nd3{{"holds", c.nd3.holds},
           {"vacuous", c.nd3.vacuous},
           {"tangent_dimension", c.nd3.tangent_dimension}};
  if (!c.nd3.vacuous && c.nd3.tangent_dimension > 0) {
    nd3["min_singular_value"] = c.nd3.min_singular;
    nd3["reduced_determinant"] = c.nd3.reduced_determinant;
  }
  json out{{"nd1_gnep_licq",
            json{{"holds", c.gnep_licq.holds},
                 {"rank", c.gnep_licq.rank},
                 {"required_rank", c.gnep_licq.required_rank},
                 {"min_singular_value", c.gnep_licq.min_singular}}},
           {"gnep_mfcq",
            json{{"holds", c.gnep_mfcq.holds}, {"lp_optimum", c.gnep_mfcq.lp_optimum},
                 {"witness", c.gnep_mfcq.witness}}},
           {"nd2", nd2},
           {"nd3", nd3},
           {"players", players},
           {"nondegenerate", c.nondegenerate}};
  if (c.c3_sample) {
    out["c3_sample"] = json{{"refuted", c.c3_sample->refuted},
                            {"min_eigenvalue", c.c3_sample->min_eigenvalue},
                            {"samples", c.c3_sample->samples}};
  }
  return out;
}

struct Reporter {
  json report;
  bool as_json;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Reporter(const std::string& command, const std::string& instance, bool as_json)
      : as_json(as_json) {
    report["command"] = command;
    report["instance"] = instance;
    report["warnings"] = json::array();
  }

  void warn(const std::string& w) { report["warnings"].push_back(w); }

  int finish(int code) {
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report["wall_time_seconds"] = dt;
    report["exit_code"] = code;
    if (as_json) std::cout << dump_json(report);
    return code;
  }
};

void print_certificate_text(const CertificateReport& cert) {
  std::cout << "  ND1 (joint LICQ):      " << (cert.gnep_licq.holds ? "holds" : "FAILS")
            << "  rank " << cert.gnep_licq.rank << "/" << cert.gnep_licq.required_rank
            << ", min singular value " << cert.gnep_licq.min_singular << "\n";
  std::cout << "  ND2 (strict compl.):   " << (cert.nd2.holds ? "holds" : "FAILS");
  if (cert.nd2.vacuous)
    std::cout << "  (no active constraints)";
  else
    std::cout << "  min multiplier " << cert.nd2.min_multiplier;
  std::cout << "\n";
  std::cout << "  ND3 (reduced Jacobian):" << (cert.nd3.holds ? " holds" : " FAILS")
            << "  tangent dim " << cert.nd3.tangent_dimension;
  if (cert.nd3.vacuous)
    std::cout << " (trivial tangent space)";
  else
    std::cout << ", min singular value " << cert.nd3.min_singular << ", reduced determinant "
              << cert.nd3.reduced_determinant;
  std::cout << "\n";
  std::cout << "  joint MFCQ:            " << (cert.gnep_mfcq.holds ? "holds" : "FAILS")
            << "  (LP optimum " << cert.gnep_mfcq.lp_optimum << ")\n";
  for (const auto& d : cert.players) {
    std::cout << "  player " << d.player + 1 << ": own LICQ "
              << (d.licq ? "holds" : "FAILS") << " (rank " << d.rank << "/" << d.required_rank
              << "), own MFCQ " << (d.mfcq ? "holds" : "FAILS") << " (t* = "
              << d.mfcq_lp_optimum << "), "
              << (d.kkt_status == PlayerKktStatus::KktWithMultipliers
                      ? "KKT"
                      : d.kkt_status == PlayerKktStatus::FritzJohnOnly ? "Fritz-John only"
                                                                       : "not stationary")
              << "\n";
  }
}

int cmd_solve(const std::string& path, const std::string& r_text, const SolverFlags& flags,
              bool as_json) {
  const GnepInstance inst = load_instance_file(path);
  Reporter rep("solve", inst.name, as_json);
  rep.report["config"] = flags.echo();
  rep.report["config"]["r"] = parse_csv(r_text);

  const RatioParameters r{parse_csv(r_text)};
  const SolveConfig cfg = flags.to_config(inst);
  const SolveReport sr = enumerate_normalized_kkt(inst, r, cfg);
  for (const auto& w : sr.warnings) rep.warn(w);

  json points = json::array();
  for (const auto& p : sr.points) points.push_back(point_to_json(p));
  json degen = json::array();
  for (const auto& p : sr.degenerate_points) degen.push_back(point_to_json(p));
  json stats = json::array();
  for (const auto& s : sr.stats) {
    stats.push_back(json{{"active_set", s.key},
                         {"starts", s.starts},
                         {"converged", s.converged},
                         {"filtered_sign", s.filtered_sign},
                         {"filtered_feasibility", s.filtered_feasibility},
                         {"filtered_ambiguous", s.filtered_ambiguous},
                         {"kept", s.kept}});
  }
  json families = json::array();
  for (const auto& fam : sr.families) {
    families.push_back(json{{"active_set", fam.active_key},
                            {"members", fam.members.size()},
                            {"line_origin", fam.line_origin},
                            {"line_direction", fam.line_direction},
                            {"max_line_deviation", fam.max_line_deviation}});
  }
  rep.report["results"] =
      json{{"points", points}, {"degenerate_points", degen}, {"families", families},
           {"stats", stats}};

  if (!as_json) {
    std::cout << "instance " << inst.name << ": " << sr.points.size() << " solution(s), "
              << sr.degenerate_points.size() << " degenerate candidate(s)\n";
    for (const auto& p : sr.points) {
      std::cout << "  x = (";
      for (std::size_t i = 0; i < p.x.size(); ++i)
        std::cout << (i ? ", " : "") << p.x[i];
      std::cout << ")  active " << p.active.key() << "  residual "
                << p.stationarity_residual << "\n";
    }
    for (const auto& w : sr.warnings) std::cout << "warning: " << w << "\n";
  }
  const bool any = !sr.points.empty() || !sr.degenerate_points.empty();
  return rep.finish(any ? kExitOk : kExitNoSolution);
}

int cmd_certify(const std::string& path, const std::string& point_text,
                const std::string& r_text, double stat_tol, bool as_json) {
  const GnepInstance inst = load_instance_file(path);
  Reporter rep("certify", inst.name, as_json);
  const std::vector<double> x = parse_csv(point_text);
  const RatioParameters r{parse_csv(r_text)};
  rep.report["config"] = json{{"point", x}, {"r", r.r}, {"tol_stationarity", stat_tol}};

  if (static_cast<int>(x.size()) != inst.total_dim())
    throw Error("point dimension does not match instance");

  if (!feasible(inst, x)) {
    rep.report["results"] = json{{"classification", "infeasible"}};
    if (!as_json) std::cout << "point is infeasible: not a normalized KKT point\n";
    return rep.finish(kExitNotNormalized);
  }

  const MultiplierRecovery rec = recover_multipliers(inst, x, r);
  rep.report["results"]["stationarity_residual"] = rec.residual;
  rep.report["results"]["multipliers_unique"] = rec.full_rank;
  if (!rec.full_rank)
    rep.warn("active gradients are rank deficient; multipliers are not unique");

  // Cross-player diagnostics are informative in every outcome.
  json per_player = json::array();
  for (int p = 0; p < inst.player_count(); ++p) {
    const PerPlayerKktResult pk = per_player_kkt(inst, x, p);
    per_player.push_back(
        json{{"player", p + 1},
             {"status", pk.status == PlayerKktStatus::KktWithMultipliers
                            ? "kkt"
                            : pk.status == PlayerKktStatus::FritzJohnOnly
                                  ? "fritz_john_only"
                                  : "stationarity_infeasible"},
             {"unique", pk.unique},
             {"individual_multipliers", pk.individual},
             {"shared_multipliers", pk.shared}});
  }
  rep.report["results"]["per_player"] = per_player;
  const ConsistencyResult cons = normalized_consistency(inst, x);
  json cj{{"verdict", cons.verdict == ConsistencyVerdict::Consistent
                          ? "consistent"
                          : cons.verdict == ConsistencyVerdict::Inconsistent ? "inconsistent"
                                                                             : "undecidable"},
          {"reason", cons.reason}};
  if (!cons.witness_r.empty()) cj["witness_r"] = cons.witness_r;
  if (cons.witness_shared_index >= 0) {
    cj["witness_shared_index"] = cons.witness_shared_index + 1;
    cj["witness_multipliers"] = cons.witness_multipliers;
  }
  rep.report["results"]["normalized_consistency"] = cj;

  if (rec.residual > stat_tol) {
    rep.report["results"]["classification"] = "not_normalized_kkt";
    if (!as_json) {
      std::cout << "stationarity residual " << rec.residual << " exceeds " << stat_tol
                << ": not a normalized KKT point for these weights\n";
      if (cons.verdict == ConsistencyVerdict::Inconsistent) {
        std::cout << "consistency: " << cons.reason << "\n";
        if (!cons.witness_multipliers.empty()) {
          std::cout << "  per-player multipliers:";
          for (double v : cons.witness_multipliers) std::cout << " " << v;
          std::cout << "\n";
        }
      }
    }
    return rep.finish(kExitNotNormalized);
  }

  NormalizedKktPoint pt;
  pt.x = x;
  pt.active = rec.active;
  pt.multipliers = rec.multipliers;
  pt.r = r;
  pt.stationarity_residual = rec.residual;

  const CertificateReport cert = check_nondegenerate(inst, pt);
  rep.report["results"]["point"] = point_to_json(pt);
  rep.report["results"]["certificate"] = certificate_to_json(cert);
  rep.report["results"]["classification"] = cert.nondegenerate ? "nondegenerate" : "degenerate";

  if (!as_json) {
    std::cout << "normalized KKT point (stationarity residual " << rec.residual << ")\n";
    std::cout << "  shared multipliers:";
    for (double v : pt.multipliers.shared) std::cout << " " << v;
    std::cout << "\n";
    print_certificate_text(cert);
    std::cout << (cert.nondegenerate ? "NONDEGENERATE" : "DEGENERATE") << "\n";
  }
  return rep.finish(cert.nondegenerate ? kExitOk : kExitDegenerate);
}

int cmd_sweep(const std::string& path, const std::string& range, const std::string& out_path,
              const SolverFlags& flags, bool as_json) {
  const GnepInstance inst = load_instance_file(path);
  Reporter rep("sweep", inst.name, as_json);
  const std::vector<double> parts = parse_colon(range, 3);
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(lo <= hi)) throw Error("ratio range must satisfy lo <= hi, step > 0");
  std::vector<double> ratios;
  for (double v = lo; v <= hi + 1e-12; v += step) ratios.push_back(v);
  if (ratios.empty()) throw Error("empty ratio range");
  rep.report["config"] = flags.echo();
  rep.report["config"]["ratios"] = ratios;

  const SolveConfig cfg = flags.to_config(inst);
  const std::vector<SweepRow> rows = sweep_ratio(inst, ratios, cfg);

  json jrows = json::array();
  for (const auto& row : rows) {
    json entries = json::array();
    for (const auto& e : row.entries) {
      json entry = point_to_json(e.point);
      entry["nondegenerate"] = e.certificate.nondegenerate;
      entry["nd2"] = e.certificate.nd2.holds;
      entry["nd3"] = e.certificate.nd3.holds;
      entry["family_member"] = e.family_member;
      entries.push_back(entry);
    }
    jrows.push_back(json{{"ratio", row.ratio},
                         {"r", row.r.r},
                         {"entries", entries},
                         {"family_warning", row.family_warning}});
    if (row.family_warning)
      rep.warn("degenerate family at ratio " + std::to_string(row.ratio));
  }
  rep.report["results"] = json{{"rows", jrows}};

  const FamilyFitResult fit = interior_family_fit(rows);
  if (fit.ok) {
    rep.report["results"]["interior_family_fit"] =
        json{{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"d", fit.d}, {"residual", fit.residual}};
  }

  const std::string tsv = sweep_tsv(inst, rows);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << tsv;
    rep.report["results"]["tsv_path"] = out_path;
  }

  if (!as_json) {
    for (const auto& row : rows) {
      std::cout << "ratio " << row.ratio << ": " << row.entries.size() << " point(s)";
      if (row.family_warning) std::cout << "  [degenerate family]";
      std::cout << "\n";
      for (const auto& e : row.entries) {
        std::cout << "  x = (";
        for (std::size_t i = 0; i < e.point.x.size(); ++i)
          std::cout << (i ? ", " : "") << e.point.x[i];
        std::cout << ") " << (e.certificate.nondegenerate ? "nondegenerate" : "degenerate")
                  << (e.family_member ? " family-member" : "") << "\n";
      }
    }
    if (out_path.empty()) std::cout << tsv;
  }
  return rep.finish(kExitOk);
}

int cmd_check_derivs(const std::string& path, int samples, unsigned seed,
                     const std::string& box, bool as_json) {
  const GnepInstance inst = load_instance_file(path);
  Reporter rep("check-derivs", inst.name, as_json);
  rep.report["config"] = json{{"samples", samples}, {"seed", seed}, {"box", box}};
  const std::vector<double> b = parse_colon(box, 2);
  const int n = inst.total_dim();

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(b[0], b[1]);
  const double h = 1e-5;

  struct Item {
    std::string label;
    const SmoothFunction* f;
  };
  std::vector<Item> items;
  for (int p = 0; p < inst.player_count(); ++p) {
    items.push_back({"objective_p" + std::to_string(p + 1), &inst.objectives[p]});
    for (int j = 0; j < inst.individual_count(p); ++j)
      items.push_back({"individual_p" + std::to_string(p + 1) + "_" + std::to_string(j + 1),
                       &inst.individual[p][j]});
  }
  for (int j = 0; j < inst.shared_count(); ++j)
    items.push_back({"shared_" + std::to_string(j + 1), &inst.shared[j]});

  bool ok = true;
  json table = json::array();
  auto tolerable = [](double exact, double diff) {
    return std::fabs(diff) <= std::max(1e-6 * std::fabs(exact), 1e-8);
  };

  for (const auto& item : items) {
    double max_grad_err = 0.0, max_hess_err = 0.0;
    bool item_ok = true;
    for (int s = 0; s < samples; ++s) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = uni(rng);
      std::vector<double> xp = x, xm = x;
      for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double fd = (item.f->value(xp) - item.f->value(xm)) / (2.0 * h);
        const double exact = item.f->gradient[i].evaluate(x);
        max_grad_err = std::max(max_grad_err, std::fabs(exact - fd));
        if (!tolerable(exact, exact - fd)) item_ok = false;
        xp[i] = x[i];
        xm[i] = x[i];
      }
      const DenseMatrix hess = item.f->hessian(x);
      for (int j = 0; j < n; ++j) {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        for (int i = 0; i < n; ++i) {
          const double fd =
              (item.f->gradient[i].evaluate(xp) - item.f->gradient[i].evaluate(xm)) / (2.0 * h);
          max_hess_err = std::max(max_hess_err, std::fabs(hess(i, j) - fd));
          if (!tolerable(hess(i, j), hess(i, j) - fd)) item_ok = false;
        }
        xp[j] = x[j];
        xm[j] = x[j];
      }
    }
    ok = ok && item_ok;
    table.push_back(json{{"expression", item.label},
                         {"max_gradient_error", max_grad_err},
                         {"max_hessian_error", max_hess_err},
                         {"ok", item_ok}});
  }

  if (inst.declared_gradients) {
    for (int p = 0; p < inst.player_count(); ++p) {
      double max_err = 0.0;
      bool item_ok = true;
      std::mt19937 rng2(seed + 17u);
      for (int s = 0; s < samples; ++s) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = uni(rng2);
        std::vector<double> xp = x, xm = x;
        for (int i = 0; i < n; ++i) {
          xp[i] = x[i] + h;
          xm[i] = x[i] - h;
          const double fd =
              (inst.objectives[p].value(xp) - inst.objectives[p].value(xm)) / (2.0 * h);
          const double declared = (*inst.declared_gradients)[p][i].evaluate(x);
          max_err = std::max(max_err, std::fabs(declared - fd));
          if (!tolerable(fd, declared - fd)) item_ok = false;
          xp[i] = x[i];
          xm[i] = x[i];
        }
      }
      ok = ok && item_ok;
      table.push_back(json{{"expression", "declared_gradient_p" + std::to_string(p + 1)},
                           {"max_gradient_error", max_err},
                           {"ok", item_ok}});
    }
  }

  rep.report["results"] = json{{"expressions", table}, {"all_ok", ok}};
  if (!as_json) {
    for (const auto& row : table)
      std::cout << row["expression"].get<std::string>() << ": "
                << (row["ok"].get<bool>() ? "ok" : "MISMATCH") << "\n";
    std::cout << (ok ? "all derivatives match finite differences\n"
                     : "derivative mismatch detected\n");
  }
  return rep.finish(ok ? kExitOk : kExitDerivativeMismatch);
}

int cmd_oracle(const std::string& path, const std::string& point_text, const std::string& r_text,
               int grid, double tol_residual, const std::string& box, bool as_json) {
  const GnepInstance inst = load_instance_file(path);
  Reporter rep("oracle", inst.name, as_json);
  const std::vector<double> x = parse_csv(point_text);
  const RatioParameters r{parse_csv(r_text)};
  rep.report["config"] =
      json{{"point", x}, {"r", r.r}, {"grid", grid}, {"tol_residual", tol_residual}, {"box", box}};

  const std::vector<double> b = parse_colon(box, 2);
  SolveConfig cfg = SolveConfig::defaults(inst, b[0], b[1]);
  cfg.grid = grid;

  const OracleResult res = rho_fixed_point_residual(inst, x, r, cfg);
  rep.report["results"] = json{{"minimizer", res.minimizer},
                               {"residual", res.residual},
                               {"aggregate_value", res.value}};
  if (!as_json) {
    std::cout << "best-response minimizer: (";
    for (std::size_t i = 0; i < res.minimizer.size(); ++i)
      std::cout << (i ? ", " : "") << res.minimizer[i];
    std::cout << ")\nfixed-point residual: " << res.residual << "\n";
  }
  return rep.finish(res.residual <= tol_residual ? kExitOk : kExitOracleReject);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized equilibrium solver and nondegeneracy certifier for generalized "
               "Nash problems with shared constraints"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit a machine-readable JSON report on stdout");

  std::string path, r_text = "1", point_text, range, out_path;
  SolverFlags flags;
  int samples = 100;
  unsigned seed = 20240501u;
  std::string box = "-2:2";
  int oracle_grid = 201;
  double tol_residual = 1e-3;
  double stat_tol = 1e-6;

  CLI::App* solve = app.add_subcommand("solve", "enumerate normalized KKT points");
  solve->add_option("instance", path, "instance JSON file")->required();
  solve->add_option("--r", r_text, "weights, comma separated")->required();
  flags.attach(solve);

  CLI::App* certify = app.add_subcommand("certify", "certify one candidate point");
  certify->add_option("instance", path, "instance JSON file")->required();
  certify->add_option("--point", point_text, "candidate point, comma separated")->required();
  certify->add_option("--r", r_text, "weights, comma separated")->required();
  certify->add_option("--tol-stationarity", stat_tol, "residual threshold for acceptance");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep the two-player weight ratio");
  sweep->add_option("instance", path, "instance JSON file")->required();
  sweep->add_option("--ratios", range, "ratio range lo:hi:step")->required();
  sweep->add_option("--out", out_path, "write the TSV table to this path");
  flags.attach(sweep);

  CLI::App* derivs = app.add_subcommand("check-derivs", "finite-difference derivative check");
  derivs->add_option("instance", path, "instance JSON file")->required();
  derivs->add_option("--samples", samples, "random sample count");
  derivs->add_option("--seed", seed, "random seed");
  derivs->add_option("--box", box, "sampling box lo:hi");

  CLI::App* oracle = app.add_subcommand("oracle", "aggregate best-response fixed-point test");
  oracle->add_option("instance", path, "instance JSON file")->required();
  oracle->add_option("--point", point_text, "candidate point, comma separated")->required();
  oracle->add_option("--r", r_text, "weights, comma separated")->required();
  oracle->add_option("--grid", oracle_grid, "oracle grid resolution");
  oracle->add_option("--tol-residual", tol_residual, "acceptance threshold");
  oracle->add_option("--box", box, "search box lo:hi");

  // Let global flags such as --json appear after the subcommand arguments.
  for (CLI::App* sub : {solve, certify, sweep, derivs, oracle}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(path, r_text, flags, as_json);
    if (certify->parsed()) return cmd_certify(path, point_text, r_text, stat_tol, as_json);
    if (sweep->parsed()) return cmd_sweep(path, range, out_path, flags, as_json);
    if (derivs->parsed()) return cmd_check_derivs(path, samples, seed, box, as_json);
    if (oracle->parsed()) return cmd_oracle(path, point_text, r_text, oracle_grid, tol_residual,
                                            box, as_json);
  } catch (const NotConvexFlaggedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
