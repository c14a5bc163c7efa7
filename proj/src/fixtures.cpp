#include "gnep/fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gnep {

using nlohmann::json;

const char* const kFixtureNames[8] = {
    "ex1_fj",        "ex2_strictcomp", "ex3_individual_degen", "ex4_family",
    "ex4_perturbed", "ex5_compar",     "trivial_1p",           "trivial_unconstrained"};

std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv("GNEP_FIXTURES_DIR"); env && *env) return env;
#ifdef GNEP_DEFAULT_FIXTURE_DIR
  return GNEP_DEFAULT_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<int, double> parse_index_map(const json& j) {
  std::map<int, double> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[std::stoi(it.key())] = it.value().get<double>();
  return out;
}

ExpectedManifest parse_manifest(const json& doc) {
  ExpectedManifest m;
  m.instance = doc.value("instance", std::string());
  for (const auto& e : doc.value("solves", json::array())) {
    ExpectedSolve s;
    s.r = e.at("r").get<std::vector<double>>();
    s.exact_count = e.value("exact_count", true);
    s.family_expected = e.value("family", false);
    s.provenance = e.value("provenance", std::string());
    for (const auto& q : e.value("equilibria", json::array())) {
      ExpectedEquilibrium eq;
      eq.x = q.at("x").get<std::vector<double>>();
      if (q.contains("shared")) eq.shared_multipliers = parse_index_map(q["shared"]);
      if (q.contains("individual"))
        for (auto it = q["individual"].begin(); it != q["individual"].end(); ++it)
          eq.individual_multipliers[std::stoi(it.key())] = parse_index_map(it.value());
      if (q.contains("nondegenerate")) eq.nondegenerate = q["nondegenerate"].get<bool>();
      eq.tol = q.value("tol", 1e-8);
      s.equilibria.push_back(std::move(eq));
    }
    m.solves.push_back(std::move(s));
  }
  for (const auto& e : doc.value("player_statuses", json::array())) {
    ExpectedPlayerStatus p;
    p.x = e.at("x").get<std::vector<double>>();
    p.player = e.at("player").get<int>() - 1;
    p.status = e.at("status").get<std::string>();
    if (e.contains("shared")) p.shared_multipliers = parse_index_map(e["shared"]);
    p.provenance = e.value("provenance", std::string());
    m.player_statuses.push_back(std::move(p));
  }
  for (const auto& e : doc.value("consistency", json::array())) {
    ExpectedConsistency c;
    c.x = e.at("x").get<std::vector<double>>();
    c.consistent = e.at("consistent").get<bool>();
    c.witness_shared_index = e.value("witness_shared_index", -1);
    if (e.contains("witness_multipliers"))
      c.witness_multipliers = e["witness_multipliers"].get<std::vector<double>>();
    c.provenance = e.value("provenance", std::string());
    m.consistency.push_back(std::move(c));
  }
  for (const auto& e : doc.value("c3", json::array())) {
    ExpectedC3 c;
    c.r = e.at("r").get<std::vector<double>>();
    c.refuted = e.at("refuted").get<bool>();
    c.min_eigenvalue = e.value("min_eigenvalue", 0.0);
    c.tol = e.value("tol", 1e-8);
    c.provenance = e.value("provenance", std::string());
    m.c3.push_back(std::move(c));
  }
  for (const auto& e : doc.value("nd3_values", json::array())) {
    ExpectedNd3Value v;
    v.r = e.at("r").get<std::vector<double>>();
    v.x = e.at("x").get<std::vector<double>>();
    v.value = e.at("value").get<double>();
    v.tol = e.value("tol", 1e-8);
    v.provenance = e.value("provenance", std::string());
    m.nd3_values.push_back(std::move(v));
  }
  return m;
}

}  // namespace

Fixture load_fixture(const std::string& name) { return load_fixture(name, default_fixture_dir()); }

Fixture load_fixture(const std::string& name, const std::filesystem::path& dir) {
  bool known = false;
  for (const char* n : kFixtureNames)
    if (name == n) known = true;
  if (!known) throw UnknownFixtureError(name);

  Fixture f;
  f.instance = load_instance(slurp(dir / (name + ".json")));
  json mdoc;
  try {
    mdoc = json::parse(slurp(dir / (name + ".expected.json")));
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid manifest JSON: ") + e.what());
  }
  f.manifest = parse_manifest(mdoc);
  return f;
}

GnepInstance make_ex4_perturbed(double eps) {
  if (!(eps > 0.0)) throw Error("perturbation size must be positive");
  char half[40], full[40];
  std::snprintf(half, sizeof half, "%.17g", eps / 2.0);
  std::snprintf(full, sizeof full, "%.17g", eps);
  json doc;
  doc["name"] = "ex4_perturbed";
  doc["players"] = json::array();
  doc["players"].push_back(
      {{"dim", 1}, {"objective", std::string("-x1 + ") + half + "*x1^2"}, {"individual", json::array()}});
  doc["players"].push_back(
      {{"dim", 1}, {"objective", std::string("-x2 + ") + full + "*x2^2"}, {"individual", json::array()}});
  doc["shared"] = {"1 - x1 - x2", "x1 - x2", "x2"};
  doc["convex"] = {{"c1", true}, {"c2", true}};
  doc["slater_point"] = {0.4, 0.2};
  return load_instance(doc.dump());
}

}  // namespace gnep
