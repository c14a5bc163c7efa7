#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

std::string temp_path(const char* leaf) {
  return (std::filesystem::temp_directory_path() / leaf).string();
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string out_path = temp_path("gnep_cli_test_out.txt");
  const std::string cmd =
      env_prefix + std::string(GNEP_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string fixture(const char* name) {
  return std::string(GNEP_FIXTURE_DIR) + "/" + name + ".json";
}

}  // namespace

TEST_CASE("solve exit codes and JSON report") {
  const RunResult ok = run_cli("solve " + fixture("ex5_compar") + " --r 1,1 --json");
  CHECK(ok.exit_code == 0);
  const json rep = json::parse(ok.out);
  CHECK(rep["command"] == "solve");
  CHECK(rep["instance"] == "ex5_compar");
  CHECK(rep["results"]["points"].size() == 3);
  CHECK(rep["exit_code"] == 0);
  CHECK(rep["wall_time_seconds"].is_number());

  const RunResult perturbed = run_cli("solve " + fixture("ex4_perturbed") + " --r 1,1 --json");
  CHECK(perturbed.exit_code == 0);
  const json prep = json::parse(perturbed.out);
  REQUIRE(prep["results"]["points"].size() == 1);
  const auto& x = prep["results"]["points"][0]["x"];
  CHECK(std::fabs(x[0].get<double>() - 2.0 / 3.0) <= 1e-8);

  CHECK(run_cli("solve does_not_exist.json --r 1,1").exit_code == 2);
  CHECK(run_cli("solve " + fixture("ex5_compar") + " --r 1,oops").exit_code == 2);
}

TEST_CASE("solve reports no-solution distinctly") {
  // A player with unattainable stationarity inside the box and no constraints.
  const std::string path = temp_path("gnep_no_solution.json");
  {
    std::ofstream f(path);
    f << R"({"name": "nosol",
             "players": [{"dim": 1, "objective": "x1", "individual": []}],
             "shared": []})";
  }
  CHECK(run_cli("solve " + path + " --r 1").exit_code == 3);
}

TEST_CASE("per-coordinate box overrides and threaded runs stay deterministic") {
  const std::string base = "solve " + fixture("ex5_compar") +
                           " --r 1,1 --box -2:2 --box-dim 1:-1:1.5 --json";
  const RunResult a = run_cli(base);
  REQUIRE(a.exit_code == 0);
  CHECK(json::parse(a.out)["results"]["points"].size() == 3);

  const RunResult b = run_cli(base, "GNEP_THREADS=2 ");
  const RunResult c = run_cli(base, "GNEP_THREADS=0 ");
  REQUIRE(b.exit_code == 0);
  REQUIRE(c.exit_code == 0);
  // Identical reports up to the wall-time field.
  json ja = json::parse(a.out), jb = json::parse(b.out), jc = json::parse(c.out);
  ja.erase("wall_time_seconds");
  jb.erase("wall_time_seconds");
  jc.erase("wall_time_seconds");
  CHECK(ja == jb);
  CHECK(ja == jc);
}

TEST_CASE("certify exit codes across the three outcomes") {
  CHECK(run_cli("certify " + fixture("ex3_individual_degen") + " --point 0.5,0.5 --r 1,2")
            .exit_code == 0);
  CHECK(run_cli("certify " + fixture("ex4_family") + " --point 0.7,0.3 --r 1,1").exit_code ==
        4);

  const RunResult not_normalized =
      run_cli("certify " + fixture("ex2_strictcomp") + " --point 0,0 --r 1,1 --json");
  CHECK(not_normalized.exit_code == 5);
  const json rep = json::parse(not_normalized.out);
  CHECK(rep["results"]["classification"] == "not_normalized_kkt");
  const auto& cons = rep["results"]["normalized_consistency"];
  CHECK(cons["verdict"] == "inconsistent");
  CHECK(cons["witness_shared_index"] == 1);
  CHECK(std::fabs(cons["witness_multipliers"][0].get<double>()) <= 1e-9);
  CHECK(std::fabs(cons["witness_multipliers"][1].get<double>() - 0.5) <= 1e-9);
}

TEST_CASE("certify flags the sign-violating weight choice as degenerate") {
  const RunResult r =
      run_cli("certify " + fixture("ex3_individual_degen") + " --point 0.5,0.5 --r 2,1 --json");
  CHECK(r.exit_code == 4);
  const json rep = json::parse(r.out);
  CHECK(rep["results"]["certificate"]["nd2"]["holds"] == false);
  CHECK(std::fabs(rep["results"]["certificate"]["nd2"]["min_multiplier"].get<double>() + 0.5) <=
        1e-8);
}

TEST_CASE("sweep writes a TSV and flags the degenerate ratio") {
  const std::string tsv_path = temp_path("gnep_sweep_test.tsv");
  const RunResult r = run_cli("sweep " + fixture("ex5_compar") +
                              " --ratios 0.25:2.25:0.25 --out " + tsv_path + " --json");
  CHECK(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["results"]["rows"].size() == 9);
  std::ifstream tsv(tsv_path);
  CHECK(tsv.good());

  CHECK(run_cli("sweep " + fixture("ex5_compar") + " --ratios 2:1:0.5").exit_code == 2);

  const RunResult fam =
      run_cli("sweep " + fixture("ex4_family") + " --ratios 0.9:1.1:0.1 --json");
  CHECK(fam.exit_code == 0);
  const json famrep = json::parse(fam.out);
  bool warned = false;
  for (const auto& row : famrep["results"]["rows"])
    if (row["ratio"].get<double>() == 1.0) warned = row["family_warning"].get<bool>();
  CHECK(warned);
}

TEST_CASE("derivative check accepts the corpus and rejects a corrupted gradient") {
  for (const char* name :
       {"ex1_fj", "ex2_strictcomp", "ex3_individual_degen", "ex4_perturbed", "ex5_compar"}) {
    CHECK(run_cli("check-derivs " + fixture(name) + " --samples 100").exit_code == 0);
  }

  const std::string path = temp_path("gnep_corrupt_grad.json");
  {
    std::ofstream f(path);
    // The declared gradient is wrong on purpose: d/dx1 should be -1 + x2.
    f << R"({"name": "corrupt",
             "players": [
               {"dim": 1, "objective": "-x1 + x1*x2", "individual": []},
               {"dim": 1, "objective": "-x2", "individual": []}],
             "shared": ["1 - x1 - x2"],
             "declared_gradients": [["-1 + 2*x2", "x1"], ["0", "-1"]]})";
  }
  const RunResult bad = run_cli("check-derivs " + path + " --samples 50 --json");
  CHECK(bad.exit_code == 6);
  const json rep = json::parse(bad.out);
  // 2 objectives + 1 shared + 2 declared-gradient rows.
  CHECK(rep["results"]["expressions"].size() == 5);
  bool found_table_entry = false;
  for (const auto& row : rep["results"]["expressions"])
    if (row["expression"] == "declared_gradient_p1") {
      found_table_entry = true;
      CHECK(row["ok"] == false);
    }
  CHECK(found_table_entry);
}

TEST_CASE("oracle exit codes") {
  CHECK(run_cli("oracle " + fixture("ex4_perturbed") +
                " --point 0.6666666666666666,0.3333333333333333 --r 1,1")
            .exit_code == 0);
  CHECK(run_cli("oracle " + fixture("ex4_perturbed") + " --point 0,0 --r 1,1").exit_code == 7);
  CHECK(run_cli("oracle " + fixture("ex4_family") + " --point 0.5,0.5 --r 1,1").exit_code == 2);
}

TEST_CASE("json reports re-parse and carry 17-significant-digit floats") {
  const RunResult r =
      run_cli("certify " + fixture("ex4_perturbed") + " --point 0.6666666666666666,0.3333333333333333 --r 1,1 --json");
  CHECK(r.exit_code == 0);
  const json rep = json::parse(r.out);  // must re-parse cleanly
  // A value with a long mantissa survives the round trip bit-exactly.
  const double lam = rep["results"]["point"]["shared_multipliers"][0].get<double>();
  CHECK(std::fabs(lam - 14.0 / 15.0) <= 1e-12);
  CHECK(r.out.find("0.93333333333333") != std::string::npos);
}

TEST_CASE("every command emits the same report envelope") {
  const std::string eq = " --point 0.6666666666666666,0.3333333333333333 --r 1,1 --json";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"solve", "solve " + fixture("ex5_compar") + " --r 1,1 --json"},
      {"certify", "certify " + fixture("ex4_perturbed") + eq},
      {"sweep", "sweep " + fixture("ex5_compar") + " --ratios 1:1:1 --json"},
      {"check-derivs", "check-derivs " + fixture("ex5_compar") + " --samples 5 --json"},
      {"oracle", "oracle " + fixture("ex4_perturbed") + eq},
  };
  for (const auto& [command, args] : runs) {
    const RunResult r = run_cli(args);
    const json rep = json::parse(r.out);
    CHECK(rep["command"] == command);
    CHECK(rep["instance"].is_string());
    CHECK(rep["results"].is_object());
    CHECK(rep["warnings"].is_array());
    CHECK(rep["wall_time_seconds"].is_number());
    CHECK(rep["exit_code"].get<int>() == r.exit_code);
  }
}

TEST_CASE("usage errors return exit 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate x.json").exit_code == 2);
  CHECK(run_cli("solve").exit_code == 2);
  CHECK(run_cli("certify " + fixture("ex5_compar") + " --point 0.1 --r 1,1").exit_code == 2);
}
