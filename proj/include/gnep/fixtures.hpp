#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnep/instance.hpp"

namespace gnep {

/// One expected equilibrium at a given weight vector. Shared and individual
/// multipliers are keyed by 1-based constraint index; absent keys are not
/// checked.
struct ExpectedEquilibrium {
  StrategyProfile x;
  std::map<int, double> shared_multipliers;
  std::map<int, std::map<int, double>> individual_multipliers;  // player -> j -> value
  std::optional<bool> nondegenerate;
  double tol = 1e-8;
};

struct ExpectedSolve {
  std::vector<double> r;
  std::vector<ExpectedEquilibrium> equilibria;
  bool exact_count = true;      // the solver must find exactly these points
  bool family_expected = false; // a degenerate family must be flagged
  std::string provenance;
};

struct ExpectedPlayerStatus {
  StrategyProfile x;
  int player = 0;  // 0-based
  std::string status;  // "kkt" | "fritz_john_only" | "stationarity_infeasible"
  std::map<int, double> shared_multipliers;  // player's own, 1-based
  std::string provenance;
};

struct ExpectedConsistency {
  StrategyProfile x;
  bool consistent = false;
  int witness_shared_index = -1;                 // 1-based, inconsistent case
  std::vector<double> witness_multipliers;       // per player
  std::string provenance;
};

struct ExpectedC3 {
  std::vector<double> r;
  bool refuted = false;
  double min_eigenvalue = 0.0;
  double tol = 1e-8;
  std::string provenance;
};

struct ExpectedNd3Value {
  std::vector<double> r;
  StrategyProfile x;
  double value = 0.0;
  double tol = 1e-8;
  std::string provenance;
};

struct ExpectedManifest {
  std::string instance;
  std::vector<ExpectedSolve> solves;
  std::vector<ExpectedPlayerStatus> player_statuses;
  std::vector<ExpectedConsistency> consistency;
  std::vector<ExpectedC3> c3;
  std::vector<ExpectedNd3Value> nd3_values;
};

struct Fixture {
  GnepInstance instance;
  ExpectedManifest manifest;
};

extern const char* const kFixtureNames[8];

/// Directory with the canonical instance corpus. Honors GNEP_FIXTURES_DIR,
/// falling back to the path compiled in at build time.
std::filesystem::path default_fixture_dir();

Fixture load_fixture(const std::string& name);
Fixture load_fixture(const std::string& name, const std::filesystem::path& dir);

/// The quadratic perturbation family of the degenerate instance; eps = 0.1 is
/// the checked-in fixture, other eps values are generated on demand.
GnepInstance make_ex4_perturbed(double eps);

}  // namespace gnep
