#pragma once

#include <string>
#include <vector>

#include "gnep/certify.hpp"
#include "gnep/solver.hpp"

namespace gnep {

struct SweepEntry {
  NormalizedKktPoint point;
  CertificateReport certificate;
  bool family_member = false;
};

struct SweepRow {
  double ratio = 0.0;  // r[0]/r[1] in two-player mode
  RatioParameters r;
  std::vector<SweepEntry> entries;
  bool family_warning = false;
  std::vector<std::string> warnings;
};

/// Runs the enumeration and the nondegeneracy certificates at each ratio
/// (two players; the weights are (ratio, 1)). Rows come back sorted by ratio.
std::vector<SweepRow> sweep_ratio(const GnepInstance& inst, std::vector<double> ratios,
                                  const SolveConfig& cfg);

/// General form for more than two players: explicit weight vectors. Rows keep
/// the input order; `ratio` holds r[0]/r[last] for reporting.
std::vector<SweepRow> sweep_weights(const GnepInstance& inst,
                                    const std::vector<std::vector<double>>& weights,
                                    const SolveConfig& cfg);

struct FamilyFitResult {
  bool ok = false;
  std::string error;
  // t(rho) = (a rho + b) / (c rho + d)
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double residual = 0.0;
  double eval(double rho) const { return (a * rho + b) / (c * rho + d); }
};

/// Fits the location of the one-active-shared-constraint ("interior family")
/// equilibrium as a Moebius function of the ratio, using the last coordinate
/// of the point as the family parameter. Needs at least three rows that each
/// carry exactly one such equilibrium.
FamilyFitResult interior_family_fit(const std::vector<SweepRow>& rows);

/// Plot-ready TSV: ratio, coordinates, one multiplier column per shared
/// constraint (zero when inactive), and the certificate flags.
std::string sweep_tsv(const GnepInstance& inst, const std::vector<SweepRow>& rows);

}  // namespace gnep
