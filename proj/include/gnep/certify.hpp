#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gnep/instance.hpp"
#include "gnep/kkt.hpp"
#include "gnep/numerics.hpp"

namespace gnep {

struct LicqReport {
  bool holds = false;
  int rank = 0;
  int required_rank = 0;
  double min_singular = 0.0;
};

struct MfcqReport {
  bool holds = false;
  double lp_optimum = 0.0;
  std::vector<double> witness;
};

struct Nd2Report {
  bool holds = false;
  bool vacuous = false;      // no active constraints
  double min_multiplier = 0.0;
};

struct Nd3Report {
  bool holds = false;
  bool vacuous = false;      // tangent space is trivial
  int tangent_dimension = 0;
  double min_singular = 0.0;        // of V^T J_L V, orthonormal V
  double reduced_determinant = 1.0; // of W^T J_L W, elimination basis W
};

/// Per-player view of the same point: the player's own problem may lose
/// LICQ, MFCQ or strict complementarity even when the joint conditions hold.
/// Informational only; never affects the overall flag.
struct PlayerDiagnostics {
  int player = 0;
  bool licq = false;
  int rank = 0;
  int required_rank = 0;
  bool mfcq = false;
  double mfcq_lp_optimum = 0.0;
  PlayerKktStatus kkt_status = PlayerKktStatus::StationarityInfeasible;
  double min_shared_multiplier = 0.0;  // over the player's own multipliers
  bool strict_complementarity = false;
};

struct C3Report {
  bool refuted = false;
  double min_eigenvalue = 0.0;
  std::optional<StrategyProfile> failing_point;
  int samples = 0;
};

struct CertificateReport {
  LicqReport gnep_licq;  // doubles as ND1
  MfcqReport gnep_mfcq;
  Nd2Report nd2;
  Nd3Report nd3;
  std::vector<PlayerDiagnostics> players;
  std::optional<C3Report> c3_sample;
  bool nondegenerate = false;  // ND1 and ND2 and ND3
};

LicqReport check_gnep_licq(const GnepInstance& inst, std::span<const double> x,
                           double activity_tol = kDefaultActivityTol);

MfcqReport check_gnep_mfcq(const GnepInstance& inst, std::span<const double> x,
                           double activity_tol = kDefaultActivityTol);

/// MFCQ of a single player's own problem (directions restricted to the
/// player's block).
MfcqReport check_player_mfcq(const GnepInstance& inst, std::span<const double> x, int player,
                             double activity_tol = kDefaultActivityTol);

/// Strict positivity of every constraint at the candidate interior point.
/// Requires the c2 flag, since the condition certifies anything only for
/// concave constraints.
bool check_slater_point(const GnepInstance& inst, std::span<const double> x,
                        double tol = kDefaultActivityTol);

struct TangentBasis {
  DenseMatrix v;  // n x dim, orthonormal columns
  int dimension = 0;
};

/// Orthonormal basis of the tangent space of the active-constraint variety.
/// Requires GNEP-LICQ at the point; otherwise the dimension formula is
/// meaningless and LicqFailedError is thrown.
TangentBasis tangent_basis(const GnepInstance& inst, std::span<const double> x,
                           const ActiveSetProfile& active, double tol = 1e-8);

struct NondegeneracyTolerances {
  double nd2_tol = 1e-7;  // strict complementarity threshold
  double nd3_tol = 1e-8;  // relative singularity threshold
  double rank_tol = -1.0; // forwarded to rank computations (-1 = default)
};

/// Runs ND1 (GNEP-LICQ), ND2 (strict complementarity of the point's
/// multipliers) and ND3 (nonsingularity of the tangent-restricted Jacobian of
/// the Lagrangian pseudogradient), plus the informational per-player
/// diagnostics and GNEP-MFCQ.
CertificateReport check_nondegenerate(const GnepInstance& inst, const NormalizedKktPoint& point,
                                      const NondegeneracyTolerances& tols = {});

/// Samples the Jacobian of the weighted objective pseudogradient and reports
/// the smallest eigenvalue of its symmetric part. A negative value refutes
/// positive definiteness over the feasible set; a nonnegative one only means
/// "not refuted on these samples".
C3Report check_c3_sampled(const GnepInstance& inst, const RatioParameters& r,
                          const std::vector<StrategyProfile>& sample_points);

/// Feasible grid points of the box, the default C3 sample set.
std::vector<StrategyProfile> feasible_grid_samples(const GnepInstance& inst,
                                                   std::span<const double> lo,
                                                   std::span<const double> hi, int grid,
                                                   double tol = kDefaultActivityTol);

}  // namespace gnep
