#include "gnep/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gnep {

namespace {

SweepRow make_row(const GnepInstance& inst, const RatioParameters& r, double ratio,
                  const SolveConfig& cfg) {
  SweepRow row;
  row.ratio = ratio;
  row.r = r;
  const SolveReport report = enumerate_normalized_kkt(inst, r, cfg);
  row.family_warning = report.degenerate_family_found();
  row.warnings = report.warnings;
  for (const auto& pt : report.points) {
    SweepEntry e;
    e.point = pt;
    e.certificate = check_nondegenerate(inst, pt);
    row.entries.push_back(std::move(e));
  }
  for (const auto& pt : report.degenerate_points) {
    SweepEntry e;
    e.point = pt;
    e.certificate = check_nondegenerate(inst, pt);
    e.family_member = true;
    row.entries.push_back(std::move(e));
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_ratio(const GnepInstance& inst, std::vector<double> ratios,
                                  const SolveConfig& cfg) {
  if (inst.player_count() != 2)
    throw Error("scalar-ratio sweep requires a two-player instance; pass explicit weights");
  if (ratios.empty()) throw Error("empty ratio list");
  std::sort(ratios.begin(), ratios.end());
  std::vector<SweepRow> rows;
  for (double rho : ratios)
    rows.push_back(make_row(inst, RatioParameters::from_two_player_ratio(rho), rho, cfg));
  return rows;
}

std::vector<SweepRow> sweep_weights(const GnepInstance& inst,
                                    const std::vector<std::vector<double>>& weights,
                                    const SolveConfig& cfg) {
  if (weights.empty()) throw Error("empty weight list");
  std::vector<SweepRow> rows;
  for (const auto& w : weights) {
    const RatioParameters r{std::vector<double>(w)};
    rows.push_back(make_row(inst, r, w.front() / w.back(), cfg));
  }
  return rows;
}

FamilyFitResult interior_family_fit(const std::vector<SweepRow>& rows) {
  FamilyFitResult out;
  std::vector<std::pair<double, double>> samples;  // (rho, t)
  for (const auto& row : rows) {
    const SweepEntry* interior = nullptr;
    int count = 0;
    for (const auto& e : row.entries) {
      int nind = 0;
      for (const auto& s : e.point.active.individual) nind += static_cast<int>(s.size());
      if (nind == 0 && e.point.active.shared.size() == 1) {
        ++count;
        interior = &e;
      }
    }
    if (count == 1) samples.emplace_back(row.ratio, interior->point.x.back());
  }
  if (samples.size() < 3) {
    out.error = "no interior family: need at least three rows with a unique "
                "single-shared-constraint equilibrium";
    return out;
  }

  // Homogeneous least squares for t*(c rho + d) = a rho + b.
  DenseMatrix m(static_cast<int>(samples.size()), 4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double rho = samples[i].first, t = samples[i].second;
    m(static_cast<int>(i), 0) = rho;
    m(static_cast<int>(i), 1) = 1.0;
    m(static_cast<int>(i), 2) = -t * rho;
    m(static_cast<int>(i), 3) = -t;
  }
  const Svd s = svd(m);
  out.a = s.v(0, 3);
  out.b = s.v(1, 3);
  out.c = s.v(2, 3);
  out.d = s.v(3, 3);
  out.residual = s.sigma.back();
  // Orient so the denominator is positive at the first sample.
  if (out.c * samples.front().first + out.d < 0.0) {
    out.a = -out.a;
    out.b = -out.b;
    out.c = -out.c;
    out.d = -out.d;
  }
  if (std::fabs(out.c * samples.front().first + out.d) < 1e-14) {
    out.error = "degenerate fit: denominator vanishes at the samples";
    return out;
  }
  out.ok = true;
  return out;
}

std::string sweep_tsv(const GnepInstance& inst, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "ratio";
  for (int i = 0; i < inst.total_dim(); ++i) os << "\t" << inst.vars.name(i);
  for (int j = 0; j < inst.shared_count(); ++j) os << "\tshared_mult_" << j + 1;
  os << "\tnondegenerate\tnd2\tnd3\tfamily_member\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& row : rows) {
    for (const auto& e : row.entries) {
      num(row.ratio);
      for (double c : e.point.x) {
        os << "\t";
        num(c);
      }
      for (int j = 0; j < inst.shared_count(); ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < e.point.active.shared.size(); ++k)
          if (e.point.active.shared[k] == j) v = e.point.multipliers.shared[k];
        os << "\t";
        num(v);
      }
      os << "\t" << (e.certificate.nondegenerate ? 1 : 0) << "\t"
         << (e.certificate.nd2.holds ? 1 : 0) << "\t" << (e.certificate.nd3.holds ? 1 : 0)
         << "\t" << (e.family_member ? 1 : 0) << "\n";
    }
  }
  return os.str();
}

}  // namespace gnep
