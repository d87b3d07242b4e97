#include <hfvdd/diagnostics.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hfvdd {

Real relative_entropy(const ProblemSetup& setup, const EquilibriumState& eq,
                      const SchemeState& state) {
  const Mesh& mesh = *setup.mesh;
  const stats::Model& model = setup.model;
  Real E = 0.0;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Real m = mesh.cell[K].measure;
    E += m * (stats::H(model, state.N.cell[K]) -
              stats::H(model, eq.N.cell[K]) -
              stats::h(model, eq.N.cell[K]) *
                  (state.N.cell[K] - eq.N.cell[K]));
    E += m * (stats::H(model, state.P.cell[K]) -
              stats::H(model, eq.P.cell[K]) -
              stats::h(model, eq.P.cell[K]) *
                  (state.P.cell[K] - eq.P.cell[K]));
  }
  HybridVector d = state.phi;
  d -= eq.phi;
  E += 0.5 * bilinear(mesh, setup.op_phi, d, d);
  return E;
}

Real dissipation(const ProblemSetup& setup, const SchemeState& state) {
  const Mesh& mesh = *setup.mesh;
  const stats::Model& model = setup.model;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  HybridVector wN = HybridVector::Constant(nc, nf, 0.0);
  HybridVector wP = HybridVector::Constant(nc, nf, 0.0);
  for (int K = 0; K < nc; ++K) {
    wN.cell[K] =
        stats::h(model, state.N.cell[K]) - state.phi.cell[K] - setup.alpha_N;
    wP.cell[K] =
        stats::h(model, state.P.cell[K]) + state.phi.cell[K] - setup.alpha_P;
  }
  for (int s = 0; s < nf; ++s) {
    wN.face[s] =
        stats::h(model, state.N.face[s]) - state.phi.face[s] - setup.alpha_N;
    wP.face[s] =
        stats::h(model, state.P.face[s]) + state.phi.face[s] - setup.alpha_P;
  }
  Real D = trilinear(mesh, setup.op_N, model, setup.mean, state.N, wN, wN) +
           trilinear(mesh, setup.op_P, model, setup.mean, state.P, wP, wP);
  if (setup.rec.active())
    for (int K = 0; K < nc; ++K)
      D += mesh.cell[K].measure *
           recombination_rate(setup.rec, model, state.N.cell[K],
                              state.P.cell[K]) *
           (stats::h(model, state.N.cell[K]) +
            stats::h(model, state.P.cell[K]));
  return D;
}

Real equilibrium_distance(const ProblemSetup& setup,
                          const EquilibriumState& eq,
                          const SchemeState& state) {
  const Mesh& mesh = *setup.mesh;
  Real acc = 0.0;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Real m = mesh.cell[K].measure;
    const Real dN = state.N.cell[K] - eq.N.cell[K];
    const Real dP = state.P.cell[K] - eq.P.cell[K];
    const Real dphi = state.phi.cell[K] - eq.phi.cell[K];
    acc += m * (dN * dN + dP * dP + dphi * dphi);
  }
  return std::sqrt(acc);
}

StepRecord make_record(const ProblemSetup& setup, const EquilibriumState& eq,
                       const SchemeState& state, const StepInfo& info) {
  StepRecord rec;
  rec.t = info.t;
  rec.dt = info.dt;
  rec.newton_iterations = info.newton_iterations;
  rec.entropy = relative_entropy(setup, eq, state);
  rec.dissipation = dissipation(setup, state);
  rec.eq_distance = equilibrium_distance(setup, eq, state);
  rec.min_N = state.N.min();
  rec.min_P = state.P.min();
  if (setup.model.bounded()) {
    rec.max_gap_N = setup.model.upper_bound() - state.N.max();
    rec.max_gap_P = setup.model.upper_bound() - state.P.max();
  } else {
    rec.max_gap_N = state.N.max();
    rec.max_gap_P = state.P.max();
  }
  rec.cumulative_cost = info.cumulative_linear_solves;
  return rec;
}

void write_series_csv(const TimeSeries& series, std::ostream& out) {
  out << kSeriesHeader << "\n";
  char buf[512];
  for (const StepRecord& r : series.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g, %.17g, %d, %.17g, %.17g, %.17g, %.17g, %.17g, "
                  "%.17g, %ld",
                  r.t, r.dt, r.newton_iterations, r.entropy, r.eq_distance,
                  r.min_N, r.min_P, r.max_gap_N, r.max_gap_P,
                  r.cumulative_cost);
    out << buf << "\n";
  }
}

void write_series_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_series_csv(series, out);
  if (!out) throw IoError("write failed on '" + path + "'");
}

void write_series_meta(const TimeSeries& series, const ProblemSetup& setup,
                       const std::string& path,
                       const std::vector<std::string>& extra) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "statistics = " << setup.model.name() << "\n";
  out << "mean = " << stats::mean_name(setup.mean) << "\n";
  out << "recombination = " << recombination_name(setup.rec) << "\n";
  out << "alpha_N = " << setup.alpha_N << "\n";
  out << "alpha_P = " << setup.alpha_P << "\n";
  out << "cells = " << setup.mesh->n_cells() << "\n";
  out << "faces = " << setup.mesh->n_faces() << "\n";
  out << "bounded = " << (series.bounded ? 1 : 0) << "\n";
  if (series.bounded) out << "upper_bound = " << series.upper_bound << "\n";
  out << "diff_max_semantics = " << (series.bounded ? "bound_gap" : "max")
      << "\n";
  out << "rows = " << series.rows.size() << "\n";
  for (const std::string& line : extra) out << line << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

DecayFit fit_decay_rate(const std::vector<std::pair<Real, Real>>& points,
                        Real t_min, Real t_max, Real floor) {
  std::vector<std::pair<Real, Real>> kept;
  for (const auto& [t, E] : points)
    if (t >= t_min && t <= t_max && E > floor) kept.emplace_back(t, std::log(E));
  DecayFit fit;
  fit.n_points = static_cast<int>(kept.size());
  if (fit.n_points < 5)
    throw InvalidInput("fit_decay_rate: needs at least 5 points above the "
                       "saturation floor, got " +
                       std::to_string(fit.n_points));
  Real st = 0, sy = 0;
  for (const auto& [t, y] : kept) {
    st += t;
    sy += y;
  }
  const Real n = static_cast<Real>(fit.n_points);
  const Real tbar = st / n, ybar = sy / n;
  Real stt = 0, sty = 0, syy = 0;
  for (const auto& [t, y] : kept) {
    stt += (t - tbar) * (t - tbar);
    sty += (t - tbar) * (y - ybar);
    syy += (y - ybar) * (y - ybar);
  }
  if (!(stt > 0.0))
    throw InvalidInput("fit_decay_rate: degenerate time window");
  const Real slope = sty / stt;
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  return fit;
}

DecayFit fit_decay_rate(const TimeSeries& series, Real t_min, Real t_max,
                        Real floor) {
  std::vector<std::pair<Real, Real>> pts;
  pts.reserve(series.rows.size());
  for (const StepRecord& r : series.rows) pts.emplace_back(r.t, r.entropy);
  return fit_decay_rate(pts, t_min, t_max, floor);
}

Real reference_rate(Real nu0, Real b) { return nu0 / std::sqrt(1.0 + b * b); }

}  // namespace hfvdd
