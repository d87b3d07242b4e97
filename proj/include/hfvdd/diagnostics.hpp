// Entropy and dissipation diagnostics of transient runs, the per-step record
// series with its CSV serialisation, and the log-linear decay rate fit.
#pragma once

#include <hfvdd/transient.hpp>

#include <iosfwd>
#include <utility>

namespace hfvdd {

// E = sum_K |K| [H(N_K) - H(Ne_K) - h(Ne_K)(N_K - Ne_K)] + (P terms)
//   + 1/2 a_phi(phi - phie, phi - phie).
Real relative_entropy(const ProblemSetup& setup, const EquilibriumState& eq,
                      const SchemeState& state);

// D = T_N(N, wN, wN) + T_P(P, wP, wP)
//   + sum_K |K| R(N_K, P_K) (h(N_K) + h(P_K))
// with wN = h(N) - phi - alpha_N and wP = h(P) + phi - alpha_P.
Real dissipation(const ProblemSetup& setup, const SchemeState& state);

// sqrt(|N - Ne|_{L2}^2 + |P - Pe|_{L2}^2 + |phi - phie|_{L2}^2), cell fields.
Real equilibrium_distance(const ProblemSetup& setup,
                          const EquilibriumState& eq,
                          const SchemeState& state);

struct StepRecord {
  Real t = 0.0;
  Real dt = 0.0;
  int newton_iterations = 0;
  Real entropy = 0.0;
  Real dissipation = 0.0;  // not serialised; kept for the decay inequality
  Real eq_distance = 0.0;
  Real min_N = 0.0, min_P = 0.0;
  Real max_gap_N = 0.0, max_gap_P = 0.0;  // bound gap, or plain max when
                                          // the statistics are unbounded
  long cumulative_cost = 0;
};

StepRecord make_record(const ProblemSetup& setup, const EquilibriumState& eq,
                       const SchemeState& state, const StepInfo& info);

struct TimeSeries {
  std::vector<StepRecord> rows;
  bool bounded = false;
  Real upper_bound = 0.0;
};

inline constexpr const char* kSeriesHeader =
    "Temps, time_step, Nb_iter, Entro, Diff_eq_L2, min_N, min_P, "
    "Diff_max_N, Diff_max_P, cumulative_cost";

void write_series_csv(const TimeSeries& series, std::ostream& out);
void write_series_csv(const TimeSeries& series, const std::string& path);

// Sidecar with the column semantics and run parameters, one key = value
// per line; extra lines are appended verbatim.
void write_series_meta(const TimeSeries& series, const ProblemSetup& setup,
                       const std::string& path,
                       const std::vector<std::string>& extra = {});

struct DecayFit {
  Real rate = 0.0;       // nu in E ~ exp(-nu t)
  Real r_squared = 0.0;
  int n_points = 0;
};

// Least squares on log E over t in [t_min, t_max], keeping only entries
// above the saturation floor; requires at least five usable points.
DecayFit fit_decay_rate(const std::vector<std::pair<Real, Real>>& points,
                        Real t_min, Real t_max, Real floor);
DecayFit fit_decay_rate(const TimeSeries& series, Real t_min, Real t_max,
                        Real floor);

// nu0 / sqrt(1 + b^2), the expected magnetic slowdown of the decay rate.
Real reference_rate(Real nu0, Real b);

}  // namespace hfvdd
