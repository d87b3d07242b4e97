// Backward Euler stepping of the coupled drift-diffusion system.  Per step
// the unknowns are (N, P, phi) on cells and non-Dirichlet faces; the rows are
//
//   cell K:  |K| (N_K - N^n_K)/dt + sum_s rF_{K,s}(N,phi) + |K| R(N_K, P_K)
//            |K| (P_K - P^n_K)/dt + sum_s rF_{K,s}(P,phi) + |K| R(N_K, P_K)
//            sum_s F^phi_{K,s}(phi) - |K| (C_K + P_K - N_K)
//   face s:  flux conservation (sum of the adjacent cells' fluxes)
//
// with rF the reconstruction-scaled fluxes of h(u) -+ phi.  Newton uses the
// exact Jacobian, full steps, and rejects the attempt as soon as an iterate
// leaves the admissible density bounds; rejected steps halve dt and the next
// accepted step may grow it again by at most the configured factor.
#pragma once

#include <hfvdd/poisson.hpp>

#include <optional>

namespace hfvdd {

struct SchemeState {
  Real t = 0.0;
  HybridVector N, P, phi;
};

struct StepperConfig {
  Real dt = 0.1;         // requested (and maximal) step
  Real t_end = 1.0;
  Real eps = 1e-9;       // projection distance of initial guesses to bounds
  int max_newton = 50;
  Real tol = 1e-10;      // ||R||_inf <= tol (1 + ||R0||_inf)
  Real growth = 1.4;
  Real shrink = 2.0;
  Real min_dt = 1e-12;
  Real exp_cap = 700.0;  // reject iterates with h(N) + h(P) beyond this
};

struct CoupledResidual {
  HybridVector N, P, phi;  // Dirichlet face entries are zero

  Real sup_norm() const {
    return std::max({N.sup_norm(), P.sup_norm(), phi.sup_norm()});
  }
};

CoupledResidual coupled_residual(const ProblemSetup& setup,
                                 const SchemeState& prev,
                                 const SchemeState& next, Real dt);

struct InitInfo {
  int linear_solves = 0;
  std::optional<EquilibriumState> equilibrium;
};

// Cell and face averages of the initial profile (or the thermal equilibrium),
// Dirichlet faces carrying the boundary data, and the associated potential.
SchemeState initial_state(const ProblemSetup& setup,
                          const PoissonConfig& pconfig = {},
                          InitInfo* info = nullptr);

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  int linear_solves = 0;
  Real residual_norm = 0.0;
  std::string reject_reason;  // empty when converged
};

class TransientSolver {
 public:
  TransientSolver(const ProblemSetup& setup, const StepperConfig& config);

  // One step attempt from prev with the given dt; next is left at the last
  // iterate.  Never throws on rejection; the report says why.
  NewtonReport attempt(const SchemeState& prev, Real dt, SchemeState& next);

  // Newton direction at a fixed iterate, either through the condensed face
  // system or the full sparse system (reference path for testing).
  void direction(const SchemeState& prev, const SchemeState& iterate, Real dt,
                 bool condensed, HybridVector& dN, HybridVector& dP,
                 HybridVector& dphi);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

NewtonReport solve_step(const ProblemSetup& setup, const StepperConfig& config,
                        const SchemeState& prev, Real dt, SchemeState& next);

struct StepInfo {
  Real t = 0.0;   // time reached
  Real dt = 0.0;  // step taken (0 for the initial record)
  int newton_iterations = 0;
  long cumulative_linear_solves = 0;
  int rejections = 0;  // total so far
};

struct TransientResult {
  SchemeState state;
  std::vector<StepInfo> steps;  // initial record plus one per accepted step
  long linear_solves = 0;
  int rejected_attempts = 0;
  std::optional<EquilibriumState> equilibrium;  // when the init computed it
};

using StepCallback = std::function<void(const SchemeState&, const StepInfo&)>;

// Runs from t = 0 to t_end with adaptive dt: start at config.dt, halve on
// rejection (SolverError below min_dt), grow accepted steps by at most
// config.growth up to config.dt.  The cost counter includes the initial
// potential solve and every linear solve of rejected attempts.
TransientResult run_transient(const ProblemSetup& setup,
                              const StepperConfig& config,
                              const PoissonConfig& pconfig = {},
                              const StepCallback& on_step = {});

}  // namespace hfvdd
