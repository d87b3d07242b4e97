// Nonlinear Poisson solver.  The unknown is the correction psi = phi - phiD
// vanishing on Dirichlet faces; the residual rows are the flux balances
//
//   cell K:  sum_s F_{K,s}(phi) - |K| (C_K + g(zP_K - phi_K) - g(zN_K + phi_K))
//   face s:  F_{K,s}(phi) + F_{L,s}(phi)   (interior; one term on Neumann)
//
// which is the gradient of the convex energy
//   J(psi) = 1/2 a(psi,psi) - L(psi)
//          + sum_K |K| (G(zP_K - phiD_K - psi_K) + G(zN_K + phiD_K + psi_K))
// up to the sign flip on the face block (the face rows are the negated
// partial derivatives).  Newton directions therefore descend J, and a
// backtracking line search on J keeps the iteration globally convergent;
// an eight-stage geometric ramp on the data (C, phiD, z) supplies warm
// starts for stiff doping profiles.
#pragma once

#include <hfvdd/setup.hpp>

namespace hfvdd {

struct PoissonProblem {
  const ProblemSetup* setup = nullptr;
  Vector charge;          // per cell, fixed part C_K
  bool semilinear = true; // false drops the g terms (linear problem)
  Vector zN, zP;          // per cell, quasi-Fermi style potentials
  HybridVector phiD;      // Dirichlet lifting, cells and faces
};

// Equilibrium problem: charge = doping, zN = alpha_N, zP = alpha_P,
// phiD = the setup's compatible potential lifting.
PoissonProblem equilibrium_problem(const ProblemSetup& setup);

// Linear association problem for given cell densities: charge = C + P - N,
// no semilinear terms.
PoissonProblem association_problem(const ProblemSetup& setup,
                                   const Vector& Ncell, const Vector& Pcell);

struct PoissonConfig {
  Real tol = 1e-12;       // on the sup norm of the residual
  int max_newton = 60;    // per continuation stage
  int ramp_stages = 8;    // geometric data ramp 2^{1-n}, ..., 1
  Real armijo_c = 1e-4;
  int max_backtrack = 60;
  bool use_ramp = true;   // ignored (off) for linear problems
};

struct PoissonResult {
  HybridVector phi;       // full potential, Dirichlet faces carry data
  int newton_iterations = 0;
  int linear_solves = 0;
  Real residual_norm = 0.0;
  std::vector<Real> energy;  // J after each Newton update, last stage
};

// Residual of the full hybrid potential (Dirichlet entries zero by
// construction when phi carries the boundary data).
HybridVector poisson_residual(const PoissonProblem& problem,
                              const HybridVector& phi);

// Energy of the correction psi (Dirichlet faces of psi must be zero).
Real poisson_energy(const PoissonProblem& problem, const HybridVector& psi);

// Damped Newton with static condensation of the cell block.  psi0, when
// given, seeds the final-stage solve and the ramp is skipped.
PoissonResult solve_poisson(const PoissonProblem& problem,
                            const PoissonConfig& config,
                            const HybridVector* psi0 = nullptr);

struct EquilibriumState {
  HybridVector N, P, phi;
  PoissonResult info;
};

// Thermal equilibrium densities N = g(alpha_N + phi), P = g(alpha_P - phi)
// on cells and faces; Dirichlet faces reproduce the boundary data exactly.
EquilibriumState thermal_equilibrium(const ProblemSetup& setup,
                                     const PoissonConfig& config = {});

// Potential associated with the cell densities (N, P): single linear solve.
PoissonResult association_potential(const ProblemSetup& setup,
                                    const Vector& Ncell, const Vector& Pcell,
                                    const PoissonConfig& config = {});

}  // namespace hfvdd
