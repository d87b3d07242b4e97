#include <hfvdd/poisson.hpp>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace hfvdd {

namespace {

using Triplet = Eigen::Triplet<Real>;
using SparseMatrix = Eigen::SparseMatrix<Real>;

PoissonProblem scaled(const PoissonProblem& problem, Real s) {
  PoissonProblem out = problem;
  out.charge *= s;
  out.phiD.cell *= s;
  out.phiD.face *= s;
  if (out.zN.size() > 0) out.zN *= s;
  if (out.zP.size() > 0) out.zP *= s;
  return out;
}

// Semilinear charge g(zP - phi) - g(zN + phi) and its phi derivative.
Real carrier_charge(const PoissonProblem& problem, int K, Real phiK,
                    Real* dphi = nullptr) {
  if (!problem.semilinear) {
    if (dphi) *dphi = 0.0;
    return 0.0;
  }
  const stats::Model& model = problem.setup->model;
  const Real p = stats::g(model, problem.zP[K] - phiK);
  const Real n = stats::g(model, problem.zN[K] + phiK);
  if (dphi)
    *dphi = -stats::dg(model, problem.zP[K] - phiK) -
            stats::dg(model, problem.zN[K] + phiK);
  return p - n;
}

struct NewtonWorkspace {
  SparseMatrix S;
  Eigen::SparseLU<SparseMatrix> lu;
  bool analyzed = false;
  std::vector<Triplet> trips;
};

// One damped Newton run on a fixed problem; psi accumulates the correction
// (zero on Dirichlet faces).  Returns the final residual sup norm.
Real newton_stage(const PoissonProblem& problem, const PoissonConfig& config,
                  NewtonWorkspace& ws, HybridVector& psi, int& iterations,
                  int& linear_solves, std::vector<Real>* energy_log) {
  const ProblemSetup& setup = *problem.setup;
  const Mesh& mesh = *setup.mesh;
  const DofMap& dofs = setup.dofs;
  const DiffusionOperator& op = setup.op_phi;
  const int nc = mesh.n_cells();
  const int na = dofs.n_active();

  const auto full_phi = [&]() {
    HybridVector phi = problem.phiD;
    phi.cell += psi.cell;
    phi.face += psi.face;
    return phi;
  };

  HybridVector phi = full_phi();
  HybridVector R = poisson_residual(problem, phi);
  const Real R0 = R.sup_norm();
  Real Rnorm = R0;
  if (energy_log) energy_log->push_back(poisson_energy(problem, psi));

  Vector delta_cell(nc), rhs(na), delta_face(na);
  for (int it = 0; it < config.max_newton; ++it) {
    if (Rnorm <= config.tol * (1.0 + R0)) return Rnorm;
    ++iterations;

    // Schur complement of the scalar cell block.
    ws.trips.clear();
    rhs.setZero();
    Vector invD(nc), total_row(nc);
    for (int K = 0; K < nc; ++K) {
      Real dq = 0.0;
      carrier_charge(problem, K, phi.cell[K], &dq);
      const Real D = op.total[static_cast<size_t>(K)] -
                     mesh.cell[K].measure * dq;
      if (!(std::abs(D) > 0.0))
        throw SolverError("poisson: singular cell block at cell " +
                          std::to_string(K));
      invD[K] = 1.0 / D;
    }
    for (int s = 0; s < mesh.n_faces(); ++s) {
      const int a = dofs.face_unknown[static_cast<size_t>(s)];
      if (a >= 0) rhs[a] = -R.face[s];
    }
    for (int K = 0; K < nc; ++K) {
      const Cell& cell = mesh.cell[K];
      const Matrix& A = op.A[static_cast<size_t>(K)];
      const Vector& rows = op.row_sum[static_cast<size_t>(K)];
      const Vector& cols = op.col_sum[static_cast<size_t>(K)];
      for (int j = 0; j < cell.count; ++j) {
        const int sj = mesh.cf_face[cell.first + j];
        const int aj = dofs.face_unknown[static_cast<size_t>(sj)];
        if (aj < 0) continue;
        rhs[aj] += rows[j] * invD[K] * R.cell[K];
        for (int l = 0; l < cell.count; ++l) {
          const int sl = mesh.cf_face[cell.first + l];
          const int al = dofs.face_unknown[static_cast<size_t>(sl)];
          if (al < 0) continue;
          ws.trips.emplace_back(aj, al,
                                -A(j, l) + rows[j] * invD[K] * cols[l]);
        }
      }
    }

    if (na > 0) {
      ws.S.resize(na, na);
      ws.S.setFromTriplets(ws.trips.begin(), ws.trips.end());
      if (!ws.analyzed) {
        ws.lu.analyzePattern(ws.S);
        ws.analyzed = true;
      }
      ws.lu.factorize(ws.S);
      if (ws.lu.info() != Eigen::Success)
        throw SolverError("poisson: face system factorisation failed");
      delta_face = ws.lu.solve(rhs);
    }
    ++linear_solves;

    for (int K = 0; K < nc; ++K) {
      const Cell& cell = mesh.cell[K];
      const Vector& cols = op.col_sum[static_cast<size_t>(K)];
      Real acc = -R.cell[K];
      for (int l = 0; l < cell.count; ++l) {
        const int sl = mesh.cf_face[cell.first + l];
        const int al = dofs.face_unknown[static_cast<size_t>(sl)];
        if (al >= 0) acc += cols[l] * delta_face[al];
      }
      delta_cell[K] = acc * invD[K];
    }

    // Backtracking on the energy; the gradient of J is [R_cell; -R_face].
    // Near the minimiser the true decrease per step falls below the
    // roundoff floor of J and a strict Armijo test rejects every step, so
    // the comparison carries a noise allowance; within it the full Newton
    // step is accepted and the iteration proceeds undamped.
    Real slope = delta_cell.dot(R.cell);
    for (int a = 0; a < na; ++a)
      slope -= delta_face[a] * R.face[dofs.active_face[static_cast<size_t>(a)]];
    const Real J0 = poisson_energy(problem, psi);
    const Real noise =
        16.0 * std::numeric_limits<Real>::epsilon() * (1.0 + std::abs(J0));
    Real t = 1.0;
    HybridVector trial = psi;
    bool accepted = false;
    for (int bt = 0; bt < config.max_backtrack; ++bt) {
      trial = psi;
      trial.cell += t * delta_cell;
      for (int a = 0; a < na; ++a)
        trial.face[dofs.active_face[static_cast<size_t>(a)]] +=
            t * delta_face[a];
      const Real Jt = poisson_energy(problem, trial);
      if (std::isfinite(Jt) &&
          Jt <= J0 + config.armijo_c * t * slope + noise) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted)
      throw SolverError("poisson: line search stalled (slope " +
                        std::to_string(slope) + ")");
    psi = trial;
    phi = full_phi();
    R = poisson_residual(problem, phi);
    Rnorm = R.sup_norm();
    if (energy_log) energy_log->push_back(poisson_energy(problem, psi));
  }
  if (Rnorm <= config.tol * (1.0 + R0)) return Rnorm;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", Rnorm);
  throw SolverError("poisson: Newton did not converge in " +
                    std::to_string(config.max_newton) +
                    " iterations (residual " + std::string(buf) + ")");
}

}  // namespace

PoissonProblem equilibrium_problem(const ProblemSetup& setup) {
  PoissonProblem problem;
  problem.setup = &setup;
  problem.charge = setup.doping;
  problem.semilinear = true;
  problem.zN = Vector::Constant(setup.mesh->n_cells(), setup.alpha_N);
  problem.zP = Vector::Constant(setup.mesh->n_cells(), setup.alpha_P);
  problem.phiD = setup.dirichlet.phi;
  return problem;
}

PoissonProblem association_problem(const ProblemSetup& setup,
                                   const Vector& Ncell, const Vector& Pcell) {
  PoissonProblem problem;
  problem.setup = &setup;
  problem.charge = setup.doping + Pcell - Ncell;
  problem.semilinear = false;
  problem.phiD = setup.dirichlet.phi;
  return problem;
}

HybridVector poisson_residual(const PoissonProblem& problem,
                              const HybridVector& phi) {
  const ProblemSetup& setup = *problem.setup;
  const Mesh& mesh = *setup.mesh;
  const DiffusionOperator& op = setup.op_phi;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  HybridVector R = HybridVector::Constant(nc, nf, 0.0);
  for (int K = 0; K < nc; ++K) {
    const Cell& cell = mesh.cell[K];
    const Vector phif = gather_faces(mesh, K, phi.face);
    const Vector flux = local_flux(op, K, phi.cell[K], phif);
    R.cell[K] = flux.sum() - cell.measure * (problem.charge[K] +
                                             carrier_charge(problem, K,
                                                            phi.cell[K]));
    for (int j = 0; j < cell.count; ++j)
      R.face[mesh.cf_face[cell.first + j]] += flux[j];
  }
  for (int s = 0; s < nf; ++s)
    if (is_dirichlet(mesh.face[s].tag)) R.face[s] = 0.0;
  return R;
}

Real poisson_energy(const PoissonProblem& problem, const HybridVector& psi) {
  const ProblemSetup& setup = *problem.setup;
  const Mesh& mesh = *setup.mesh;
  Real J = 0.5 * bilinear(mesh, setup.op_phi, psi, psi) +
           bilinear(mesh, setup.op_phi, problem.phiD, psi);
  for (int K = 0; K < mesh.n_cells(); ++K) {
    J -= mesh.cell[K].measure * problem.charge[K] * psi.cell[K];
    if (problem.semilinear) {
      const Real phiK = problem.phiD.cell[K] + psi.cell[K];
      J += mesh.cell[K].measure *
           (stats::G(setup.model, problem.zP[K] - phiK) +
            stats::G(setup.model, problem.zN[K] + phiK));
    }
  }
  return J;
}

PoissonResult solve_poisson(const PoissonProblem& problem,
                            const PoissonConfig& config,
                            const HybridVector* psi0) {
  const ProblemSetup& setup = *problem.setup;
  const Mesh& mesh = *setup.mesh;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();

  HybridVector psi = psi0 ? *psi0 : HybridVector::Constant(nc, nf, 0.0);
  if (psi0)
    for (int s = 0; s < nf; ++s)
      if (is_dirichlet(mesh.face[s].tag) && psi.face[s] != 0.0)
        throw InvalidInput("solve_poisson: initial guess must vanish on "
                           "Dirichlet faces");

  PoissonResult result;
  NewtonWorkspace ws;
  const bool ramp =
      config.use_ramp && problem.semilinear && psi0 == nullptr;
  if (ramp) {
    for (int k = 1; k < config.ramp_stages; ++k) {
      const Real s = std::ldexp(1.0, k - config.ramp_stages);
      const PoissonProblem stage = scaled(problem, s);
      newton_stage(stage, config, ws, psi, result.newton_iterations,
                   result.linear_solves, nullptr);
    }
  }
  result.residual_norm =
      newton_stage(problem, config, ws, psi, result.newton_iterations,
                   result.linear_solves, &result.energy);

  result.phi = problem.phiD;
  result.phi.cell += psi.cell;
  result.phi.face += psi.face;
  return result;
}

EquilibriumState thermal_equilibrium(const ProblemSetup& setup,
                                     const PoissonConfig& config) {
  const Mesh& mesh = *setup.mesh;
  EquilibriumState eq;
  eq.info = solve_poisson(equilibrium_problem(setup), config);
  eq.phi = eq.info.phi;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  eq.N = HybridVector::Constant(nc, nf, 0.0);
  eq.P = HybridVector::Constant(nc, nf, 0.0);
  for (int K = 0; K < nc; ++K) {
    eq.N.cell[K] = stats::g(setup.model, setup.alpha_N + eq.phi.cell[K]);
    eq.P.cell[K] = stats::g(setup.model, setup.alpha_P - eq.phi.cell[K]);
  }
  for (int s = 0; s < nf; ++s) {
    if (is_dirichlet(mesh.face[s].tag)) {
      eq.N.face[s] = setup.dirichlet.N.face[s];
      eq.P.face[s] = setup.dirichlet.P.face[s];
    } else {
      eq.N.face[s] = stats::g(setup.model, setup.alpha_N + eq.phi.face[s]);
      eq.P.face[s] = stats::g(setup.model, setup.alpha_P - eq.phi.face[s]);
    }
  }
  return eq;
}

PoissonResult association_potential(const ProblemSetup& setup,
                                    const Vector& Ncell, const Vector& Pcell,
                                    const PoissonConfig& config) {
  return solve_poisson(association_problem(setup, Ncell, Pcell), config);
}

}  // namespace hfvdd
