#include <hfvdd/transient.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>

namespace hfvdd {

namespace {

using Triplet = Eigen::Triplet<Real>;
using SparseMatrix = Eigen::SparseMatrix<Real>;

}  // namespace

CoupledResidual coupled_residual(const ProblemSetup& setup,
                                 const SchemeState& prev,
                                 const SchemeState& next, Real dt) {
  if (!(dt > 0.0)) throw InvalidInput("coupled_residual: dt must be positive");
  const Mesh& mesh = *setup.mesh;
  const stats::Model& model = setup.model;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  CoupledResidual R;
  R.N = HybridVector::Constant(nc, nf, 0.0);
  R.P = HybridVector::Constant(nc, nf, 0.0);
  R.phi = HybridVector::Constant(nc, nf, 0.0);
  Vector thetaNf, thetaPf;
  for (int K = 0; K < nc; ++K) {
    const Cell& cell = mesh.cell[K];
    const Real m = cell.measure;
    const Vector Nf = gather_faces(mesh, K, next.N.face);
    const Vector Pf = gather_faces(mesh, K, next.P.face);
    const Vector phif = gather_faces(mesh, K, next.phi.face);
    const Real NK = next.N.cell[K];
    const Real PK = next.P.cell[K];
    const Real phiK = next.phi.cell[K];
    thetaNf.resize(Nf.size());
    thetaPf.resize(Pf.size());
    for (int j = 0; j < Nf.size(); ++j) {
      thetaNf[j] = stats::h(model, Nf[j]) - phif[j];
      thetaPf[j] = stats::h(model, Pf[j]) + phif[j];
    }
    const Vector SN =
        local_flux(setup.op_N, K, stats::h(model, NK) - phiK, thetaNf);
    const Vector SP =
        local_flux(setup.op_P, K, stats::h(model, PK) + phiK, thetaPf);
    const Vector Fphi = local_flux(setup.op_phi, K, phiK, phif);
    const Real rN = reconstruction(mesh, model, setup.mean, K, NK, Nf);
    const Real rP = reconstruction(mesh, model, setup.mean, K, PK, Pf);
    const Real Rval = recombination_rate(setup.rec, model, NK, PK);
    R.N.cell[K] = m * (NK - prev.N.cell[K]) / dt + rN * SN.sum() + m * Rval;
    R.P.cell[K] = m * (PK - prev.P.cell[K]) / dt + rP * SP.sum() + m * Rval;
    R.phi.cell[K] = Fphi.sum() - m * (setup.doping[K] + PK - NK);
    for (int j = 0; j < cell.count; ++j) {
      const int s = mesh.cf_face[cell.first + j];
      R.N.face[s] += rN * SN[j];
      R.P.face[s] += rP * SP[j];
      R.phi.face[s] += Fphi[j];
    }
  }
  for (int s = 0; s < nf; ++s)
    if (is_dirichlet(mesh.face[s].tag)) {
      R.N.face[s] = 0.0;
      R.P.face[s] = 0.0;
      R.phi.face[s] = 0.0;
    }
  return R;
}

SchemeState initial_state(const ProblemSetup& setup,
                          const PoissonConfig& pconfig, InitInfo* info) {
  const Mesh& mesh = *setup.mesh;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  SchemeState state;
  state.t = 0.0;
  if (setup.initial.from_equilibrium) {
    EquilibriumState eq = thermal_equilibrium(setup, pconfig);
    state.N = eq.N;
    state.P = eq.P;
    state.phi = eq.phi;
    if (info) {
      info->linear_solves = eq.info.linear_solves;
      info->equilibrium = std::move(eq);
    }
    return state;
  }
  if (!setup.initial.N0 || !setup.initial.P0)
    throw InvalidInput("initial_state: missing initial profile");
  state.N = HybridVector::Constant(nc, nf, 0.0);
  state.P = HybridVector::Constant(nc, nf, 0.0);
  const Real ub = setup.model.upper_bound();
  const auto check = [&](Real v, const char* which) {
    if (!(v > 0.0) || !(v < ub))
      throw InvalidInput(std::string("initial_state: ") + which +
                         " profile leaves the admissible density range");
    return v;
  };
  for (int K = 0; K < nc; ++K) {
    state.N.cell[K] = check(cell_average(mesh, K, setup.initial.N0), "N");
    state.P.cell[K] = check(cell_average(mesh, K, setup.initial.P0), "P");
  }
  for (int s = 0; s < nf; ++s) {
    if (is_dirichlet(mesh.face[s].tag)) {
      state.N.face[s] = setup.dirichlet.N.face[s];
      state.P.face[s] = setup.dirichlet.P.face[s];
    } else {
      state.N.face[s] = check(face_average(mesh, s, setup.initial.N0), "N");
      state.P.face[s] = check(face_average(mesh, s, setup.initial.P0), "P");
    }
  }
  PoissonResult assoc =
      association_potential(setup, state.N.cell, state.P.cell, pconfig);
  state.phi = assoc.phi;
  if (info) info->linear_solves = assoc.linear_solves;
  return state;
}

struct TransientSolver::Impl {
  const ProblemSetup* setup = nullptr;
  StepperConfig cfg;
  SparseMatrix S;
  Eigen::SparseLU<SparseMatrix> lu;
  bool analyzed = false;
  std::vector<Triplet> trips;

  // Jacobian blocks of one cell: rows/cols ordered (N, P, phi) per entity.
  struct Blocks {
    Eigen::Matrix3d Jcc;
    Matrix Jcf, Jfc, Jff;
    Eigen::Vector3d Rc;
  };

  void cell_blocks(const SchemeState& prev, const SchemeState& st, Real dt,
                   int K, const CoupledResidual& R, Blocks& b) const {
    const Mesh& mesh = *setup->mesh;
    const stats::Model& model = setup->model;
    const Cell& cell = mesh.cell[K];
    const int nl = cell.count;
    const Real m = cell.measure;

    const Vector Nf = gather_faces(mesh, K, st.N.face);
    const Vector Pf = gather_faces(mesh, K, st.P.face);
    const Vector phif = gather_faces(mesh, K, st.phi.face);
    const Real NK = st.N.cell[K];
    const Real PK = st.P.cell[K];
    const Real phiK = st.phi.cell[K];

    Vector thetaNf(nl), thetaPf(nl), dhNf(nl), dhPf(nl);
    for (int j = 0; j < nl; ++j) {
      thetaNf[j] = stats::h(model, Nf[j]) - phif[j];
      thetaPf[j] = stats::h(model, Pf[j]) + phif[j];
      dhNf[j] = stats::dh(model, Nf[j]);
      dhPf[j] = stats::dh(model, Pf[j]);
    }
    const Real dhNc = stats::dh(model, NK);
    const Real dhPc = stats::dh(model, PK);

    const Vector SN =
        local_flux(setup->op_N, K, stats::h(model, NK) - phiK, thetaNf);
    const Vector SP =
        local_flux(setup->op_P, K, stats::h(model, PK) + phiK, thetaPf);
    const Real sumSN = SN.sum();
    const Real sumSP = SP.sum();

    const Real rN = reconstruction(mesh, model, setup->mean, K, NK, Nf);
    const Real rP = reconstruction(mesh, model, setup->mean, K, PK, Pf);
    Real drNc = 0.0, drPc = 0.0;
    Vector drNf, drPf;
    reconstruction_partials(mesh, model, setup->mean, K, NK, Nf, drNc, drNf);
    reconstruction_partials(mesh, model, setup->mean, K, PK, Pf, drPc, drPf);

    Real RdN = 0.0, RdP = 0.0;
    recombination_rate(setup->rec, model, NK, PK, &RdN, &RdP);

    const Matrix& AN = setup->op_N.A[static_cast<size_t>(K)];
    const Matrix& AP = setup->op_P.A[static_cast<size_t>(K)];
    const Matrix& Aphi = setup->op_phi.A[static_cast<size_t>(K)];
    const Vector& rowN = setup->op_N.row_sum[static_cast<size_t>(K)];
    const Vector& rowP = setup->op_P.row_sum[static_cast<size_t>(K)];
    const Vector& rowPhi = setup->op_phi.row_sum[static_cast<size_t>(K)];
    const Vector& colN = setup->op_N.col_sum[static_cast<size_t>(K)];
    const Vector& colP = setup->op_P.col_sum[static_cast<size_t>(K)];
    const Vector& colPhi = setup->op_phi.col_sum[static_cast<size_t>(K)];
    const Real totN = setup->op_N.total[static_cast<size_t>(K)];
    const Real totP = setup->op_P.total[static_cast<size_t>(K)];
    const Real totPhi = setup->op_phi.total[static_cast<size_t>(K)];

    b.Jcc.setZero();
    b.Jcc(0, 0) = m / dt + drNc * sumSN + rN * totN * dhNc + m * RdN;
    b.Jcc(0, 1) = m * RdP;
    b.Jcc(0, 2) = -rN * totN;
    b.Jcc(1, 0) = m * RdN;
    b.Jcc(1, 1) = m / dt + drPc * sumSP + rP * totP * dhPc + m * RdP;
    b.Jcc(1, 2) = rP * totP;
    b.Jcc(2, 0) = m;
    b.Jcc(2, 1) = -m;
    b.Jcc(2, 2) = totPhi;

    b.Jcf.setZero(3, 3 * nl);
    b.Jfc.setZero(3 * nl, 3);
    b.Jff.setZero(3 * nl, 3 * nl);
    for (int l = 0; l < nl; ++l) {
      b.Jcf(0, 3 * l + 0) = drNf[l] * sumSN - rN * colN[l] * dhNf[l];
      b.Jcf(0, 3 * l + 2) = rN * colN[l];
      b.Jcf(1, 3 * l + 1) = drPf[l] * sumSP - rP * colP[l] * dhPf[l];
      b.Jcf(1, 3 * l + 2) = -rP * colP[l];
      b.Jcf(2, 3 * l + 2) = -colPhi[l];
    }
    for (int j = 0; j < nl; ++j) {
      b.Jfc(3 * j + 0, 0) = drNc * SN[j] + rN * rowN[j] * dhNc;
      b.Jfc(3 * j + 0, 2) = -rN * rowN[j];
      b.Jfc(3 * j + 1, 1) = drPc * SP[j] + rP * rowP[j] * dhPc;
      b.Jfc(3 * j + 1, 2) = rP * rowP[j];
      b.Jfc(3 * j + 2, 2) = rowPhi[j];
      for (int l = 0; l < nl; ++l) {
        b.Jff(3 * j + 0, 3 * l + 0) = drNf[l] * SN[j] - rN * AN(j, l) * dhNf[l];
        b.Jff(3 * j + 0, 3 * l + 2) = rN * AN(j, l);
        b.Jff(3 * j + 1, 3 * l + 1) = drPf[l] * SP[j] - rP * AP(j, l) * dhPf[l];
        b.Jff(3 * j + 1, 3 * l + 2) = -rP * AP(j, l);
        b.Jff(3 * j + 2, 3 * l + 2) = -Aphi(j, l);
      }
    }
    b.Rc << R.N.cell[K], R.P.cell[K], R.phi.cell[K];
  }

  bool solve_condensed(const SchemeState& prev, const SchemeState& st, Real dt,
                       const CoupledResidual& R, HybridVector& dN,
                       HybridVector& dP, HybridVector& dphi,
                       std::string* why) {
    const Mesh& mesh = *setup->mesh;
    const DofMap& dofs = setup->dofs;
    const int nc = mesh.n_cells();
    const int na = dofs.n_active();

    Vector rhs = Vector::Zero(3 * na);
    for (int a = 0; a < na; ++a) {
      const int s = dofs.active_face[static_cast<size_t>(a)];
      rhs[3 * a + 0] = -R.N.face[s];
      rhs[3 * a + 1] = -R.P.face[s];
      rhs[3 * a + 2] = -R.phi.face[s];
    }

    trips.clear();
    std::vector<Eigen::Matrix3d> inv_cc(static_cast<size_t>(nc));
    Blocks b;
    for (int K = 0; K < nc; ++K) {
      cell_blocks(prev, st, dt, K, R, b);
      Eigen::FullPivLU<Eigen::Matrix3d> lu_cc(b.Jcc);
      if (!b.Jcc.allFinite() || !lu_cc.isInvertible()) {
        if (why) *why = "singular cell block at cell " + std::to_string(K);
        return false;
      }
      inv_cc[static_cast<size_t>(K)] = lu_cc.inverse();
      const Eigen::Matrix3d& inv = inv_cc[static_cast<size_t>(K)];
      const Cell& cell = mesh.cell[K];
      const int nl = cell.count;
      const Matrix schur = b.Jff - b.Jfc * inv * b.Jcf;
      const Eigen::Vector3d lift = inv * b.Rc;
      for (int j = 0; j < nl; ++j) {
        const int sj = mesh.cf_face[cell.first + j];
        const int aj = dofs.face_unknown[static_cast<size_t>(sj)];
        if (aj < 0) continue;
        for (int rj = 0; rj < 3; ++rj)
          rhs[3 * aj + rj] += b.Jfc.row(3 * j + rj).dot(lift);
        for (int l = 0; l < nl; ++l) {
          const int sl = mesh.cf_face[cell.first + l];
          const int al = dofs.face_unknown[static_cast<size_t>(sl)];
          if (al < 0) continue;
          for (int rj = 0; rj < 3; ++rj)
            for (int rl = 0; rl < 3; ++rl)
              trips.emplace_back(3 * aj + rj, 3 * al + rl,
                                 schur(3 * j + rj, 3 * l + rl));
        }
      }
    }

    Vector dE = Vector::Zero(3 * na);
    if (na > 0) {
      S.resize(3 * na, 3 * na);
      S.setFromTriplets(trips.begin(), trips.end());
      if (!analyzed) {
        lu.analyzePattern(S);
        analyzed = true;
      }
      lu.factorize(S);
      if (lu.info() != Eigen::Success) {
        if (why) *why = "face system factorisation failed";
        return false;
      }
      dE = lu.solve(rhs);
    }

    const int nf = mesh.n_faces();
    dN = HybridVector::Constant(nc, nf, 0.0);
    dP = HybridVector::Constant(nc, nf, 0.0);
    dphi = HybridVector::Constant(nc, nf, 0.0);
    for (int a = 0; a < na; ++a) {
      const int s = dofs.active_face[static_cast<size_t>(a)];
      dN.face[s] = dE[3 * a + 0];
      dP.face[s] = dE[3 * a + 1];
      dphi.face[s] = dE[3 * a + 2];
    }
    for (int K = 0; K < nc; ++K) {
      cell_blocks(prev, st, dt, K, R, b);
      const Cell& cell = mesh.cell[K];
      Vector dE_local = Vector::Zero(3 * cell.count);
      for (int l = 0; l < cell.count; ++l) {
        const int sl = mesh.cf_face[cell.first + l];
        dE_local[3 * l + 0] = dN.face[sl];
        dE_local[3 * l + 1] = dP.face[sl];
        dE_local[3 * l + 2] = dphi.face[sl];
      }
      const Eigen::Vector3d dc =
          inv_cc[static_cast<size_t>(K)] * (-b.Rc - b.Jcf * dE_local);
      dN.cell[K] = dc[0];
      dP.cell[K] = dc[1];
      dphi.cell[K] = dc[2];
    }
    return true;
  }

  void solve_full(const SchemeState& prev, const SchemeState& st, Real dt,
                  const CoupledResidual& R, HybridVector& dN, HybridVector& dP,
                  HybridVector& dphi) {
    const Mesh& mesh = *setup->mesh;
    const DofMap& dofs = setup->dofs;
    const int nc = mesh.n_cells();
    const int na = dofs.n_active();
    const int dim = 3 * (nc + na);
    std::vector<Triplet> full;
    Vector rhs = Vector::Zero(dim);
    Blocks b;
    const auto face_base = [&](int a) { return 3 * (nc + a); };
    for (int K = 0; K < nc; ++K) {
      cell_blocks(prev, st, dt, K, R, b);
      const Cell& cell = mesh.cell[K];
      for (int r = 0; r < 3; ++r) {
        rhs[3 * K + r] = -b.Rc[r];
        for (int c = 0; c < 3; ++c)
          full.emplace_back(3 * K + r, 3 * K + c, b.Jcc(r, c));
      }
      for (int l = 0; l < cell.count; ++l) {
        const int sl = mesh.cf_face[cell.first + l];
        const int al = dofs.face_unknown[static_cast<size_t>(sl)];
        if (al < 0) continue;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            full.emplace_back(3 * K + r, face_base(al) + c,
                              b.Jcf(r, 3 * l + c));
      }
      for (int j = 0; j < cell.count; ++j) {
        const int sj = mesh.cf_face[cell.first + j];
        const int aj = dofs.face_unknown[static_cast<size_t>(sj)];
        if (aj < 0) continue;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            full.emplace_back(face_base(aj) + r, 3 * K + c,
                              b.Jfc(3 * j + r, c));
        for (int l = 0; l < cell.count; ++l) {
          const int sl = mesh.cf_face[cell.first + l];
          const int al = dofs.face_unknown[static_cast<size_t>(sl)];
          if (al < 0) continue;
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
              full.emplace_back(face_base(aj) + r, face_base(al) + c,
                                b.Jff(3 * j + r, 3 * l + c));
        }
      }
    }
    for (int a = 0; a < na; ++a) {
      const int s = dofs.active_face[static_cast<size_t>(a)];
      rhs[face_base(a) + 0] = -R.N.face[s];
      rhs[face_base(a) + 1] = -R.P.face[s];
      rhs[face_base(a) + 2] = -R.phi.face[s];
    }
    SparseMatrix J(dim, dim);
    J.setFromTriplets(full.begin(), full.end());
    Eigen::SparseLU<SparseMatrix> full_lu;
    full_lu.compute(J);
    if (full_lu.info() != Eigen::Success)
      throw SolverError("transient: full system factorisation failed");
    const Vector delta = full_lu.solve(rhs);

    const int nf = mesh.n_faces();
    dN = HybridVector::Constant(nc, nf, 0.0);
    dP = HybridVector::Constant(nc, nf, 0.0);
    dphi = HybridVector::Constant(nc, nf, 0.0);
    for (int K = 0; K < nc; ++K) {
      dN.cell[K] = delta[3 * K + 0];
      dP.cell[K] = delta[3 * K + 1];
      dphi.cell[K] = delta[3 * K + 2];
    }
    for (int a = 0; a < na; ++a) {
      const int s = dofs.active_face[static_cast<size_t>(a)];
      dN.face[s] = delta[face_base(a) + 0];
      dP.face[s] = delta[face_base(a) + 1];
      dphi.face[s] = delta[face_base(a) + 2];
    }
  }
};

TransientSolver::TransientSolver(const ProblemSetup& setup,
                                 const StepperConfig& config)
    : impl_(std::make_shared<Impl>()) {
  impl_->setup = &setup;
  impl_->cfg = config;
}

NewtonReport TransientSolver::attempt(const SchemeState& prev, Real dt,
                                      SchemeState& next) {
  const ProblemSetup& setup = *impl_->setup;
  const StepperConfig& cfg = impl_->cfg;
  const Mesh& mesh = *setup.mesh;
  const DofMap& dofs = setup.dofs;
  const Real ub = setup.model.upper_bound();
  const bool bounded = setup.model.bounded();

  next = prev;
  next.t = prev.t + dt;
  const Real proj_hi = bounded ? ub - cfg.eps
                               : std::numeric_limits<Real>::infinity();
  const auto project = [&](HybridVector& v) {
    for (int K = 0; K < mesh.n_cells(); ++K)
      v.cell[K] = std::clamp(v.cell[K], cfg.eps, proj_hi);
    for (int s : dofs.active_face)
      v.face[s] = std::clamp(v.face[s], cfg.eps, proj_hi);
  };
  project(next.N);
  project(next.P);

  NewtonReport rep;
  CoupledResidual R = coupled_residual(setup, prev, next, dt);
  const Real R0 = R.sup_norm();
  rep.residual_norm = R0;
  const Real target = cfg.tol * (1.0 + R0);
  const Real lo = cfg.eps / 10.0;
  const Real hi = bounded ? ub - cfg.eps / 10.0
                          : std::numeric_limits<Real>::infinity();

  const auto admissible = [&](const HybridVector& v) {
    for (int K = 0; K < mesh.n_cells(); ++K)
      if (!std::isfinite(v.cell[K]) || v.cell[K] <= lo || v.cell[K] >= hi)
        return false;
    for (int s : dofs.active_face)
      if (!std::isfinite(v.face[s]) || v.face[s] <= lo || v.face[s] >= hi)
        return false;
    return true;
  };

  HybridVector dN, dP, dphi;
  while (true) {
    if (rep.residual_norm <= target) {
      rep.converged = true;
      return rep;
    }
    if (rep.iterations >= cfg.max_newton) {
      rep.reject_reason = "newton budget exhausted";
      return rep;
    }
    std::string why;
    if (!impl_->solve_condensed(prev, next, dt, R, dN, dP, dphi, &why)) {
      rep.reject_reason = why;
      return rep;
    }
    ++rep.iterations;
    ++rep.linear_solves;
    next.N += dN;
    next.P += dP;
    next.phi += dphi;
    if (!admissible(next.N) || !admissible(next.P)) {
      rep.reject_reason = "iterate left the admissible density range";
      return rep;
    }
    bool capped = false;
    for (int K = 0; K < mesh.n_cells() && !capped; ++K)
      capped = stats::h(setup.model, next.N.cell[K]) +
                   stats::h(setup.model, next.P.cell[K]) >
               cfg.exp_cap;
    if (capped) {
      rep.reject_reason = "mass-action exponent overflow";
      return rep;
    }
    for (int K = 0; K < mesh.n_cells(); ++K)
      if (!std::isfinite(next.phi.cell[K])) {
        rep.reject_reason = "non-finite potential update";
        return rep;
      }
    R = coupled_residual(setup, prev, next, dt);
    rep.residual_norm = R.sup_norm();
    if (!std::isfinite(rep.residual_norm)) {
      rep.reject_reason = "non-finite residual";
      return rep;
    }
  }
}

void TransientSolver::direction(const SchemeState& prev,
                                const SchemeState& iterate, Real dt,
                                bool condensed, HybridVector& dN,
                                HybridVector& dP, HybridVector& dphi) {
  const CoupledResidual R = coupled_residual(*impl_->setup, prev, iterate, dt);
  if (condensed) {
    std::string why;
    if (!impl_->solve_condensed(prev, iterate, dt, R, dN, dP, dphi, &why))
      throw SolverError("transient: " + why);
  } else {
    impl_->solve_full(prev, iterate, dt, R, dN, dP, dphi);
  }
}

NewtonReport solve_step(const ProblemSetup& setup, const StepperConfig& config,
                        const SchemeState& prev, Real dt, SchemeState& next) {
  TransientSolver solver(setup, config);
  return solver.attempt(prev, dt, next);
}

TransientResult run_transient(const ProblemSetup& setup,
                              const StepperConfig& config,
                              const PoissonConfig& pconfig,
                              const StepCallback& on_step) {
  if (!(config.dt > 0.0) || !(config.t_end > 0.0))
    throw InvalidInput("run_transient: dt and t_end must be positive");
  InitInfo init;
  SchemeState state = initial_state(setup, pconfig, &init);
  TransientResult out;
  out.linear_solves = init.linear_solves;
  out.equilibrium = std::move(init.equilibrium);
  StepInfo rec{0.0, 0.0, 0, out.linear_solves, 0};
  out.steps.push_back(rec);
  if (on_step) on_step(state, rec);

  TransientSolver solver(setup, config);
  SchemeState next;
  Real current_dt = config.dt;
  const Real t_guard = 1e-12 * std::max(Real(1), config.t_end);
  while (state.t < config.t_end - t_guard) {
    const Real applied = std::min(current_dt, config.t_end - state.t);
    NewtonReport rep = solver.attempt(state, applied, next);
    out.linear_solves += rep.linear_solves;
    if (rep.converged) {
      state = next;
      StepInfo info{state.t, applied, rep.iterations, out.linear_solves,
                    out.rejected_attempts};
      out.steps.push_back(info);
      if (on_step) on_step(state, info);
      current_dt = std::min(config.dt, config.growth * applied);
    } else {
      ++out.rejected_attempts;
      current_dt = applied / config.shrink;
      if (current_dt < config.min_dt)
        throw SolverError(
            "transient: step size underflow at t = " + std::to_string(state.t) +
            " (dt = " + std::to_string(applied) +
            ", last rejection: " + rep.reject_reason + ")");
    }
  }
  out.state = state;
  return out;
}

}  // namespace hfvdd
