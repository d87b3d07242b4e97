#include <hfvdd/hfv.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hfvdd {

TensorField sample_tensor(const Mesh& mesh,
                          const std::function<Mat2(const Vec2&)>& lam) {
  TensorField field;
  field.value.resize(mesh.cf_face.size());
  bool first = true;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Cell& cell = mesh.cell[K];
    for (int j = 0; j < cell.count; ++j) {
      const int idx = cell.first + j;
      const Face& f = mesh.face[mesh.cf_face[idx]];
      const Vec2 bary =
          (cell.center + mesh.vertex[f.v0] + mesh.vertex[f.v1]) / 3.0;
      const Mat2 L = lam(bary);
      field.value[idx] = L;
      const Mat2 sym = 0.5 * (L + L.transpose());
      Eigen::SelfAdjointEigenSolver<Mat2> eig(sym);
      const Real lo = eig.eigenvalues().minCoeff();
      const Real hi = eig.eigenvalues().maxCoeff();
      const Real skew = std::abs(0.5 * (L(0, 1) - L(1, 0)));
      if (first) {
        field.sym_min = lo;
        field.sym_max = hi;
        field.skew_max = skew;
        first = false;
      } else {
        field.sym_min = std::min(field.sym_min, lo);
        field.sym_max = std::max(field.sym_max, hi);
        field.skew_max = std::max(field.skew_max, skew);
      }
    }
  }
  if (!(field.sym_min > 0.0))
    throw InvalidInput("tensor field: symmetric part is not positive definite "
                       "(min eigenvalue " +
                       std::to_string(field.sym_min) + ")");
  return field;
}

TensorField constant_tensor(const Mesh& mesh, const Mat2& lam) {
  return sample_tensor(mesh, [&lam](const Vec2&) { return lam; });
}

Vector gather_faces(const Mesh& mesh, int K, const Vector& face_values) {
  const Cell& cell = mesh.cell[K];
  Vector out(cell.count);
  for (int j = 0; j < cell.count; ++j)
    out[j] = face_values[mesh.cf_face[cell.first + j]];
  return out;
}

Vec2 consistent_gradient(const Mesh& mesh, int K, Real vK, const Vector& vf) {
  const Cell& cell = mesh.cell[K];
  Vec2 G = Vec2::Zero();
  for (int j = 0; j < cell.count; ++j) {
    const int idx = cell.first + j;
    const Face& f = mesh.face[mesh.cf_face[idx]];
    G += f.measure * (vf[j] - vK) * mesh.cf_normal[idx];
  }
  return G / cell.measure;
}

std::vector<Vec2> local_gradient(const Mesh& mesh, int K, Real eta, Real vK,
                                 const Vector& vf) {
  const Cell& cell = mesh.cell[K];
  const Vec2 G = consistent_gradient(mesh, K, vK, vf);
  std::vector<Vec2> grad(static_cast<size_t>(cell.count));
  for (int j = 0; j < cell.count; ++j) {
    const int idx = cell.first + j;
    const Face& f = mesh.face[mesh.cf_face[idx]];
    const Real resid = vf[j] - vK - G.dot(f.center - cell.center);
    grad[static_cast<size_t>(j)] =
        G + (eta / mesh.cf_d[idx]) * resid * mesh.cf_normal[idx];
  }
  return grad;
}

DiffusionOperator assemble_operator(const Mesh& mesh, const TensorField& lam,
                                    Real eta) {
  if (lam.value.size() != mesh.cf_face.size())
    throw InvalidInput("assemble_operator: tensor field does not match mesh");
  DiffusionOperator op;
  op.eta = eta;
  const int nc = mesh.n_cells();
  op.A.resize(static_cast<size_t>(nc));
  op.row_sum.resize(static_cast<size_t>(nc));
  op.col_sum.resize(static_cast<size_t>(nc));
  op.total.resize(static_cast<size_t>(nc));
  Vector basis;
  for (int K = 0; K < nc; ++K) {
    const Cell& cell = mesh.cell[K];
    const int nf = cell.count;
    // Gradients of the face basis vectors e_s (cell value 0, face s value 1).
    std::vector<std::vector<Vec2>> grads(static_cast<size_t>(nf));
    basis = Vector::Zero(nf);
    for (int s = 0; s < nf; ++s) {
      basis[s] = 1.0;
      grads[static_cast<size_t>(s)] = local_gradient(mesh, K, eta, 0.0, basis);
      basis[s] = 0.0;
    }
    Matrix& A = op.A[static_cast<size_t>(K)];
    A.resize(nf, nf);
    for (int s = 0; s < nf; ++s)
      for (int sp = 0; sp < nf; ++sp) {
        Real sum = 0.0;
        for (int t = 0; t < nf; ++t) {
          const int idx = cell.first + t;
          sum += mesh.cf_pyr[idx] *
                 grads[static_cast<size_t>(s)][static_cast<size_t>(t)].dot(
                     lam.value[idx] *
                     grads[static_cast<size_t>(sp)][static_cast<size_t>(t)]);
        }
        A(s, sp) = sum;
      }
    op.row_sum[static_cast<size_t>(K)] = A.rowwise().sum();
    op.col_sum[static_cast<size_t>(K)] = A.colwise().sum().transpose();
    op.total[static_cast<size_t>(K)] = A.sum();
  }
  return op;
}

Vector local_flux(const DiffusionOperator& op, int K, Real uK,
                  const Vector& uf) {
  const Matrix& A = op.A[static_cast<size_t>(K)];
  return A * (Vector::Constant(uf.size(), uK) - uf);
}

Real bilinear(const Mesh& mesh, const DiffusionOperator& op,
              const HybridVector& u, const HybridVector& v) {
  Real acc = 0.0;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Vector uf = gather_faces(mesh, K, u.face);
    const Vector vf = gather_faces(mesh, K, v.face);
    const Vector du = Vector::Constant(uf.size(), u.cell[K]) - uf;
    const Vector dv = Vector::Constant(vf.size(), v.cell[K]) - vf;
    acc += dv.dot(op.A[static_cast<size_t>(K)] * du);
  }
  return acc;
}

Real seminorm_sq(const Mesh& mesh, const HybridVector& v) {
  Real acc = 0.0;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Cell& cell = mesh.cell[K];
    for (int j = 0; j < cell.count; ++j) {
      const int idx = cell.first + j;
      const Face& f = mesh.face[mesh.cf_face[idx]];
      const Real d = v.cell[K] - v.face[mesh.cf_face[idx]];
      acc += f.measure / mesh.cf_d[idx] * d * d;
    }
  }
  return acc;
}

Real reconstruction(const Mesh& mesh, const stats::Model& model,
                    stats::MeanKind mean, int K, Real uK, const Vector& uf) {
  Real acc = 0.0;
  for (int j = 0; j < uf.size(); ++j)
    acc += stats::mean(mean, model, uK, uf[j]);
  return acc / static_cast<Real>(uf.size());
}

void reconstruction_partials(const Mesh& mesh, const stats::Model& model,
                             stats::MeanKind mean, int K, Real uK,
                             const Vector& uf, Real& d_cell, Vector& d_face) {
  const Real inv = 1.0 / static_cast<Real>(uf.size());
  d_cell = 0.0;
  d_face.resize(uf.size());
  for (int j = 0; j < uf.size(); ++j) {
    const auto [dx, dy] = stats::mean_partials(mean, model, uK, uf[j]);
    d_cell += inv * dx;
    d_face[j] = inv * dy;
  }
}

Vector nonlinear_flux(const Mesh& mesh, const DiffusionOperator& op,
                      const stats::Model& model, stats::MeanKind mean, int K,
                      Real sign, Real uK, const Vector& uf, Real phiK,
                      const Vector& phif) {
  const Real r = reconstruction(mesh, model, mean, K, uK, uf);
  const Real wK = stats::h(model, uK) + sign * phiK;
  Vector wf(uf.size());
  for (int j = 0; j < uf.size(); ++j)
    wf[j] = stats::h(model, uf[j]) + sign * phif[j];
  return r * local_flux(op, K, wK, wf);
}

Real trilinear(const Mesh& mesh, const DiffusionOperator& op,
               const stats::Model& model, stats::MeanKind mean,
               const HybridVector& u, const HybridVector& w,
               const HybridVector& v) {
  Real acc = 0.0;
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Vector ufK = gather_faces(mesh, K, u.face);
    const Real r = reconstruction(mesh, model, mean, K, u.cell[K], ufK);
    const Vector wf = gather_faces(mesh, K, w.face);
    const Vector vf = gather_faces(mesh, K, v.face);
    const Vector dw = Vector::Constant(wf.size(), w.cell[K]) - wf;
    const Vector dv = Vector::Constant(vf.size(), v.cell[K]) - vf;
    acc += r * dv.dot(op.A[static_cast<size_t>(K)] * dw);
  }
  return acc;
}

DirichletData interpolate_boundary(const Mesh& mesh, const stats::Model& model,
                                   const std::function<Real(const Vec2&)>& ND,
                                   Real alphaN, Real alphaP) {
  const auto hND = [&](const Vec2& x) { return stats::h(model, ND(x)); };
  DirichletData out;
  const int nc = mesh.n_cells();
  const int nf = mesh.n_faces();
  out.N = HybridVector::Constant(nc, nf, 0.0);
  out.P = HybridVector::Constant(nc, nf, 0.0);
  out.phi = HybridVector::Constant(nc, nf, 0.0);
  for (int K = 0; K < nc; ++K) {
    const Real avg = cell_average(mesh, K, hND);
    out.N.cell[K] = stats::g(model, avg);
    out.phi.cell[K] = avg - alphaN;
    out.P.cell[K] = stats::g(model, alphaP - out.phi.cell[K]);
  }
  for (int s = 0; s < nf; ++s) {
    const Real avg = face_average(mesh, s, hND);
    out.N.face[s] = stats::g(model, avg);
    out.phi.face[s] = avg - alphaN;
    out.P.face[s] = stats::g(model, alphaP - out.phi.face[s]);
  }
  return out;
}

}  // namespace hfvdd
