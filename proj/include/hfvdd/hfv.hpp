// Hybrid finite volume operator layer.  Unknowns live on cells and faces;
// each cell K carries a consistent gradient plus a per-face stabilisation,
//
//   G_K(v)        = 1/|K| sum_sigma' |sigma'| (v_sigma' - v_K) n_{K,sigma'}
//   grad_{K,s}(v) = G_K(v) + eta/d_{K,s} (v_s - v_K - G_K(v).(xbar_s - x_K)) n_{K,s}
//
// and the local bilinear form a_K(u,v) = sum_s |P_{K,s}| grad_s(v) . Lam_s grad_s(u)
// collapses to a face-by-face flux matrix A_K with
// F_{K,s}(u) = sum_s' A_K(s,s') (u_K - u_s') and
// a_K(u,v) = sum_s F_{K,s}(u) (v_K - v_s).
#pragma once

#include <hfvdd/mesh.hpp>
#include <hfvdd/statistics.hpp>

#include <functional>

namespace hfvdd {

inline constexpr Real kDefaultEta = 1.5;

// One 2x2 tensor per (cell,face) pair, sampled at the pyramid barycentre.
struct TensorField {
  std::vector<Mat2> value;  // aligned with the mesh cf_* arrays
  Real sym_min = 0.0;       // eigenvalue range of the symmetric parts
  Real sym_max = 0.0;
  Real skew_max = 0.0;  // largest |off-diagonal| of the skew parts
};

TensorField sample_tensor(const Mesh& mesh,
                          const std::function<Mat2(const Vec2&)>& lam);
TensorField constant_tensor(const Mesh& mesh, const Mat2& lam);

// Local face values of a face-indexed global vector.
Vector gather_faces(const Mesh& mesh, int K, const Vector& face_values);

Vec2 consistent_gradient(const Mesh& mesh, int K, Real vK, const Vector& vf);

// Per-face stabilised gradients of the local hybrid vector (vK, vf).
std::vector<Vec2> local_gradient(const Mesh& mesh, int K, Real eta, Real vK,
                                 const Vector& vf);

struct DiffusionOperator {
  Real eta = kDefaultEta;
  std::vector<Matrix> A;  // per cell: count x count local flux matrix
  std::vector<Vector> row_sum;
  std::vector<Vector> col_sum;
  std::vector<Real> total;  // sum of all entries of A, > 0
};

DiffusionOperator assemble_operator(const Mesh& mesh, const TensorField& lam,
                                    Real eta = kDefaultEta);

// F_{K,.}(u) for local values (uK, uf): A_K (uK 1 - uf).
Vector local_flux(const DiffusionOperator& op, int K, Real uK,
                  const Vector& uf);

// sum_K a_K(u,v).  The first argument is the one the fluxes act on; the
// order matters when the tensor has a skew part.
Real bilinear(const Mesh& mesh, const DiffusionOperator& op,
              const HybridVector& u, const HybridVector& v);

// |v|^2 = sum_K sum_s |sigma|/d_{K,s} (v_K - v_s)^2.
Real seminorm_sq(const Mesh& mesh, const HybridVector& v);

// r_K(u) = 1/|E_K| sum_s m(u_K, u_s).
Real reconstruction(const Mesh& mesh, const stats::Model& model,
                    stats::MeanKind mean, int K, Real uK, const Vector& uf);

// d r_K / d u_K and d r_K / d u_s.
void reconstruction_partials(const Mesh& mesh, const stats::Model& model,
                             stats::MeanKind mean, int K, Real uK,
                             const Vector& uf, Real& d_cell, Vector& d_face);

// r_K(u) F_{K,.}(h(u) + sign phi) for local values; sign is -1 for
// electrons, +1 for holes.
Vector nonlinear_flux(const Mesh& mesh, const DiffusionOperator& op,
                      const stats::Model& model, stats::MeanKind mean, int K,
                      Real sign, Real uK, const Vector& uf, Real phiK,
                      const Vector& phif);

// T(u,w,v) = sum_K r_K(u) a_K(w,v).
Real trilinear(const Mesh& mesh, const DiffusionOperator& op,
               const stats::Model& model, stats::MeanKind mean,
               const HybridVector& u, const HybridVector& w,
               const HybridVector& v);

// Discrete liftings of the boundary data.  ND is the density datum extended
// to the closure; face and cell values of N are g(average of h(ND)) so that
// the compatibility h(N_s) - phi_s = alpha_N holds exactly on every dof;
// P follows from h(P) + phi = alpha_P.
struct DirichletData {
  HybridVector N, P, phi;
};

DirichletData interpolate_boundary(const Mesh& mesh, const stats::Model& model,
                                   const std::function<Real(const Vec2&)>& ND,
                                   Real alphaN, Real alphaP);

}  // namespace hfvdd
