// Assembled problem description shared by the Poisson and transient solvers:
// mesh, statistics, diffusion operators for the three tensors, doping,
// recombination, boundary liftings and the face unknown numbering.
#pragma once

#include <hfvdd/hfv.hpp>

#include <memory>

namespace hfvdd {

enum class RecombinationKind { None, ShockleyReadHall, Auger, ScaledSRH };

// Rate prefactor r(N,P) of the mass-action recombination
// R(N,P) = r(N,P) (exp(h(N) + h(P)) - 1).
struct Recombination {
  RecombinationKind kind = RecombinationKind::None;
  Real tau_n = 1.0, tau_p = 1.0, tau_c = 1.0;  // Shockley-Read-Hall
  Real c_n = 1.0, c_p = 1.0;                   // Auger
  Real kappa = 1.0;                            // scaled SRH

  bool active() const { return kind != RecombinationKind::None; }
};

Recombination parse_recombination(const std::string& text);
std::string recombination_name(const Recombination& rec);

Real recombination_prefactor(const Recombination& rec, Real N, Real P);
void recombination_prefactor_partials(const Recombination& rec, Real N, Real P,
                                      Real& dN, Real& dP);

// Full rate and its partial derivatives; caps the exponent to keep expm1
// finite (the transient solver rejects iterates past the cap anyway).
Real recombination_rate(const Recombination& rec, const stats::Model& model,
                        Real N, Real P, Real* dN = nullptr,
                        Real* dP = nullptr);

// Face unknown numbering: Dirichlet faces carry data, not unknowns.
struct DofMap {
  std::vector<int> face_unknown;  // face -> active index, -1 on Dirichlet
  std::vector<int> active_face;   // active index -> face

  int n_active() const { return static_cast<int>(active_face.size()); }
};

DofMap make_dof_map(const Mesh& mesh);

struct InitialProfile {
  bool from_equilibrium = false;
  std::function<Real(const Vec2&)> N0, P0;  // used when !from_equilibrium
};

struct ProblemSetup {
  std::shared_ptr<const Mesh> mesh;
  stats::Model model;
  stats::MeanKind mean = stats::MeanKind::Arithmetic;
  Real eta = kDefaultEta;

  TensorField lam_N, lam_P, lam_phi;
  DiffusionOperator op_N, op_P, op_phi;

  Vector doping;  // per cell
  Recombination rec;

  Real alpha_N = 0.0, alpha_P = 0.0;
  std::function<Real(const Vec2&)> ND;  // boundary density lifting
  DirichletData dirichlet;
  DofMap dofs;

  InitialProfile initial;
};

// Tensor callables for the magnetised drift-diffusion set: rotation tensors
// 1/(1+b^2) [[1, +-b], [-+b, 1]] for the carriers and lambda^2 Id for the
// potential.
Mat2 carrier_tensor(Real b, Real sign);
std::function<Mat2(const Vec2&)> electron_tensor(Real b);
std::function<Mat2(const Vec2&)> hole_tensor(Real b);
std::function<Mat2(const Vec2&)> potential_tensor(Real lambda);

struct SetupSpec {
  std::shared_ptr<const Mesh> mesh;
  stats::Model model;
  stats::MeanKind mean = stats::MeanKind::Arithmetic;
  Real eta = kDefaultEta;
  std::function<Mat2(const Vec2&)> lam_N, lam_P, lam_phi;
  std::function<Real(const Vec2&)> doping;
  Recombination rec;
  Real alpha_N = 0.0, alpha_P = 0.0;
  std::function<Real(const Vec2&)> ND;
  InitialProfile initial;
};

// Samples tensors, assembles the operators, interpolates the boundary data
// (exactly compatible with (alpha_N, alpha_P)) and numbers the unknowns.
ProblemSetup build_setup(const SetupSpec& spec);

}  // namespace hfvdd
