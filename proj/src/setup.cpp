#include <hfvdd/setup.hpp>

#include <cmath>
#include <sstream>

namespace hfvdd {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

Real parse_positive(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  Real value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidInput("recombination: bad " + what + " '" + text + "'");
  }
  if (used != text.size() || !(value > 0.0))
    throw InvalidInput("recombination: " + what + " must be positive, got '" +
                       text + "'");
  return value;
}

}  // namespace

Recombination parse_recombination(const std::string& text) {
  Recombination rec;
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidInput("recombination: empty spec");
  const std::string& name = parts[0];
  if (name == "none") {
    if (parts.size() != 1)
      throw InvalidInput("recombination: 'none' takes no parameters");
    rec.kind = RecombinationKind::None;
  } else if (name == "srh") {
    if (parts.size() != 4)
      throw InvalidInput("recombination: expected srh:<tau_n>:<tau_p>:<tau_c>");
    rec.kind = RecombinationKind::ShockleyReadHall;
    rec.tau_n = parse_positive(parts[1], "tau_n");
    rec.tau_p = parse_positive(parts[2], "tau_p");
    rec.tau_c = parse_positive(parts[3], "tau_c");
  } else if (name == "auger") {
    if (parts.size() != 3)
      throw InvalidInput("recombination: expected auger:<c_n>:<c_p>");
    rec.kind = RecombinationKind::Auger;
    rec.c_n = parse_positive(parts[1], "c_n");
    rec.c_p = parse_positive(parts[2], "c_p");
  } else if (name == "scaled_srh") {
    if (parts.size() != 2)
      throw InvalidInput("recombination: expected scaled_srh:<kappa>");
    rec.kind = RecombinationKind::ScaledSRH;
    rec.kappa = parse_positive(parts[1], "kappa");
  } else {
    throw InvalidInput("recombination: unknown model '" + name + "'");
  }
  return rec;
}

std::string recombination_name(const Recombination& rec) {
  std::ostringstream out;
  switch (rec.kind) {
    case RecombinationKind::None:
      out << "none";
      break;
    case RecombinationKind::ShockleyReadHall:
      out << "srh:" << rec.tau_n << ":" << rec.tau_p << ":" << rec.tau_c;
      break;
    case RecombinationKind::Auger:
      out << "auger:" << rec.c_n << ":" << rec.c_p;
      break;
    case RecombinationKind::ScaledSRH:
      out << "scaled_srh:" << rec.kappa;
      break;
  }
  return out.str();
}

Real recombination_prefactor(const Recombination& rec, Real N, Real P) {
  switch (rec.kind) {
    case RecombinationKind::None:
      return 0.0;
    case RecombinationKind::ShockleyReadHall:
      return 1.0 / (rec.tau_n * N + rec.tau_p * P + rec.tau_c);
    case RecombinationKind::Auger:
      return rec.c_n * N + rec.c_p * P;
    case RecombinationKind::ScaledSRH:
      return rec.kappa / (1.0 + N + P);
  }
  return 0.0;
}

void recombination_prefactor_partials(const Recombination& rec, Real N, Real P,
                                      Real& dN, Real& dP) {
  switch (rec.kind) {
    case RecombinationKind::None:
      dN = dP = 0.0;
      return;
    case RecombinationKind::ShockleyReadHall: {
      const Real den = rec.tau_n * N + rec.tau_p * P + rec.tau_c;
      dN = -rec.tau_n / (den * den);
      dP = -rec.tau_p / (den * den);
      return;
    }
    case RecombinationKind::Auger:
      dN = rec.c_n;
      dP = rec.c_p;
      return;
    case RecombinationKind::ScaledSRH: {
      const Real den = 1.0 + N + P;
      dN = dP = -rec.kappa / (den * den);
      return;
    }
  }
}

Real recombination_rate(const Recombination& rec, const stats::Model& model,
                        Real N, Real P, Real* dN, Real* dP) {
  if (!rec.active()) {
    if (dN) *dN = 0.0;
    if (dP) *dP = 0.0;
    return 0.0;
  }
  const Real r = recombination_prefactor(rec, N, P);
  Real S = stats::h(model, N) + stats::h(model, P);
  if (S > 700.0) S = 700.0;
  const Real e = std::expm1(S);
  if (dN || dP) {
    Real rN = 0.0, rP = 0.0;
    recombination_prefactor_partials(rec, N, P, rN, rP);
    const Real eS = e + 1.0;
    if (dN) *dN = rN * e + r * eS * stats::dh(model, N);
    if (dP) *dP = rP * e + r * eS * stats::dh(model, P);
  }
  return r * e;
}

DofMap make_dof_map(const Mesh& mesh) {
  DofMap map;
  map.face_unknown.assign(static_cast<size_t>(mesh.n_faces()), -1);
  for (int s = 0; s < mesh.n_faces(); ++s) {
    if (is_dirichlet(mesh.face[s].tag)) continue;
    map.face_unknown[static_cast<size_t>(s)] =
        static_cast<int>(map.active_face.size());
    map.active_face.push_back(s);
  }
  return map;
}

Mat2 carrier_tensor(Real b, Real sign) {
  Mat2 lam;
  const Real scale = 1.0 / (1.0 + b * b);
  lam << scale, sign * scale * b, -sign * scale * b, scale;
  return lam;
}

std::function<Mat2(const Vec2&)> electron_tensor(Real b) {
  const Mat2 lam = carrier_tensor(b, 1.0);
  return [lam](const Vec2&) { return lam; };
}

std::function<Mat2(const Vec2&)> hole_tensor(Real b) {
  const Mat2 lam = carrier_tensor(b, -1.0);
  return [lam](const Vec2&) { return lam; };
}

std::function<Mat2(const Vec2&)> potential_tensor(Real lambda) {
  if (!(lambda > 0.0))
    throw InvalidInput("potential tensor: lambda must be positive");
  const Mat2 lam = lambda * lambda * Mat2::Identity();
  return [lam](const Vec2&) { return lam; };
}

ProblemSetup build_setup(const SetupSpec& spec) {
  if (!spec.mesh) throw InvalidInput("build_setup: missing mesh");
  if (!spec.lam_N || !spec.lam_P || !spec.lam_phi)
    throw InvalidInput("build_setup: missing tensor field");
  if (!spec.doping) throw InvalidInput("build_setup: missing doping");
  if (!spec.ND) throw InvalidInput("build_setup: missing boundary density");
  if (!(spec.eta > 0.0))
    throw InvalidInput("build_setup: stabilisation eta must be positive");
  if (spec.rec.active() && spec.alpha_N + spec.alpha_P != 0.0)
    throw InvalidInput(
        "build_setup: recombination requires alpha_N + alpha_P = 0 "
        "(equilibrium-consistent boundary data)");

  ProblemSetup setup;
  setup.mesh = spec.mesh;
  setup.model = spec.model;
  setup.mean = spec.mean;
  setup.eta = spec.eta;
  const Mesh& mesh = *spec.mesh;

  bool has_dirichlet = false;
  for (const Face& f : mesh.face)
    if (is_dirichlet(f.tag)) has_dirichlet = true;
  if (!has_dirichlet)
    throw InvalidInput("build_setup: mesh has no Dirichlet face; boundary "
                       "data cannot be anchored");

  setup.lam_N = sample_tensor(mesh, spec.lam_N);
  setup.lam_P = sample_tensor(mesh, spec.lam_P);
  setup.lam_phi = sample_tensor(mesh, spec.lam_phi);
  setup.op_N = assemble_operator(mesh, setup.lam_N, spec.eta);
  setup.op_P = assemble_operator(mesh, setup.lam_P, spec.eta);
  setup.op_phi = assemble_operator(mesh, setup.lam_phi, spec.eta);

  setup.doping.resize(mesh.n_cells());
  for (int K = 0; K < mesh.n_cells(); ++K)
    setup.doping[K] = cell_average(mesh, K, spec.doping);

  setup.rec = spec.rec;
  setup.alpha_N = spec.alpha_N;
  setup.alpha_P = spec.alpha_P;
  setup.ND = spec.ND;
  setup.dirichlet = interpolate_boundary(mesh, spec.model, spec.ND,
                                         spec.alpha_N, spec.alpha_P);
  setup.dofs = make_dof_map(mesh);
  setup.initial = spec.initial;
  return setup;
}

}  // namespace hfvdd
