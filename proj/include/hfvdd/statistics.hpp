// Carrier statistics: the nonlinearity g, its inverse h, the primitives
// H(x) = int_1^x h and G(s) = int_{-inf}^s g, and the entropic mean built
// from them.  Three models: Boltzmann (g = exp), Blakemore, Fermi-Dirac 1/2.
#pragma once

#include <hfvdd/types.hpp>

#include <limits>
#include <string>

namespace hfvdd::stats {

enum class Kind { Boltzmann, Blakemore, FermiDiracHalf };

struct Model {
  Kind kind = Kind::Boltzmann;
  Real gamma = 0.27;  // Blakemore only

  // Fermi-Dirac integrals: composite 10-point Gauss-Legendre on the half
  // line after the substitution z = u^2, panels of this width in u.
  Real fd_panel_width = 0.05;
  // Relative tolerance of the inversion h = g^{-1}.
  Real fd_inverse_tol = 1e-13;

  // Upper end of the admissible density interval (0, a).
  Real upper_bound() const {
    return kind == Kind::Blakemore ? 1.0 / gamma
                                   : std::numeric_limits<Real>::infinity();
  }
  bool bounded() const { return kind == Kind::Blakemore; }
  std::string name() const;
};

Model boltzmann();
Model blakemore(Real gamma = 0.27);
Model fermi_dirac_half();

// Config-string form: "boltzmann" | "blakemore:<gamma>" | "fermi_dirac_half".
Model parse_model(const std::string& text);

// g: R -> (0,a), increasing.
Real g(const Model& m, Real s);
// dg/ds, positive.
Real dg(const Model& m, Real s);
// h = g^{-1}: (0,a) -> R.  Throws std::domain_error outside (0,a).
Real h(const Model& m, Real x);
// dh/dx = 1 / dg(h(x)).
Real dh(const Model& m, Real x);
// H(x) = int_1^x h(s) ds, convex, H(1) = 0.
Real H(const Model& m, Real x);
// G(s) = int_{-inf}^s g(t) dt, positive, increasing.
Real G(const Model& m, Real s);

// Entropic mean m_h(x,y) = ([x h(x) - H(x)] - [y h(y) - H(y)]) / (h(x) - h(y)),
// continuously extended by m_h(x,x) = x.  Switches to the midpoint (x+y)/2
// when |h(x)-h(y)| < 1e-8 (1 + |h(x)|).
Real entropic_mean(const Model& m, Real x, Real y);

// Partial derivatives (d/dx, d/dy) of the entropic mean; (1/2, 1/2) on the
// near-diagonal branch.
std::pair<Real, Real> entropic_mean_partials(const Model& m, Real x, Real y);

enum class MeanKind { Arithmetic, Entropic };

MeanKind parse_mean(const std::string& text);
std::string mean_name(MeanKind kind);

Real mean(MeanKind kind, const Model& m, Real x, Real y);
std::pair<Real, Real> mean_partials(MeanKind kind, const Model& m, Real x, Real y);

}  // namespace hfvdd::stats
