#include <hfvdd/statistics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hfvdd::stats {
namespace {

constexpr Real kPi = 3.14159265358979323846;
// Gamma(5/2), normalisation of the order-3/2 Fermi-Dirac integral.
constexpr Real kGamma52 = 1.32934038817913702047;

// 10-point Gauss-Legendre rule on [-1,1].
constexpr int kGL = 10;
constexpr Real kGLx[kGL] = {
    -0.97390652851717172008, -0.86506336668898451073, -0.67940956829902440623,
    -0.43339539412924719080, -0.14887433898163121088, 0.14887433898163121088,
    0.43339539412924719080,  0.67940956829902440623,  0.86506336668898451073,
    0.97390652851717172008};
constexpr Real kGLw[kGL] = {
    0.06667134430868813759, 0.14945134915058059315, 0.21908636251598204400,
    0.26926671930999635509, 0.29552422471475287017, 0.29552422471475287017,
    0.26926671930999635509, 0.21908636251598204400, 0.14945134915058059315,
    0.06667134430868813759};

Real logistic(Real t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  Real e = std::exp(t);
  return e / (1.0 + e);
}

// logistic(t) * logistic(-t), evaluated without overflow.
Real logistic_bump(Real t) {
  Real a = std::abs(t);
  Real e = std::exp(-a);
  Real d = 1.0 + e;
  return e / (d * d);
}

// Composite Gauss-Legendre integral of f over [0, b] with panels of width
// at most `width`.
template <class F>
Real integrate(F&& f, Real b, Real width) {
  int panels = std::max(1, static_cast<int>(std::ceil(b / width)));
  Real hw = b / panels;
  Real sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    Real c = (p + 0.5) * hw;
    Real panel = 0.0;
    for (int q = 0; q < kGL; ++q) {
      Real u = c + 0.5 * hw * kGLx[q];
      panel += kGLw[q] * f(u);
    }
    sum += 0.5 * hw * panel;
  }
  return sum;
}

// After z = u^2 the Fermi-Dirac integrands are smooth on [0, umax].
Real fd_umax(Real s) { return std::sqrt(std::max(s, 0.0) + 45.0); }

Real fd_g(const Model& m, Real s) {
  auto f = [s](Real u) { return u * u * logistic(s - u * u); };
  return 4.0 / std::sqrt(kPi) *
         integrate(f, fd_umax(s), m.fd_panel_width);
}

Real fd_dg(const Model& m, Real s) {
  auto f = [s](Real u) { return u * u * logistic_bump(u * u - s); };
  return 4.0 / std::sqrt(kPi) *
         integrate(f, fd_umax(s), m.fd_panel_width);
}

Real fd_G(const Model& m, Real s) {
  auto f = [s](Real u) {
    Real u2 = u * u;
    return u2 * u2 * logistic(s - u2);
  };
  return 2.0 / kGamma52 *
         integrate(f, fd_umax(s), m.fd_panel_width);
}

// Inverse of fd_g by safeguarded Newton on a monotone bracket.
Real fd_h(const Model& m, Real x) {
  Real lo = std::log(x);  // g(s) < e^s
  Real hi = std::max(lo + 2.0,
                     1.5 * std::pow(0.75 * std::sqrt(kPi) * x, 2.0 / 3.0) + 2.0);
  while (fd_g(m, hi) < x) {
    lo = hi;
    hi = 2.0 * hi + 1.0;
  }
  Real s = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    Real gs = fd_g(m, s);
    Real r = gs - x;
    if (std::abs(r) <= m.fd_inverse_tol * std::max(1.0, x)) return s;
    if (r > 0.0)
      hi = s;
    else
      lo = s;
    Real step = r / fd_dg(m, s);
    Real next = s - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * (1.0 + std::abs(s))) return next;
    s = next;
  }
  return s;
}

void check_density(const Model& m, Real x) {
  if (!(x > 0.0) || !(x < m.upper_bound()))
    throw std::domain_error("statistics: density " + std::to_string(x) +
                            " outside (0," + std::to_string(m.upper_bound()) +
                            ")");
}

}  // namespace

std::string Model::name() const {
  switch (kind) {
    case Kind::Boltzmann:
      return "boltzmann";
    case Kind::Blakemore: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "blakemore:%.17g", gamma);
      return buf;
    }
    case Kind::FermiDiracHalf:
      return "fermi_dirac_half";
  }
  return "?";
}

Model boltzmann() { return Model{Kind::Boltzmann}; }

Model blakemore(Real gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw InvalidInput("blakemore: gamma must lie in (0,1), got " +
                       std::to_string(gamma));
  Model m;
  m.kind = Kind::Blakemore;
  m.gamma = gamma;
  return m;
}

Model fermi_dirac_half() { return Model{Kind::FermiDiracHalf}; }

Model parse_model(const std::string& text) {
  if (text == "boltzmann") return boltzmann();
  if (text == "fermi_dirac_half") return fermi_dirac_half();
  if (text.rfind("blakemore:", 0) == 0) {
    std::string arg = text.substr(10);
    size_t used = 0;
    Real gamma;
    try {
      gamma = std::stod(arg, &used);
    } catch (const std::exception&) {
      throw InvalidInput("statistics: cannot parse gamma in '" + text + "'");
    }
    if (used != arg.size())
      throw InvalidInput("statistics: trailing characters in '" + text + "'");
    return blakemore(gamma);
  }
  throw InvalidInput(
      "statistics: unknown model '" + text +
      "' (expected boltzmann | blakemore:<gamma> | fermi_dirac_half)");
}

Real g(const Model& m, Real s) {
  switch (m.kind) {
    case Kind::Boltzmann:
      return std::exp(s);
    case Kind::Blakemore:
      if (s >= 0.0) return 1.0 / (m.gamma + std::exp(-s));
      {
        Real e = std::exp(s);
        return e / (1.0 + m.gamma * e);
      }
    case Kind::FermiDiracHalf:
      return fd_g(m, s);
  }
  return 0.0;
}

Real dg(const Model& m, Real s) {
  switch (m.kind) {
    case Kind::Boltzmann:
      return std::exp(s);
    case Kind::Blakemore: {
      Real gs = g(m, s);
      return gs * (1.0 - m.gamma * gs);
    }
    case Kind::FermiDiracHalf:
      return fd_dg(m, s);
  }
  return 0.0;
}

Real h(const Model& m, Real x) {
  check_density(m, x);
  switch (m.kind) {
    case Kind::Boltzmann:
      return std::log(x);
    case Kind::Blakemore:
      return std::log(x) - std::log1p(-m.gamma * x);
    case Kind::FermiDiracHalf:
      return fd_h(m, x);
  }
  return 0.0;
}

Real dh(const Model& m, Real x) {
  check_density(m, x);
  switch (m.kind) {
    case Kind::Boltzmann:
      return 1.0 / x;
    case Kind::Blakemore:
      return 1.0 / (x * (1.0 - m.gamma * x));
    case Kind::FermiDiracHalf:
      return 1.0 / fd_dg(m, fd_h(m, x));
  }
  return 0.0;
}

Real H(const Model& m, Real x) {
  check_density(m, x);
  switch (m.kind) {
    case Kind::Boltzmann:
      return x * std::log(x) - x + 1.0;
    case Kind::Blakemore: {
      Real ga = m.gamma;
      return x * std::log(x) + (1.0 - ga * x) / ga * std::log1p(-ga * x) -
             (1.0 - ga) / ga * std::log1p(-ga);
    }
    case Kind::FermiDiracHalf: {
      // H(x) = x h(x) - G(h(x)) + c with c fixed by H(1) = 0.
      Real hx = fd_h(m, x);
      Real h1 = fd_h(m, 1.0);
      return x * hx - fd_G(m, hx) - (h1 - fd_G(m, h1));
    }
  }
  return 0.0;
}

Real G(const Model& m, Real s) {
  switch (m.kind) {
    case Kind::Boltzmann:
      return std::exp(s);
    case Kind::Blakemore:
      if (s > 30.0) return (s + std::log(m.gamma + std::exp(-s))) / m.gamma;
      return std::log1p(m.gamma * std::exp(s)) / m.gamma;
    case Kind::FermiDiracHalf:
      return fd_G(m, s);
  }
  return 0.0;
}

Real entropic_mean(const Model& m, Real x, Real y) {
  Real hx = h(m, x), hy = h(m, y);
  if (std::abs(hx - hy) < 1e-8 * (1.0 + std::abs(hx))) return 0.5 * (x + y);
  if (m.kind == Kind::FermiDiracHalf)
    return (G(m, hx) - G(m, hy)) / (hx - hy);
  return ((x * hx - H(m, x)) - (y * hy - H(m, y))) / (hx - hy);
}

std::pair<Real, Real> entropic_mean_partials(const Model& m, Real x, Real y) {
  Real hx = h(m, x), hy = h(m, y);
  if (std::abs(hx - hy) < 1e-8 * (1.0 + std::abs(hx))) return {0.5, 0.5};
  Real mh = entropic_mean(m, x, y);
  Real d = hx - hy;
  return {dh(m, x) * (x - mh) / d, dh(m, y) * (mh - y) / d};
}

MeanKind parse_mean(const std::string& text) {
  if (text == "arithmetic") return MeanKind::Arithmetic;
  if (text == "entropic") return MeanKind::Entropic;
  throw InvalidInput("mean: unknown kind '" + text +
                     "' (expected arithmetic | entropic)");
}

std::string mean_name(MeanKind kind) {
  return kind == MeanKind::Arithmetic ? "arithmetic" : "entropic";
}

Real mean(MeanKind kind, const Model& m, Real x, Real y) {
  check_density(m, x);
  check_density(m, y);
  if (kind == MeanKind::Arithmetic) return 0.5 * (x + y);
  return entropic_mean(m, x, y);
}

std::pair<Real, Real> mean_partials(MeanKind kind, const Model& m, Real x,
                                    Real y) {
  check_density(m, x);
  check_density(m, y);
  if (kind == MeanKind::Arithmetic) return {0.5, 0.5};
  return entropic_mean_partials(m, x, y);
}

}  // namespace hfvdd::stats
