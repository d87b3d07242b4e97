#include <doctest.h>

#include <hfvdd/statistics.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace hfvdd;
using stats::Model;

namespace {

// Sample densities spread over the admissible range of a model.
std::vector<Real> density_samples(const Model& m) {
  const Real ub = m.upper_bound();
  std::vector<Real> xs;
  if (std::isfinite(ub)) {
    for (Real f : {1e-6, 1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999})
      xs.push_back(f * ub);
  } else {
    xs = {1e-8, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0};
  }
  return xs;
}

std::vector<Real> potential_samples() {
  return {-30.0, -10.0, -3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 2.5, 6.0, 15.0};
}

}  // namespace

TEST_CASE("boltzmann closed forms") {
  const Model m = stats::boltzmann();
  CHECK(stats::h(m, 1.0) == 0.0);       // log 1
  CHECK(stats::g(m, 0.0) == 1.0);       // e^0
  CHECK(stats::H(m, 1.0) == 0.0);       // integral from 1 to 1
  CHECK(stats::G(m, 0.0) == 1.0);       // integral of e^s up to 0
  CHECK(std::isinf(m.upper_bound()));
  CHECK_FALSE(m.bounded());
}

TEST_CASE("blakemore frozen values") {
  // Reference values from an independent high precision evaluation of the
  // closed forms h(s) = log(s/(1-gamma s)), g = h^{-1}, G(x) = log1p(gamma
  // e^x)/gamma at gamma = 0.27.
  const Model m = stats::blakemore(0.27);
  CHECK(stats::h(m, 1.0) == doctest::Approx(0.31471074483970024).epsilon(1e-14));
  CHECK(stats::g(m, 0.0) == doctest::Approx(0.78740157480314961).epsilon(1e-14));
  CHECK(stats::G(m, 0.0) == doctest::Approx(0.88524777952037002).epsilon(1e-14));
  CHECK(m.upper_bound() == doctest::Approx(1.0 / 0.27).epsilon(1e-15));
  CHECK(m.bounded());
}

TEST_CASE("fermi-dirac half quadrature against polylog references") {
  const Model m = stats::fermi_dirac_half();
  // g(s) = -Li_{3/2}(-e^s); reference values computed with mpmath.
  CHECK(stats::g(m, 0.0) == doctest::Approx(0.76514702462540795).epsilon(1e-9));
  CHECK(stats::g(m, 2.0) == doctest::Approx(2.8237212774015841).epsilon(1e-9));
  // Low density limit: g approaches the Boltzmann exponential within 1%.
  CHECK(stats::g(m, -20.0) ==
        doctest::Approx(std::exp(-20.0)).epsilon(1e-2));
  // Inverse round trip at a quadrature-computed density.
  const Real x = stats::g(m, 2.0);
  CHECK(stats::h(m, x) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("h and g are inverse, increasing, and sign-correct") {
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    const Real tol = m.kind == stats::Kind::FermiDiracHalf ? 1e-8 : 1e-12;
    Real prev = -std::numeric_limits<Real>::infinity();
    for (Real x : density_samples(m)) {
      const Real s = stats::h(m, x);
      CHECK(s > prev);  // strictly increasing
      prev = s;
      CHECK(std::abs(stats::g(m, s) - x) <= tol * std::max(1.0, x));
    }
    for (Real s : potential_samples()) {
      const Real x = stats::g(m, s);
      CHECK(x > 0.0);
      CHECK(x < m.upper_bound());
    }
  }
}

TEST_CASE("h diverges toward the edges of the admissible interval") {
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    const Real ub = m.upper_bound();
    CHECK(stats::h(m, 1e-12) < -20.0);
    if (std::isfinite(ub)) CHECK(stats::h(m, ub * (1.0 - 1e-12)) > 20.0);
    else CHECK(stats::h(m, 1e9) > 18.0);
  }
}

TEST_CASE("domain errors outside (0,a)") {
  const Model bl = stats::blakemore(0.27);
  CHECK_THROWS_AS(stats::h(bl, 0.0), std::domain_error);
  CHECK_THROWS_AS(stats::h(bl, -1.0), std::domain_error);
  CHECK_THROWS_AS(stats::h(bl, 1.0 / 0.27), std::domain_error);
  CHECK_THROWS_AS(stats::H(bl, 4.0), std::domain_error);
  CHECK_THROWS_AS(stats::h(stats::boltzmann(), 0.0), std::domain_error);
}

TEST_CASE("derivatives match finite differences of the primitives") {
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    const Real ub = m.upper_bound();
    for (Real x : density_samples(m)) {
      // Away from the interval edges where H'' blows up and the central
      // difference loses all its digits.
      if (x < 1e-2 || ub - x < 1e-2) continue;
      const Real dx = 1e-6 * std::min(x, std::isfinite(ub) ? ub - x : x);
      const Real fd = (stats::H(m, x + dx) - stats::H(m, x - dx)) / (2 * dx);
      CHECK(std::abs(fd - stats::h(m, x)) <=
            1e-6 * std::max(1.0, std::abs(stats::h(m, x))));
    }
    for (Real s : potential_samples()) {
      const Real ds = 1e-6 * std::max(1.0, std::abs(s));
      const Real fd = (stats::G(m, s + ds) - stats::G(m, s - ds)) / (2 * ds);
      CHECK(std::abs(fd - stats::g(m, s)) <=
            1e-6 * std::max(1.0, stats::g(m, s)));
      const Real fdg = (stats::g(m, s + ds) - stats::g(m, s - ds)) / (2 * ds);
      CHECK(std::abs(fdg - stats::dg(m, s)) <=
            2e-6 * std::max(1.0, stats::dg(m, s)));
    }
  }
}

TEST_CASE("H and G are convex with the expected anchors") {
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    CHECK(std::abs(stats::H(m, 1.0)) <= 1e-12);
    CHECK(stats::G(m, 0.0) > 0.0);
    CHECK(stats::G(m, -40.0) < 1e-12);  // G vanishes at -infinity
    // Midpoint convexity of H on a few triples.
    const auto xs = density_samples(m);
    for (size_t i = 0; i + 2 < xs.size(); ++i) {
      const Real a = xs[i], b = xs[i + 2];
      CHECK(stats::H(m, 0.5 * (a + b)) <=
            0.5 * (stats::H(m, a) + stats::H(m, b)) + 1e-12);
    }
  }
}

TEST_CASE("entropic mean closed form and identities") {
  const Model bo = stats::boltzmann();
  // Logarithmic mean (x-y)/(log x - log y) at (1, e) is e-1.
  CHECK(stats::entropic_mean(bo, 1.0, std::exp(1.0)) ==
        doctest::Approx(1.7182818284590452).epsilon(1e-14));
  CHECK(stats::entropic_mean(bo, 2.0, 2.0) == 2.0);

  // Frozen instance of the G-difference identity for Blakemore at
  // (g(1), g(2)): value G(2) - G(1) from the high precision oracle.
  const Model bl = stats::blakemore(0.27);
  CHECK(stats::entropic_mean(bl, 1.5676943564187246, 2.4670933949173489) ==
        doctest::Approx(2.0243158616862802).epsilon(1e-12));
}

TEST_CASE("m_h identity against the G difference quotient") {
  std::mt19937 rng(2217);
  std::uniform_real_distribution<Real> us(-4.0, 4.0);
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    const Real tol = m.kind == stats::Kind::FermiDiracHalf ? 1e-6 : 1e-10;
    for (int trial = 0; trial < 60; ++trial) {
      const Real sx = us(rng), sy = us(rng);
      if (std::abs(sx - sy) < 1e-3) continue;
      const Real mh = stats::entropic_mean(m, stats::g(m, sx), stats::g(m, sy));
      const Real quotient = (stats::G(m, sx) - stats::G(m, sy)) / (sx - sy);
      CHECK(std::abs(mh - quotient) <= tol * std::abs(mh));
    }
  }
}

TEST_CASE("means are symmetric, ordered, and continuous at the diagonal") {
  // m_h(g(a),g(b)) is the average of g between the two potentials, so the
  // Hermite-Hadamard bound by the arithmetic mean requires g to be convex
  // there.  That holds globally for Boltzmann and Fermi-Dirac, but only up
  // to the inflection density 1/(2 gamma) for the Blakemore sigmoid, hence
  // the sampling window below.
  std::mt19937 rng(40904);
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    const Real hi =
        m.bounded() ? 0.5 / m.gamma : 8.0;  // convex range of g
    std::uniform_real_distribution<Real> ux(0.02 * hi, 0.98 * hi);
    for (int trial = 0; trial < 150; ++trial) {
      const Real x = ux(rng), y = ux(rng);
      const Real mh = stats::entropic_mean(m, x, y);
      CHECK(mh == stats::entropic_mean(m, y, x));
      CHECK(mh <= 0.5 * (x + y) + 1e-12);
      for (stats::MeanKind kind :
           {stats::MeanKind::Arithmetic, stats::MeanKind::Entropic}) {
        const Real v = stats::mean(kind, m, x, y);
        CHECK(v >= mh - 1e-11 * std::max(1.0, mh));
        CHECK(v <= std::max(x, y) + 1e-13);
      }
      // Diagonal continuity: tiny separation stays near the common value.
      CHECK(stats::entropic_mean(m, x, x * (1 + 1e-12)) ==
            doctest::Approx(x).epsilon(1e-10));
    }
  }
}

TEST_CASE("entropic mean stays below the maximum even past the inflection") {
  // Past alpha = 1/(2 gamma) the Blakemore g is concave and the entropic
  // mean overtakes the arithmetic one; it must still sit below max(x,y).
  const Model m = stats::blakemore(0.27);
  const Real x = 3.0, y = 3.5;
  const Real mh = stats::entropic_mean(m, x, y);
  CHECK(mh > 0.5 * (x + y));
  CHECK(mh < y);
  std::mt19937 rng(515151);
  std::uniform_real_distribution<Real> ux(0.1, 0.99 / 0.27);
  for (int trial = 0; trial < 200; ++trial) {
    const Real a = ux(rng), b = ux(rng);
    CHECK(stats::entropic_mean(m, a, b) <= std::max(a, b) + 1e-12);
  }
}

TEST_CASE("mean_apply values and delegation") {
  const Model bo = stats::boltzmann();
  CHECK(stats::mean(stats::MeanKind::Arithmetic, bo, 1.0, 3.0) == 2.0);
  CHECK(stats::mean(stats::MeanKind::Entropic, bo, 1.0, std::exp(1.0)) ==
        stats::entropic_mean(bo, 1.0, std::exp(1.0)));
  // Arithmetic mean dominates the entropic mean at (1, e).
  CHECK(0.5 * (1.0 + std::exp(1.0)) >=
        stats::entropic_mean(bo, 1.0, std::exp(1.0)));
  CHECK_THROWS_AS(stats::mean(stats::MeanKind::Arithmetic, bo, -1.0, 1.0),
                  std::domain_error);
}

TEST_CASE("mean partials match finite differences and the diagonal rule") {
  std::mt19937 rng(777);
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27)}) {
    CAPTURE(m.name());
    const Real ub = std::min(m.upper_bound(), 6.0);
    std::uniform_real_distribution<Real> ux(0.1 * ub, 0.9 * ub);
    for (stats::MeanKind kind :
         {stats::MeanKind::Arithmetic, stats::MeanKind::Entropic}) {
      for (int trial = 0; trial < 40; ++trial) {
        const Real x = ux(rng), y = ux(rng);
        const auto [dx, dy] = stats::mean_partials(kind, m, x, y);
        const Real step = 1e-6 * std::max(1.0, std::abs(x));
        const Real fdx = (stats::mean(kind, m, x + step, y) -
                          stats::mean(kind, m, x - step, y)) /
                         (2 * step);
        const Real fdy = (stats::mean(kind, m, x, y + step) -
                          stats::mean(kind, m, x, y - step)) /
                         (2 * step);
        CHECK(std::abs(dx - fdx) <= 1e-5 * std::max(1.0, std::abs(dx)));
        CHECK(std::abs(dy - fdy) <= 1e-5 * std::max(1.0, std::abs(dy)));
      }
      const auto [dx, dy] = stats::mean_partials(kind, m, 1.3, 1.3);
      CHECK(dx == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(dy == doctest::Approx(0.5).epsilon(1e-9));
    }
  }
}

TEST_CASE("growth ratio g'/g stays bounded over a wide potential window") {
  for (const Model& m : {stats::boltzmann(), stats::blakemore(0.27),
                         stats::fermi_dirac_half()}) {
    CAPTURE(m.name());
    Real worst = 0.0;
    for (Real s = -50.0; s <= 50.0; s += 0.5)
      worst = std::max(worst, stats::dg(m, s) / stats::g(m, s));
    CHECK(worst <= 1.0 + 1e-9);  // all three families satisfy g' <= g
    CHECK(worst > 0.0);
  }
}

TEST_CASE("model parsing") {
  CHECK(stats::parse_model("boltzmann").kind == stats::Kind::Boltzmann);
  const Model bl = stats::parse_model("blakemore:0.27");
  CHECK(bl.kind == stats::Kind::Blakemore);
  CHECK(bl.gamma == doctest::Approx(0.27).epsilon(1e-15));
  CHECK(stats::parse_model("fermi_dirac_half").kind ==
        stats::Kind::FermiDiracHalf);
  CHECK_THROWS_AS(stats::parse_model("blakemore:1.5"), InvalidInput);
  CHECK_THROWS_AS(stats::parse_model("blakemore:-0.1"), InvalidInput);
  CHECK_THROWS_AS(stats::parse_model("blakemore:abc"), InvalidInput);
  CHECK_THROWS_AS(stats::parse_model("maxwell"), InvalidInput);
  CHECK_THROWS_AS(stats::parse_mean("median"), InvalidInput);
  CHECK(stats::parse_mean("arithmetic") == stats::MeanKind::Arithmetic);
  CHECK(stats::parse_mean("entropic") == stats::MeanKind::Entropic);
}
