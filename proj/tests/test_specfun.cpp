#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hml/errors.hpp"
#include "hml/numeric.hpp"
#include "hml/specfun.hpp"

using namespace hml;

// Reference values below were produced with mpmath at 40 digits.

TEST_CASE("airy reference values") {
  struct Ref {
    double x, ai, aip;
  };
  const Ref refs[] = {
      {0.0, 0.3550280538878172392600632, -0.2588194037928067984051836},
      {3.0, 0.006591139357460719144257448, -0.01191297670595131847376323},
      {-3.0, -0.3788142936776580743472439, 0.3145837692165988136507873},
      {-20.0, -0.1764061270779846895901923, 0.8928628567364712383984099},
      {10.0, 1.104753255289868593355021e-10, -3.520633676738923636620645e-10},
      {5.5, 0.00003368531190859981442528973, -0.00008046339130556514337967076},
      {-7.3, 0.3357703705151472769671717, -0.1800958044832936598516171},
  };
  for (const auto& r : refs) {
    const AiryValue a = airy(r.x);
    CHECK(a.ai == doctest::Approx(r.ai).epsilon(1e-12));
    CHECK(a.aip == doctest::Approx(r.aip).epsilon(1e-12));
  }
  CHECK(airy(0.0).ai == doctest::Approx(0.3550280539).epsilon(1e-10));
  CHECK(airy(0.0).ai == doctest::Approx(std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("airy series and asymptotics match at the cutoff") {
  for (double c : {6.0, -6.0}) {
    const AiryValue s = airy_series(c), a = airy_asymptotic(c);
    CHECK(std::fabs(s.ai - a.ai) < 1e-10);
    CHECK(std::fabs(s.aip - a.aip) < 1e-10);
  }
}

TEST_CASE("airy integral over the real line") {
  const auto& x = gl16_nodes();
  const auto& w = gl16_weights();
  auto integral = [&](double T) {
    CompensatedSum s;
    const int panels = static_cast<int>(std::ceil(8.0 * T));
    const double h = 2.0 * T / panels;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < 16; ++i) s += 0.5 * h * w[i] * airy(-T + p * h + 0.5 * h * (x[i] + 1.0)).ai;
    return s.value();
  };
  // The left tail oscillates with amplitude about T^{-3/4}/sqrt(pi), so T = 30
  // is only within 0.05 of the limit.
  CHECK(integral(30.0) == doctest::Approx(1.04104870220762).epsilon(1e-10));
  for (double T : {30.0, 100.0, 300.0, 1000.0})
    CHECK(std::fabs(integral(T) - 1.0) <= 1.1 * std::pow(T, -0.75) / std::sqrt(pi));
  CHECK(std::fabs(integral(1000.0) - 1.0) < 1e-2);
}

TEST_CASE("airy oscillatory asymptotic on the negative axis") {
  for (double X = 10.0; X <= 100.0; X += 0.37) {
    const double zeta = 2.0 / 3.0 * std::pow(X, 1.5);
    const double lead = std::cos(zeta - pi / 4.0);
    const double scaled = airy(-X).ai * std::sqrt(pi) * std::pow(X, 0.25);
    CHECK(std::fabs(scaled - lead) <= std::pow(X, -1.5));
  }
}

TEST_CASE("airy envelope constant") {
  double sup = 0.0, supd = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = -50.0 + i * 5e-4;
    const AiryValue a = airy(x);
    const double q = 1.0 + std::pow(std::fabs(x), 0.25);
    sup = std::max(sup, std::fabs(a.ai) * q);
    supd = std::max(supd, std::fabs(a.aip) / q);
  }
  // Measured constants for Ai(x) << 1/(1+|x|^{1/4}) and Ai'(x) << 1+|x|^{1/4}.
  CHECK(sup == doctest::Approx(1.0808633851).epsilon(1e-6));
  CHECK(sup <= 1.1);
  CHECK(supd <= 0.6);
}

TEST_CASE("oracle trivial values and reference values") {
  CHECK(bessel_j_oracle(0, 0.0) == 1.0);
  CHECK(bessel_j_oracle(11, 0.0) == 0.0);
  struct Ref {
    int n;
    double z, v;
  };
  const Ref refs[] = {
      {11, 15.0, 0.09995047705030159223310711},   {100, 100.0, 0.09636667329586155967431402},
      {100, 200.0, 0.009333214186557586457056994}, {0, 50.0, 0.05581232766925181500475048},
      {1000, 1200.0, 0.003582667437882888371067973}, {400, 1200.0, -0.02127395750886244184515352},
      {199, 150.0, 1.788370500081208542973759e-13}, {30, 5.0, 2.67117727825079881058454e-21},
      {500, 499.5, 0.0531102941688939275001996},   {3, 1e4, -0.003644611999592164381159928},
  };
  for (const auto& r : refs) {
    CHECK(std::fabs(bessel_j_oracle(r.n, r.z) - r.v) <= 1e-16 * std::max(1e-5, std::fabs(r.v)));
    CHECK(std::fabs(bessel_j(r.n, r.z) - r.v) <= 2e-15);
  }
  CHECK(bessel_j(30, 5.0) == doctest::Approx(2.67117727825079881058454e-21).epsilon(1e-13));
  CHECK(bessel_j(199, 150.0) == doctest::Approx(1.788370500081208542973759e-13).epsilon(1e-12));
}

TEST_CASE("oracle routes agree") {
  // series versus quadrature where both apply
  for (int n : {0, 3, 11, 40, 120})
    for (double z : {0.5, 2.0, 7.5, 20.0, 60.0}) {
      if (z * z > 64.0 * (n + 1)) continue;
      CHECK(std::fabs(bessel_j_oracle_series(n, z) - bessel_j_oracle_quadrature(n, z)) < 1e-16);
    }
  // float128 versus 200-bit mpfr
  OracleOptions hi;
  hi.precision_bits = 200;
  for (auto [n, z] : std::vector<std::pair<int, double>>{{7, 33.0}, {60, 61.5}, {150, 400.0}})
    CHECK(std::fabs(bessel_j_oracle_quadrature(n, z) - bessel_j_oracle_quadrature(n, z, hi)) < 1e-17);
}

TEST_CASE("oracle is converged under panel halving") {
  OracleOptions fine;
  fine.panels_per_unit = 2.0;
  for (auto [n, z] : std::vector<std::pair<int, double>>{{11, 15.0}, {100, 250.0}, {300, 290.0}})
    CHECK(bessel_j_oracle_quadrature(n, z) == bessel_j_oracle_quadrature(n, z, fine));
}

TEST_CASE("oracle panel budget") {
  OracleOptions small;
  small.panel_budget = 100;
  CHECK_THROWS_AS(bessel_j_oracle_quadrature(50, 500.0, small), ResourceError);
  CHECK_THROWS_AS(bessel_j_oracle(-1, 1.0), DomainError);
}

TEST_CASE("derivative relation d/dz (z^nu J_nu) = z^nu J_{nu-1}") {
  const int nu = 11;
  const double z = 15.0, h = 1e-2;
  auto F = [&](double t) { return std::pow(t, nu) * bessel_j_oracle(nu, t); };
  const double d = (-F(z + 2 * h) + 8 * F(z + h) - 8 * F(z - h) + F(z - 2 * h)) / (12 * h);
  const double rhs = std::pow(z, nu) * bessel_j_oracle(nu - 1, z);
  CHECK(std::fabs(d - rhs) <= 1e-8 * std::fabs(rhs));
}

TEST_CASE("fast evaluator against the oracle") {
  double worst = 0.0;
  for (int n : {0, 1, 2, 7, 29, 64, 99, 150, 399})
    for (double z = 0.05; z < 3.0 * n + 80.0; z *= 1.11) worst = std::max(worst, std::fabs(bessel_j(n, z) - bessel_j_oracle(n, z)));
  CHECK(worst < 1e-14);
  // libstdc++ as a third route for low orders
  for (int n : {0, 1, 4, 10})
    for (double z : {0.3, 3.0, 17.0, 45.0}) CHECK(std::fabs(bessel_j(n, z) - std::cyl_bessel_j(double(n), z)) < 1e-13);
}

TEST_CASE("uniform asymptotics: stated examples") {
  {
    const BesselEval e = bessel_j_uniform(100, 100);
    CHECK(e.regime == BesselRegime::airy_transition);
    CHECK(std::fabs(e.value - bessel_j_oracle(100, 100)) <= 10.0 * std::pow(100.0, -4.0 / 3.0));
  }
  {
    const double nu = 100, y = 2;
    const double z = nu + y * std::cbrt(nu);
    const double approx = std::cbrt(2.0) / std::cbrt(nu) * airy(-std::pow(2.0, 4.0 / 3.0)).ai;
    CHECK(bessel_transition(nu, y) == doctest::Approx(approx).epsilon(1e-14));
    // z is not an integer; the fast evaluator interpolates the order-100 function exactly.
    CHECK(std::fabs(approx - bessel_j(100, z)) <= (1.0 + std::pow(2.0, 2.25)) / 100.0 * 10.0);
  }
  {
    const BesselEval e = bessel_j_uniform(100, 200);
    CHECK(e.regime == BesselRegime::oscillatory);
    CHECK(std::fabs(e.value - bessel_j_oracle(100, 200)) <= 10.0 * 200.0 * 200.0 * std::pow(200.0 * 200.0 - 1e4, -1.75));
  }
}

TEST_CASE("uniform asymptotics: regime tags and invariants") {
  for (double nu : {30.0, 75.5, 300.0}) {
    const double w = std::pow(nu, 0.6);
    for (double z = 0.0; z < 4 * nu; z += 0.173 * std::sqrt(nu)) {
      const BesselEval e = bessel_j_uniform(nu, z);
      CHECK(std::fabs(e.value) <= 1.0 + e.error_estimate);
      if (e.regime == BesselRegime::airy_transition) CHECK(std::fabs(z - nu) <= w);
      if (e.regime == BesselRegime::oscillatory) CHECK(z >= nu + std::pow(nu, 1.0 / 3.0 + 0.1));
      CHECK(e.error_estimate >= 0.0);
    }
  }
  CHECK(bessel_j_uniform(12, 3.0).regime == BesselRegime::quadrature_oracle);
  CHECK_THROWS_AS(bessel_j_uniform(12.5, 3.0), DomainError);
  CHECK(regime_name(BesselRegime::airy_transition) == "airy-transition");
}

TEST_CASE("uniform asymptotics: overlapping formulas agree") {
  for (double nu : {50.0, 200.0, 1000.0}) {
    const double lo = nu + std::pow(nu, 1.0 / 3.0 + 0.1), hi = nu + std::pow(nu, 0.6);
    for (double z = lo; z <= hi; z += (hi - lo) / 37.0)
      CHECK(std::fabs(bessel_langer(nu, z) - bessel_oscillatory(nu, z)) <=
            langer_error(nu) + oscillatory_error(nu, z));
    const double ymax = std::pow(nu, 4.0 / 15.0);
    for (double y = -ymax; y <= ymax; y += ymax / 20.0) {
      const double z = nu + y * std::cbrt(nu);
      CHECK(std::fabs(bessel_langer(nu, z) - bessel_transition(nu, y)) <= langer_error(nu) + transition_error(nu, y));
    }
  }
}

TEST_CASE("phase function") {
  const PhasePoint p = phase(100, 200);
  CHECK(p.omega1 == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(phase(100, 100 + 1e-9).omega == doctest::Approx(-pi / 4.0).epsilon(1e-12));
  for (double nu : {30.0, 100.0, 1e4})
    for (double r : {1.0001, 1.01, 1.3, 2.0, 10.0}) {
      const double z = nu * r;
      const PhasePoint q = phase(nu, z);
      CHECK(q.omega1 > 0.0);
      CHECK(q.omega1 < 1.0);
      CHECK(q.omega1 == doctest::Approx(std::sqrt(z * z - nu * nu) / z).epsilon(1e-12));
      CHECK(q.omega2 == doctest::Approx(nu * nu / (z * z * std::sqrt(z * z - nu * nu))).epsilon(1e-12));
      const double h = 1e-3 * (z - nu);
      const double fd = (phase(nu, z + h).omega - phase(nu, z - h).omega) / (2 * h);
      CHECK(fd == doctest::Approx(q.omega1).epsilon(1e-6));
    }
  CHECK_THROWS_AS(phase(100, 100), DomainError);
}

TEST_CASE("bound suite: stated examples") {
  {
    const BoundSuiteResult r = bound_suite(200, 40.0);
    CHECK(r.small_argument.applies);
    CHECK(r.small_argument.pass);
  }
  {
    const double nu = 200, z = 150;
    CHECK(z <= (nu + 1) - std::pow(nu + 1, 1.0 / 3.0 + 0.3));
    CHECK(std::fabs(bessel_j_oracle(200, z)) <= 10.0 * std::exp(-std::pow(nu, 0.3)));
    CHECK(bound_suite(200, z).below_transition.pass);
  }
  for (double z = 0.0; z < 800.0; z += 3.1) CHECK(bound_suite(200, z).uniform.pass);
}

TEST_CASE("bound suite: randomized samples") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> nud(50, 1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const int nu = nud(rng);
    const double z = 2.0 * nu * u(rng);
    CHECK(bound_suite(nu, z).all_pass());
  }
}

TEST_CASE("mellin transform of J_11 at s = 1/2") {
  const int nu = 11;
  const auto& x = gl16_nodes();
  const auto& w = gl16_weights();
  auto f = [&](double t) { return std::pow(t, -0.5) * bessel_j(nu, t); };
  // Partial integrals up to successive half periods, then repeated averaging.
  const double h = pi;
  CompensatedSum acc;
  std::vector<double> partial;
  double a = 0.0;
  const int segments = 400;
  for (int s = 0; s < segments; ++s) {
    const double b = a + h;
    for (int i = 0; i < 16; ++i) acc += 0.5 * h * w[i] * f(a + 0.5 * h * (x[i] + 1.0));
    a = b;
    if (s >= segments - 24) partial.push_back(acc.value());
  }
  for (int level = 0; level < 20; ++level) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < partial.size(); ++i) next.push_back(0.5 * (partial[i] + partial[i + 1]));
    partial = next;
  }
  const double exact = std::pow(2.0, -0.5) * std::tgamma(5.75) / std::tgamma(6.25);
  CHECK(exact == doctest::Approx(0.3013564364241331041660283).epsilon(1e-14));
  CHECK(std::fabs(partial.back() - exact) < 1e-6);
}
