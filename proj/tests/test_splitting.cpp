#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "expnls/diagnostics.hpp"
#include "expnls/error.hpp"
#include "expnls/integrators.hpp"

using namespace expnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("scheme coefficients") {
  for (int order : {1, 2, 4, 6}) {
    const SplittingScheme s = splitting_scheme(order);
    CHECK(s.order == order);
    CHECK(s.a.size() == s.b.size() + 1);
    CHECK_THAT(sum(s.a), WithinAbs(1.0, 1e-15));
    CHECK_THAT(sum(s.b), WithinAbs(1.0, 1e-15));
    if (order > 1)
      for (std::size_t i = 0; i < s.a.size(); ++i) CHECK(s.a[i] == s.a[s.a.size() - 1 - i]);
  }
  const SplittingScheme s4 = splitting_scheme(4);
  const double g = 1.0 / (2.0 - std::cbrt(2.0));
  CHECK_THAT(s4.b[0], WithinRel(g, 1e-14));
  CHECK_THAT(s4.b[1], WithinRel(1.0 - 2.0 * g, 1e-14));
  // Third-order condition of the triple jump: Σ b³ = 0.
  double cube = 0.0;
  for (double b : s4.b) cube += b * b * b;
  CHECK_THAT(cube, WithinAbs(0.0, 1e-14));
  CHECK(splitting_scheme(6).b.size() == 10);
  CHECK_THROWS_AS(splitting_scheme(3), InvalidArgument);
}

TEST_CASE("time-dependent potential substep uses the exact integral") {
  const Grid g = make_grid_1d(0.0, 1.0, 3);
  Problem p;
  p.name = "constant";
  p.grid = g;
  p.nu = 1.0;
  p.nonlinearity = PowerLaw{1.5, 1};
  PotentialTerm t;
  t.shape = [](double, double) { return 1.0; };
  t.amplitude = [](double s) { return std::cos(3.0 * s); };
  t.antiderivative = [](double s) { return std::sin(3.0 * s) / 3.0; };
  t.samples.assign(g.size(), 1.0);
  p.potential.push_back(t);
  p.initial = SpectralField::sample(g, [](double, double) { return Complex(1.0, 0.0); });
  const double T = 0.9;
  const Complex ref = std::polar(1.0, -1.5 * T - std::sin(3.0 * T) / 3.0);
  for (int order : {1, 2, 4, 6}) {
    const IntegrationResult r = integrate(p, MethodSpec::splitting(order), T, 0.3);
    for (const auto& v : r.final_state.values()) CHECK(std::abs(v - ref) < 1e-14);
  }
}

TEST_CASE("splitting orders on the soliton") {
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, make_grid_1d(-15.0, 15.0, 9));
  for (int order : {1, 2, 4, 6}) {
    const double h1 = order == 6 ? 0.005 : 0.01;
    auto err = [&](double h) {
      return l2_distance(integrate(p, MethodSpec::splitting(order), 0.4, h).final_state, p.exact_field(0.4));
    };
    const double e1 = err(h1), e2 = err(h1 / 2.0);
    INFO("order " << order << " errors " << e1 << " " << e2);
    CHECK_THAT(std::log2(e1 / e2), WithinAbs(order, 0.35));
  }
}

TEST_CASE("splitting conserves mass and is symmetric for even orders") {
  const Problem p = abs_sin_1d(8.0, make_grid_1d(-std::numbers::pi, std::numbers::pi, 8));
  const double m0 = l2_norm(p.initial.values(), p.grid);
  for (int order : {1, 2, 4, 6}) {
    const IntegrationResult r = integrate(p, MethodSpec::splitting(order), 1.0, 0.01);
    CHECK_THAT(l2_norm(r.final_state.values(), p.grid), WithinRel(m0, 1e-13));
  }
  for (int order : {2, 4, 6}) {
    const double h = 0.01;
    const SpectralField fwd = splitting_step(p.initial, 0.0, h, splitting_scheme(order), p);
    const SpectralField back = reverse_step(fwd, h, h, MethodSpec::splitting(order), p);
    CHECK(l2_distance(back, p.initial) < 1e-13);
  }
  CHECK_THROWS_AS(make_splitting_stepper(p, splitting_scheme(2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_splitting_stepper(p, SplittingScheme{2, {1.0}, {1.0}}, 0.1), InvalidArgument);
}
