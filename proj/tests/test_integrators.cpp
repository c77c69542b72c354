#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "expnls/diagnostics.hpp"
#include "expnls/error.hpp"
#include "expnls/integrators.hpp"

using namespace expnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<MethodSpec> kImplicit = {MethodSpec::erk(1), MethodSpec::erk(2), MethodSpec::erk(3),
                                           MethodSpec::lawson(1), MethodSpec::lawson(2), MethodSpec::lawson(3)};

// Random band-limited datum on a small periodic grid.
SpectralField random_field(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  CVector hat(g.size());
  const RVector w = laplacian_symbol(g);
  for (std::size_t p = 0; p < hat.size(); ++p)
    if (-w[p] < 40.0) hat[p] = {d(rng), d(rng)};
  return to_physical(SpectralField(g, std::move(hat), Representation::Spectral));
}

Problem free_problem(const Grid& g, double nu) {
  Problem p;
  p.name = "free";
  p.grid = g;
  p.nu = nu;
  p.nonlinearity = PowerLaw{0.0, 1};
  p.initial = random_field(g, 7);
  return p;
}

// Field constant in space: the Laplacian drops out and every method reduces
// to its underlying Runge-Kutta scheme on ψ' = -i(w(t) + β|ψ|²)ψ.
Problem constant_problem(double beta, bool potential) {
  const Grid g = make_grid_1d(0.0, 1.0, 3);
  Problem p;
  p.name = "constant";
  p.grid = g;
  p.nu = 1.0;
  p.nonlinearity = PowerLaw{beta, 1};
  if (potential) {
    PotentialTerm t;
    t.shape = [](double, double) { return 1.0; };
    t.amplitude = [](double s) { return std::cos(3.0 * s); };
    t.samples.assign(g.size(), 1.0);
    p.potential.push_back(t);
  }
  p.initial = SpectralField::sample(g, [](double, double) { return Complex(0.6, 0.8); });
  // |ψ| = 1 is conserved, so the phase is -β t - sin(3t)/3.
  p.exact = [=](double t, double, double) {
    return Complex(0.6, 0.8) * std::polar(1.0, -beta * t - (potential ? std::sin(3.0 * t) / 3.0 : 0.0));
  };
  return p;
}

double final_error(const Problem& p, const MethodSpec& m, double T, double h) {
  const IntegrationResult r = integrate(p, m, T, h);
  return l2_distance(r.final_state, p.exact_field(T));
}

}  // namespace

TEST_CASE("free evolution is exact for every method") {
  for (int dims : {1, 2}) {
    const Grid g = dims == 1 ? make_grid_1d(-3.0, 5.0, 6) : make_grid_2d({-2.0, 2.0, 4}, {0.0, 3.0, 5});
    const Problem p = free_problem(g, dims == 1 ? 1.0 : 0.5);
    const double T = 0.6;
    CVector ref = p.initial.values();
    const auto fft = FourierTransform::for_grid(g);
    fft->forward(ref);
    const RVector w = laplacian_symbol(g);
    for (std::size_t q = 0; q < ref.size(); ++q) ref[q] *= std::polar(1.0, p.nu * w[q] * T);
    fft->inverse(ref);
    const SpectralField exact(g, ref);
    std::vector<MethodSpec> all = kImplicit;
    for (int o : {1, 2, 4, 6}) all.push_back(MethodSpec::splitting(o));
    for (const auto& m : all) {
      const IntegrationResult r = integrate(p, m, T, 0.1);
      INFO(m.label() << " dims " << dims);
      CHECK(l2_distance(r.final_state, exact) < 1e-13);
    }
  }
}

TEST_CASE("underlying Runge-Kutta order on a scalar ODE") {
  for (bool pot : {false, true}) {
    const Problem p = constant_problem(2.0, pot);
    for (const auto& m : kImplicit) {
      const int order = 2 * m.stages;
      const double e1 = final_error(p, m, 1.0, 0.1), e2 = final_error(p, m, 1.0, 0.05);
      INFO(m.label() << " potential " << pot << " errors " << e1 << " " << e2);
      if (e2 > 1e-13) CHECK_THAT(std::log2(e1 / e2), WithinAbs(order, 0.3));
    }
  }
}

TEST_CASE("soliton convergence orders") {
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, make_grid_1d(-15.0, 15.0, 9));
  for (const auto& m : {MethodSpec::erk(1), MethodSpec::erk(2), MethodSpec::lawson(1), MethodSpec::lawson(2)}) {
    const double e1 = final_error(p, m, 0.5, 0.01), e2 = final_error(p, m, 0.5, 0.005);
    INFO(m.label());
    CHECK_THAT(std::log2(e1 / e2), WithinAbs(2.0 * m.stages, 0.3));
  }
}

TEST_CASE("single-step entry points agree with the steppers") {
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, make_grid_1d(-15.0, 15.0, 8));
  const double h = 0.02, t = 0.3;
  const CollocationNodes nodes = gauss_nodes(2);
  const CoefficientTables erk_t = precompute_tables(p.grid, h, p.nu, nodes, erk_alpha_set(nodes));
  const SpectralField a = erk_step(p.initial, t, h, erk_t, p);
  auto st = make_stepper(p, MethodSpec::erk(2), h);
  CVector v = p.initial.values();
  st->step(v, t);
  CHECK(a.values() == v);
  CHECK(st->last_iterations() > 1);

  const CoefficientTables law_t = precompute_tables(p.grid, h, p.nu, nodes, lawson_alpha_set(nodes), 1, false);
  const SpectralField b = lawson_step(p.initial, t, h, gauss_tableau(2), law_t, p);
  auto sl = make_stepper(p, MethodSpec::lawson(2), h);
  CVector u = p.initial.values();
  sl->step(u, t);
  CHECK(b.values() == u);

  CHECK_THROWS_AS(erk_step(p.initial, t, 2 * h, erk_t, p), InvalidArgument);
  CHECK_THROWS_AS(erk_step(to_spectral(p.initial), t, h, erk_t, p), InvalidArgument);
  CHECK_THROWS_AS(make_erk_stepper(p, std::make_shared<const CoefficientTables>(law_t)), InvalidArgument);
  Problem other = p;
  other.nu = 0.5;
  CHECK_THROWS_AS(make_erk_stepper(other, std::make_shared<const CoefficientTables>(erk_t)), InvalidArgument);
}

TEST_CASE("Gauss-Lawson conserves mass to round-off") {
  const Problem p = abs_sin_1d(8.0, make_grid_1d(-std::numbers::pi, std::numbers::pi, 8));
  const double m0 = l2_norm(p.initial.values(), p.grid);
  for (int s = 1; s <= 3; ++s) {
    const IntegrationResult r = integrate(p, MethodSpec::lawson(s), 0.5, 0.01);
    CHECK_THAT(l2_norm(r.final_state.values(), p.grid), WithinRel(m0, 1e-13));
  }
}

TEST_CASE("Gauss methods are symmetric") {
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, make_grid_1d(-15.0, 15.0, 8));
  const double h = 0.05, t = 0.2;
  for (const auto& m : kImplicit) {
    auto st = make_stepper(p, m, h);
    CVector v = p.initial.values();
    st->step(v, t);
    const SpectralField back = reverse_step(SpectralField(p.grid, v), t + h, h, m, p);
    INFO(m.label());
    CHECK(l2_distance(back, p.initial) < 1e-12);
  }
  // Equispaced collocation is not symmetric.
  const MethodSpec eq = MethodSpec::lawson(3, NodeFamily::Equispaced);
  auto st = make_stepper(p, eq, h);
  CVector v = p.initial.values();
  st->step(v, t);
  CHECK(l2_distance(reverse_step(SpectralField(p.grid, v), t + h, h, eq, p), p.initial) > 1e-8);
}

TEST_CASE("integrate bookkeeping") {
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, make_grid_1d(-15.0, 15.0, 7));
  std::vector<long> steps;
  std::vector<double> times;
  const IntegrationResult r = integrate(p, MethodSpec::erk(1), 0.3, 0.1,
                                        {[&](long n, double t, const SpectralField&) {
                                          steps.push_back(n);
                                          times.push_back(t);
                                        }});
  CHECK(r.steps == 3);
  CHECK(steps == std::vector<long>{0, 1, 2, 3});
  CHECK_THAT(times.back(), WithinAbs(0.3, 1e-15));
  CHECK(r.total_iterations >= 3);
  CHECK(r.max_iterations <= r.total_iterations);

  CHECK(step_count(5.0, 0.01) == 500);
  CHECK(step_count(5.0, 5.0 / 889) == 889);
  CHECK_THROWS_AS(step_count(5.0, std::pow(10.0, -2.25)), InvalidArgument);
  CHECK_THROWS_AS(step_count(1.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(step_count(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(integrate(p, MethodSpec::erk(1), 1.0, 0.3), InvalidArgument);
}

TEST_CASE("fixed-point failures surface as integration errors") {
  const Problem p = abs_sin_1d(8.0, make_grid_1d(-std::numbers::pi, std::numbers::pi, 7));
  BuildOptions strict;
  strict.config.max_iterations = 1;
  try {
    integrate(p, MethodSpec::erk(2), 0.2, 0.1, {}, strict);
    FAIL("expected an IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == 0);
  }
  BuildOptions bad;
  bad.config.tolerance = -1.0;
  CHECK_THROWS_AS(bad.config.validate(), InvalidArgument);
  // A step far too large for the contraction to hold.
  const Problem big = abs_sin_1d(400.0, make_grid_1d(-std::numbers::pi, std::numbers::pi, 7));
  CHECK_THROWS_AS(integrate(big, MethodSpec::lawson(2), 2.0, 1.0), IntegrationError);
}

TEST_CASE("method labels") {
  CHECK(MethodSpec::erk(2).label() == "gauss-erk-2");
  CHECK(MethodSpec::lawson(3, NodeFamily::Equispaced).label() == "equi-lawson-3");
  CHECK(MethodSpec::splitting(4).label() == "splitting-4");
  CHECK(MethodSpec::erk(3).collocation_nodes().c == gauss_nodes(3).c);
  CHECK_THROWS_AS(MethodSpec::splitting(2).collocation_nodes(), InvalidArgument);
}
