#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "expnls/diagnostics.hpp"
#include "expnls/error.hpp"

using namespace expnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("soliton energy matches the closed form") {
  const double q = 8.0, a = 4.0, c = 0.5;
  const Problem p = cubic_soliton_1d(q, a, c, 0.0, make_grid_1d(-15.0, 15.0, 10));
  // ∫sech² = 2/√a, ∫sech²tanh² = 2/(3√a), ∫sech⁴ = 4/(3√a).
  const double amp2 = 2.0 * a / q, ra = std::sqrt(a);
  const double grad = amp2 * (a * 2.0 / (3.0 * ra) + c * c / 4.0 * 2.0 / ra);
  const double quart = amp2 * amp2 * 4.0 / (3.0 * ra);
  const double ref = 0.5 * grad - q / 4.0 * quart;
  CHECK_THAT(discrete_energy(p.initial, p, 0.0), WithinRel(ref, 1e-12));
  CHECK_THAT(discrete_energy(p.exact_field(3.0), p, 3.0), WithinRel(ref, 1e-12));
}

TEST_CASE("potential energy term") {
  const Grid g = make_grid_1d(-32.0, 32.0, 11);
  const Problem p = cubic_quintic_1d(-2.0, 0.5, 2.0, -1.0, 0.0, g);
  Problem free = p;
  free.potential.clear();
  const double t = 0.8;
  const SpectralField f = p.exact_field(t);
  double wm = 0.0;
  for (int j = 0; j < g.axis(0).modes(); ++j) wm += p.w(t, g.axis(0).node(j)) * std::norm(f[j]);
  wm *= g.cell_volume();
  CHECK_THAT(discrete_energy(f, p, t) - discrete_energy(f, free, t), WithinAbs(wm / 2.0, 1e-12));
}

TEST_CASE("angular momentum of a vortex equals its mass") {
  const Grid g = make_grid_2d({-10.0, 10.0, 7}, {-10.0, 10.0, 7});
  const auto vortex = SpectralField::sample(g, [](double x, double y) {
    return Complex(x, y) * std::exp(-(x * x + y * y) / 2.0);
  });
  const double mass = std::pow(l2_norm(vortex.values(), g), 2);
  CHECK_THAT(angular_momentum(vortex), WithinRel(mass, 1e-12));
  const auto anti = SpectralField::sample(g, [](double x, double y) {
    return Complex(x, -y) * std::exp(-(x * x + y * y) / 2.0);
  });
  CHECK_THAT(angular_momentum(anti), WithinRel(-mass, 1e-12));
  CHECK_THROWS_AS(angular_momentum(SpectralField(make_grid_1d(0, 1, 3))), InvalidArgument);

  SECTION("rotating-frame energy carries the rotation term") {
    const RotatingTrap trap{1.0, 1.0, 0.7, 20.0};
    Problem p = rotating_gpe_2d(trap, 10.0, vortex, g);
    const double e_rot = discrete_energy(vortex, p, 0.3);
    p.rotating_frame = false;
    const double e_lab = discrete_energy(vortex, p, 0.3);
    CHECK_THAT(e_rot - e_lab, WithinAbs(0.7 * mass / (2.0 * p.nu), 1e-12));
  }
}

TEST_CASE("error functionals on synthetic trajectories") {
  const Grid g = make_grid_1d(-15.0, 15.0, 8);
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, g);
  std::vector<SpectralField> traj;
  std::vector<double> times{0.0, 0.5, 1.0};
  for (double t : times) traj.push_back(p.exact_field(t));
  CHECK(phase_error(traj, times, p) == 0.0);
  CHECK(mass_error(traj, times, p) == 0.0);
  CHECK(energy_error(traj, times, p) == 0.0);

  for (auto& v : traj[1].values()) v *= 1.001;
  const double norm = l2_norm(p.initial.values(), g);
  CHECK_THAT(phase_error(traj, times, p), WithinRel(0.001 * norm, 1e-10));
  CHECK_THAT(mass_error(traj, times, p), WithinRel(0.001, 1e-10));
  CHECK(energy_error(traj, times, p) > 0.0);
  CHECK_THAT(l2_distance(traj[1], p.exact_field(0.5)), WithinRel(0.001 * norm, 1e-10));
  CHECK_THROWS_AS(phase_error(traj, std::vector<double>{0.0}, p), InvalidArgument);

  const Problem nox = abs_sin_1d(8.0, make_grid_1d(-std::numbers::pi, std::numbers::pi, 6));
  CHECK_THROWS_AS(phase_error(std::vector<SpectralField>{nox.initial}, std::vector<double>{0.0}, nox), InvalidArgument);
  SpectralField scaled = nox.initial;
  for (auto& v : scaled.values()) v *= 0.5;
  const std::vector<SpectralField> pair{nox.initial, scaled};
  CHECK_THAT(mass_error(pair, std::vector<double>{0.0, 1.0}, nox), WithinRel(0.5, 1e-14));
}

TEST_CASE("order estimate") {
  std::vector<std::pair<double, double>> data;
  for (int i = 0; i < 9; ++i) {
    const double h = std::pow(10.0, -1.0 - 0.25 * i);
    data.emplace_back(h, 3.0 * std::pow(h, 4));
  }
  const OrderEstimate e = order_estimate(data);
  CHECK_THAT(e.slope, WithinAbs(4.0, 1e-12));
  CHECK_THAT(e.intercept, WithinAbs(std::log10(3.0), 1e-11));
  CHECK(e.residual < 1e-12);
  // 3e-4 .. 3e-10 lie in the window; h^4 with h = 1e-3 gives 3e-12, excluded.
  CHECK(e.points == 7);
  data.emplace_back(1e-4, 1e-3);
  CHECK(order_estimate(data).residual > 0.0);
  const std::vector<std::pair<double, double>> few{{0.1, 1e-3}, {0.01, 1e-5}, {0.001, 1e-13}};
  CHECK_THROWS_AS(order_estimate(few), InvalidArgument);
}

TEST_CASE("run_with_diagnostics agrees with the offline functionals") {
  const Grid g = make_grid_1d(-15.0, 15.0, 8);
  const Problem p = cubic_soliton_1d(8.0, 4.0, 0.5, 0.0, g);
  std::vector<SpectralField> traj;
  std::vector<double> times;
  TrackOptions track;
  track.extra = [&](long, double t, const SpectralField& psi) {
    traj.push_back(psi);
    times.push_back(t);
  };
  const ErrorReport r = run_with_diagnostics(p, MethodSpec::erk(2), 0.5, 0.05, {}, track);
  CHECK(r.steps == 10);
  CHECK(r.times.size() == 11);
  CHECK(r.method == "gauss-erk-2");
  CHECK(r.phase_error == phase_error(traj, times, p));
  CHECK_THAT(r.mass_error, WithinAbs(mass_error(traj, times, p), 1e-16));
  CHECK_THAT(r.energy_error, WithinAbs(energy_error(traj, times, p), 1e-16));
  CHECK(r.phase.size() == 11);
  CHECK(r.angular_momentum.empty());
}
