#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "expnls/error.hpp"
#include "expnls/ground_profile.hpp"

using namespace expnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ShootingResult& reference() {
  static const ShootingResult r = ground_profile_2d();
  return r;
}

}  // namespace

TEST_CASE("shooting converges to the Townes profile") {
  const ShootingResult& r = reference();
  // Central amplitude and critical mass of the 2-D ground state.
  CHECK_THAT(r.theta0, WithinAbs(2.20620086465, 1e-10));
  CHECK(r.bracket_width <= 1e-15 * r.theta0 + 1e-15);
  CHECK(r.matching_radius > 5.0);
  const GroundProfile& p = r.profile;
  using boost::math::quadrature::gauss_kronrod;
  const double mass = 2.0 * std::numbers::pi *
                      gauss_kronrod<double, 61>::integrate([&](double s) { return p(s) * p(s) * s; }, 0.0, 30.0, 20, 1e-14);
  CHECK_THAT(mass, WithinRel(11.70089652, 1e-8));
}

TEST_CASE("profile satisfies the radial equation") {
  const GroundProfile& p = reference().profile;
  const double e = 1e-2;
  for (double r : {0.5, 1.0, 2.0, 3.5, 6.0, 9.0}) {
    const double d2 = (-p(r + 2 * e) + 16 * p(r + e) - 30 * p(r) + 16 * p(r - e) - p(r - 2 * e)) / (12 * e * e);
    const double d1 = (-p(r + 2 * e) + 8 * p(r + e) - 8 * p(r - e) + p(r - 2 * e)) / (12 * e);
    const double res = d2 + d1 / r + p(r) * p(r) * p(r) - p(r);
    CHECK(std::abs(res) < 1e-6);
  }
  // Even in r and positive, decaying like K₀.
  CHECK(p(-1.3) == p(1.3));
  CHECK(p(25.0) > 0.0);
  CHECK_THAT(p(25.0) / p(24.0), WithinRel(boost::math::cyl_bessel_k(0, 25.0) / boost::math::cyl_bessel_k(0, 24.0), 1e-12));
  for (double r = 0.0; r < 19.9; r += 0.1) CHECK(p(r + 0.1) < p(r));
}

TEST_CASE("profile is reproducible across discretizations") {
  const GroundProfile& p = reference().profile;
  const ShootingResult fine = ground_profile_2d(1e-15, 24.0, 0.005);
  CHECK_THAT(fine.theta0, WithinAbs(reference().theta0, 1e-12));
  double worst = 0.0;
  for (double r = 0.0; r <= 20.0; r += 0.037) worst = std::max(worst, std::abs(fine.profile(r) - p(r)));
  CHECK(worst < 1e-8);
}

TEST_CASE("save and load round trip") {
  const GroundProfile& p = reference().profile;
  const auto path = std::filesystem::temp_directory_path() / "expnls_test_profile.txt";
  p.save(path);
  const GroundProfile q = GroundProfile::load(path);
  CHECK(q.samples() == p.samples());
  CHECK(q.spacing() == p.spacing());
  std::filesystem::remove(path);
  CHECK_THROWS(GroundProfile::load(path));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(ground_profile_2d(0.0), InvalidArgument);
  CHECK_THROWS_AS(ground_profile_2d(1e-12, 0.5), InvalidArgument);
  CHECK_THROWS_AS(GroundProfile(0.1, std::vector<double>(3, 1.0)), InvalidArgument);
}
