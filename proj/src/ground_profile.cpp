#include "expnls/ground_profile.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>

#include "expnls/error.hpp"

namespace expnls {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kStartRadius = 1e-4;

void radial_rhs(const State& y, State& dy, double r) {
  dy[0] = y[1];
  dy[1] = y[0] * y[0] * y[0] * -1.0 + y[0] - y[1] / r;
}

State series_start(double theta0) {
  const double c2 = theta0 * (1.0 - theta0 * theta0) / 4.0;
  return {theta0 + c2 * kStartRadius * kStartRadius, 2.0 * c2 * kStartRadius};
}

auto make_stepper() {
  return odeint::make_controlled(1e-17, 1e-14, odeint::runge_kutta_fehlberg78<State>());
}

enum class Fate { Overshoot, Undershoot, Undecided };

Fate shoot(double theta0, double r_max) {
  auto stepper = make_stepper();
  State y = series_start(theta0);
  double r = kStartRadius, dt = 1e-3;
  while (r < r_max) {
    dt = std::min(dt, r_max - r);
    if (stepper.try_step(radial_rhs, y, r, dt) != odeint::success) continue;
    if (y[0] < 0.0 || std::abs(y[0]) > 10.0) return Fate::Overshoot;
    if (y[1] >= 0.0) return Fate::Undershoot;
  }
  return Fate::Undecided;
}

std::vector<double> trajectory(double theta0, double dr, std::size_t n) {
  std::vector<double> times(n);
  times[0] = kStartRadius;
  for (std::size_t j = 1; j < n; ++j) times[j] = dr * static_cast<double>(j);
  std::vector<double> out(n);
  out[0] = theta0;
  State y = series_start(theta0);
  std::size_t idx = 0;
  odeint::integrate_times(make_stepper(), radial_rhs, y, times.begin(), times.end(), 1e-3,
                          [&](const State& s, double) {
                            if (idx > 0) out[idx] = s[0];
                            ++idx;
                          });
  return out;
}

double k0(double r) { return boost::math::cyl_bessel_k(0, r); }

}  // namespace

GroundProfile::GroundProfile(double dr, std::vector<double> theta) : dr_(dr), theta_(std::move(theta)) {
  if (!(dr > 0.0) || theta_.size() < 8) throw InvalidArgument("ground profile needs >= 8 samples");
  tail_ = theta_.back() / k0(r_max());
}

double GroundProfile::operator()(double r) const {
  r = std::abs(r);
  if (r >= r_max()) return tail_ * k0(r);
  // 6-point Lagrange interpolation on the even extension.
  const long n = static_cast<long>(theta_.size());
  const double u = r / dr_;
  long j0 = static_cast<long>(std::floor(u)) - 2;
  if (j0 + 5 > n - 1) j0 = n - 6;
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    double w = 1.0;
    for (int m = 0; m < 6; ++m)
      if (m != i) w *= (u - static_cast<double>(j0 + m)) / static_cast<double>(i - m);
    sum += w * theta_[static_cast<std::size_t>(std::abs(j0 + i))];
  }
  return sum;
}

void GroundProfile::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t j = 0; j < theta_.size(); ++j)
    out << dr_ * static_cast<double>(j) << ' ' << theta_[j] << '\n';
}

GroundProfile GroundProfile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> r, theta;
  double a, b;
  while (in >> a >> b) {
    r.push_back(a);
    theta.push_back(b);
  }
  if (r.size() < 8) throw std::runtime_error("malformed profile file " + path.string());
  const double dr = r[1] - r[0];
  for (std::size_t j = 0; j < r.size(); ++j)
    if (std::abs(r[j] - dr * static_cast<double>(j)) > 1e-9 * (1.0 + r[j]))
      throw std::runtime_error("profile file is not on a uniform grid: " + path.string());
  return GroundProfile(dr, std::move(theta));
}

ShootingResult ground_profile_2d(double tolerance, double r_max, double dr) {
  if (!(tolerance > 0.0)) throw InvalidArgument("shooting tolerance must be positive");
  if (!(r_max > 1.0) || !(dr > 0.0)) throw InvalidArgument("invalid shooting grid");
  double lo = 1.0, hi = 3.0;
  if (shoot(lo, r_max) != Fate::Undershoot || shoot(hi, r_max) != Fate::Overshoot)
    throw std::runtime_error("bracket-not-found: shooting bracket [1, 3] does not enclose the ground state");

  ShootingResult res;
  while (hi - lo > tolerance * lo) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Fate f = shoot(mid, r_max);
    if (f == Fate::Undecided) {
      lo = hi = mid;
      break;
    }
    (f == Fate::Overshoot ? hi : lo) = mid;
    ++res.iterations;
  }
  if (hi - lo > std::max(tolerance * lo, 4.0 * std::numeric_limits<double>::epsilon() * hi))
    throw std::runtime_error("tolerance-not-reached in shooting bisection");

  const std::size_t n = static_cast<std::size_t>(std::llround(r_max / dr)) + 1;
  const std::vector<double> tlo = trajectory(lo, dr, n), thi = trajectory(hi, dr, n);
  // Trust the shot until the bracketing trajectories separate, then continue
  // with the decaying Bessel solution of the linearized equation.
  std::size_t match = n - 1;
  for (std::size_t j = 1; j < n; ++j) {
    const double mid = 0.5 * (tlo[j] + thi[j]);
    if (std::abs(tlo[j] - thi[j]) > 1e-8 * std::abs(mid) || mid <= 0.0) {
      match = j;
      break;
    }
  }
  match = static_cast<std::size_t>(std::max<long>(8, static_cast<long>(match) - static_cast<long>(2.0 / dr)));
  std::vector<double> theta(n);
  for (std::size_t j = 0; j <= match; ++j) theta[j] = 0.5 * (tlo[j] + thi[j]);
  const double rm = dr * static_cast<double>(match);
  const double c = theta[match] / k0(rm);
  for (std::size_t j = match + 1; j < n; ++j) theta[j] = c * k0(dr * static_cast<double>(j));

  res.theta0 = 0.5 * (lo + hi);
  res.bracket_width = hi - lo;
  res.matching_radius = rm;
  res.profile = GroundProfile(dr, std::move(theta));
  return res;
}

const GroundProfile& default_ground_profile() {
  static GroundProfile profile;
  static std::once_flag once;
  std::call_once(once, [] {
    const char* dir = std::getenv("EXPNLS_CACHE_DIR");
    std::filesystem::path path;
    if (dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / "ground_profile.txt";
      std::error_code ec;
      if (std::filesystem::exists(path, ec)) {
        try {
          profile = GroundProfile::load(path);
          return;
        } catch (const std::exception&) {
        }
      }
    }
    profile = ground_profile_2d().profile;
    if (!path.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      try {
        profile.save(path);
      } catch (const std::exception&) {
      }
    }
  });
  return profile;
}

}  // namespace expnls
