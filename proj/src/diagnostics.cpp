#include "expnls/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "expnls/error.hpp"

namespace expnls {

namespace {

double mass_of(const SpectralField& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m += std::norm(v);
  return m * f.grid().cell_volume();
}

void require_physical(const SpectralField& f) {
  if (!f.is_physical()) throw InvalidArgument("diagnostics expect physical fields");
}

}  // namespace

double l2_distance(const SpectralField& u, const SpectralField& v) {
  require_physical(u);
  require_physical(v);
  if (!u.grid().same_shape(v.grid())) throw InvalidArgument("l2_distance: grid mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d += std::norm(u[i] - v[i]);
  return std::sqrt(d * u.grid().cell_volume());
}

double angular_momentum(const SpectralField& field) {
  require_physical(field);
  const Grid& g = field.grid();
  if (g.dims() != 2) throw InvalidArgument("angular momentum needs a 2-D field");
  const SpectralField dx = discrete_gradient(field, 0), dy = discrete_gradient(field, 1);
  const RVector xs = axis_coordinates(g, 0), ys = axis_coordinates(g, 1);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Complex r = Complex(0.0, -1.0) * (xs[i] * dy[i] - ys[i] * dx[i]);
    sum += std::conj(field[i]) * r;
  }
  return sum.real() * g.cell_volume();
}

double discrete_energy(const SpectralField& field, const Problem& problem, double t) {
  require_physical(field);
  const Grid& g = field.grid();
  const double k = g.cell_volume();
  CVector hat = field.values();
  FourierTransform::for_grid(g)->forward(hat);
  const RVector omega = laplacian_symbol(g);
  double kinetic = 0.0;
  for (std::size_t p = 0; p < hat.size(); ++p) kinetic -= omega[p] * std::norm(hat[p]);
  kinetic *= k / static_cast<double>(g.size());

  double rest = 0.0;
  if (problem.has_potential()) {
    RVector w(g.size());
    problem.potential_at(t, w);
    for (std::size_t i = 0; i < w.size(); ++i) rest += w[i] * std::norm(field[i]);
  }
  for (std::size_t i = 0; i < field.size(); ++i)
    rest += nonlinear_energy_density(problem.nonlinearity, std::norm(field[i]));
  rest *= k;
  if (problem.rotating_frame && problem.rotation_speed != 0.0)
    rest += problem.rotation_speed * angular_momentum(field);
  return 0.5 * kinetic + rest / (2.0 * problem.nu);
}

double phase_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                   const Problem& problem) {
  if (!problem.has_exact()) throw InvalidArgument("phase error needs an exact solution");
  if (trajectory.size() != times.size()) throw InvalidArgument("trajectory/time length mismatch");
  double e = 0.0;
  for (std::size_t n = 0; n < trajectory.size(); ++n)
    e = std::max(e, l2_distance(problem.exact_field(times[n]), trajectory[n]));
  return e;
}

double mass_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                  const Problem& problem) {
  if (trajectory.size() != times.size() || trajectory.empty())
    throw InvalidArgument("trajectory/time length mismatch");
  auto ref = [&](std::size_t n) {
    return std::sqrt(problem.has_exact() ? mass_of(problem.exact_field(times[n])) : mass_of(trajectory[0]));
  };
  const double r0 = ref(0);
  double e = 0.0;
  for (std::size_t n = 0; n < trajectory.size(); ++n)
    e = std::max(e, std::abs(ref(n) - std::sqrt(mass_of(trajectory[n]))) / r0);
  return e;
}

double energy_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                    const Problem& problem) {
  if (trajectory.size() != times.size() || trajectory.empty())
    throw InvalidArgument("trajectory/time length mismatch");
  auto ref = [&](std::size_t n) {
    return problem.has_exact() ? discrete_energy(problem.exact_field(times[n]), problem, times[n])
                               : discrete_energy(trajectory[0], problem, times[0]);
  };
  const double r0 = std::abs(ref(0));
  double e = 0.0;
  for (std::size_t n = 0; n < trajectory.size(); ++n)
    e = std::max(e, std::abs(ref(n) - discrete_energy(trajectory[n], problem, times[n])) / r0);
  return e;
}

OrderEstimate order_estimate(std::span<const std::pair<double, double>> data, double lower,
                             double upper) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [h, err] : data)
    if (h > 0.0 && err > lower && err < upper) pts.emplace_back(std::log10(h), std::log10(err));
  if (pts.size() < 3) throw InvalidArgument("order estimate needs at least 3 unsaturated points");
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw InvalidArgument("order estimate needs distinct step sizes");
  OrderEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (est.intercept + est.slope * x);
    rss += r * r;
  }
  est.residual = std::sqrt(rss / n);
  est.points = static_cast<int>(pts.size());
  return est;
}

ErrorReport run_with_diagnostics(const Problem& problem, const MethodSpec& method, double T,
                                 double h, const BuildOptions& options, const TrackOptions& track) {
  ErrorReport rep;
  rep.method = method.label();
  rep.h = h;
  const bool exact = problem.has_exact();
  const bool with_l = track.angular_momentum && problem.grid.dims() == 2;
  double ref_mass0 = 0.0, ref_energy0 = 0.0;
  rep.phase_error = exact ? 0.0 : std::numeric_limits<double>::quiet_NaN();

  Observer obs = [&](long n, double t, const SpectralField& psi) {
    const double m = mass_of(psi);
    rep.times.push_back(t);
    rep.mass.push_back(m);
    double ref_m = 0.0;
    std::optional<SpectralField> ex;
    if (exact) {
      ex = problem.exact_field(t);
      ref_m = mass_of(*ex);
      const double pe = l2_distance(*ex, psi);
      rep.phase.push_back(pe);
      rep.phase_error = std::max(rep.phase_error, pe);
    } else {
      ref_m = n == 0 ? m : ref_mass0;
    }
    if (n == 0) ref_mass0 = ref_m;
    rep.mass_error = std::max(rep.mass_error, std::abs(std::sqrt(ref_m) - std::sqrt(m)) / std::sqrt(ref_mass0));
    if (track.energy) {
      const double e = discrete_energy(psi, problem, t);
      rep.energy.push_back(e);
      const double ref_e = exact ? discrete_energy(*ex, problem, t) : (n == 0 ? e : ref_energy0);
      if (n == 0) ref_energy0 = ref_e;
      rep.energy_error = std::max(rep.energy_error, std::abs(ref_e - e) / std::abs(ref_energy0));
    }
    if (with_l) rep.angular_momentum.push_back(angular_momentum(psi));
    if (track.extra) track.extra(n, t, psi);
  };

  const IntegrationResult res = integrate(problem, method, T, h, {obs}, options);
  rep.steps = res.steps;
  rep.seconds = res.stepping_seconds;
  rep.precompute_seconds = res.precompute_seconds;
  rep.total_iterations = res.total_iterations;
  rep.max_iterations = res.max_iterations;
  return rep;
}

}  // namespace expnls
