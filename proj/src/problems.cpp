#include "expnls/problems.hpp"

#include <cmath>
#include <numbers>

#include "expnls/error.hpp"
#include "expnls/ground_profile.hpp"

namespace expnls {

namespace {

PotentialTerm make_term(const Grid& grid, std::function<double(double, double)> shape,
                        std::function<double(double)> amplitude,
                        std::function<double(double)> antiderivative) {
  PotentialTerm term{std::move(shape), std::move(amplitude), std::move(antiderivative), {}};
  term.samples.resize(grid.size());
  if (grid.dims() == 1) {
    const Axis& ax = grid.axis(0);
    for (int j = 0; j < ax.modes(); ++j) term.samples[j] = term.shape(ax.node(j), 0.0);
  } else {
    const Axis& ax = grid.axis(0);
    const Axis& ay = grid.axis(1);
    for (int i = 0; i < ax.modes(); ++i)
      for (int j = 0; j < ay.modes(); ++j)
        term.samples[grid.flat_index(i, j)] = term.shape(ax.node(i), ay.node(j));
  }
  return term;
}

// 4-point Gauss–Legendre on [t0, t1].
double gauss4(const std::function<double(double)>& f, double t0, double t1) {
  static const double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                              0.8611363115940526};
  static const double wt[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += wt[i] * f(mid + half * x[i]);
  return sum * half;
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

double nonlinear_rate(const Nonlinearity& n, double rho) {
  if (const auto* p = std::get_if<PowerLaw>(&n)) {
    if (p->kappa == 1) return p->beta * rho;
    return p->beta * std::pow(rho, p->kappa);
  }
  const auto& cq = std::get<CubicQuintic>(n);
  return (cq.g1 + cq.g2 * rho) * rho;
}

double nonlinear_energy_density(const Nonlinearity& n, double rho) {
  if (const auto* p = std::get_if<PowerLaw>(&n))
    return p->beta * std::pow(rho, p->kappa + 1) / (p->kappa + 1);
  const auto& cq = std::get<CubicQuintic>(n);
  return (0.5 * cq.g1 + cq.g2 * rho / 3.0) * rho * rho;
}

double Problem::w(double t, double x, double y) const {
  double v = 0.0;
  for (const auto& term : potential) v += term.amplitude(t) * term.shape(x, y);
  return v;
}

void Problem::potential_at(double t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& term : potential) {
    const double a = term.amplitude(t);
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * term.samples[i];
  }
}

void Problem::potential_integral(double t0, double t1, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& term : potential) {
    const double a = term.antiderivative ? term.antiderivative(t1) - term.antiderivative(t0)
                                         : gauss4(term.amplitude, t0, t1);
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * term.samples[i];
  }
}

SpectralField Problem::exact_field(double t) const {
  if (!exact) throw InvalidArgument("problem '" + name + "' has no exact solution");
  return SpectralField::sample(grid, [&](double x, double y) { return exact(t, x, y); });
}

Problem cubic_soliton_1d(double q, double a, double c, double x0, const Grid& grid) {
  if (grid.dims() != 1) throw InvalidArgument("cubic_soliton_1d needs a 1-D grid");
  if (!(q > 0.0)) throw InvalidArgument("cubic_soliton_1d: q must be positive");
  if (!(a > 0.0)) throw InvalidArgument("cubic_soliton_1d: a must be positive");
  Problem p;
  p.name = "soliton1d";
  p.grid = grid;
  p.nu = 1.0;
  p.nonlinearity = PowerLaw{-q, 1};
  const double amp = std::sqrt(2.0 * a / q), width = std::sqrt(a);
  const double freq = a + c * c / 4.0;
  p.exact = [=](double t, double x, double) {
    const double xi = x - x0 - c * t;
    return amp * sech(width * xi) * std::polar(1.0, c * xi / 2.0 + freq * t);
  };
  p.initial = p.exact_field(0.0);
  return p;
}

Problem cubic_quintic_1d(double g1, double g2, double omega, double ec, double beta0,
                         const Grid& grid) {
  if (grid.dims() != 1) throw InvalidArgument("cubic_quintic_1d needs a 1-D grid");
  if (!(ec < 0.0)) throw InvalidArgument("cubic_quintic_1d: E_c must be negative");
  if (!(g1 < 0.0)) throw InvalidArgument("cubic_quintic_1d: G1 must be negative");
  const double eta = std::sqrt(4.0 * ec / g1);
  const double b = -16.0 * ec * g2 / (3.0 * g1 * g1);
  if (!(1.0 - b > 0.0)) throw InvalidArgument("cubic_quintic_1d: requires 1 - b > 0");

  Problem p;
  p.name = "cubic_quintic1d";
  p.grid = grid;
  p.nu = 1.0;
  p.nonlinearity = CubicQuintic{g1, g2};
  p.potential.push_back(make_term(
      grid, [](double x, double) { return x; },
      [=](double t) { return 0.5 * omega * omega * std::cos(omega * t + beta0); },
      [=](double t) { return 0.5 * omega * std::sin(omega * t + beta0); }));
  const double sq = std::sqrt(1.0 - b), k = 2.0 * std::sqrt(-ec);
  p.exact = [=](double t, double x, double) {
    const double phase = -0.5 * omega * x * std::sin(omega * t + beta0) - omega * omega * t / 8.0 +
                         omega / 16.0 * std::sin(2.0 * omega * t + 2.0 * beta0) - ec * t;
    const double den = std::sqrt(sq * std::cosh(k * (x - std::cos(omega * t + beta0))) + 1.0);
    return eta / den * std::polar(1.0, phase);
  };
  p.initial = p.exact_field(0.0);
  return p;
}

Problem cubic_plane_2d(const Grid& grid) {
  if (grid.dims() != 2) throw InvalidArgument("cubic_plane_2d needs a 2-D grid");
  const GroundProfile& theta = default_ground_profile();
  Problem p;
  p.name = "plane2d";
  p.grid = grid;
  p.nu = 1.0;
  p.nonlinearity = PowerLaw{-1.0, 1};
  p.exact = [&theta](double t, double x, double y) {
    return theta(std::hypot(x, y)) * std::polar(1.0, t);
  };
  p.initial = p.exact_field(0.0);
  return p;
}

Problem abs_sin_1d(double q, const Grid& grid) {
  if (grid.dims() != 1) throw InvalidArgument("abs_sin_1d needs a 1-D grid");
  Problem p;
  p.name = "abs_sin1d";
  p.grid = grid;
  p.nu = 1.0;
  p.nonlinearity = PowerLaw{-q, 1};
  p.initial = SpectralField::sample(grid, [](double x, double) { return Complex(std::abs(std::sin(x))); });
  return p;
}

std::array<double, 4> rotation_matrix(double t, double omega) {
  const double c = std::cos(omega * t), s = std::sin(omega * t);
  return {c, -s, s, c};
}

double cutoff_chi(double x, double delta) {
  if (!(delta > 2.0)) throw InvalidArgument("cutoff_chi: delta must exceed 2");
  const double u = delta / 2.0 - std::abs(x);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / u), g = std::exp(-1.0 / (1.0 - u));
  return f / (f + g);
}

Problem rotating_gpe_2d(const RotatingTrap& trap, double beta, SpectralField initial,
                        const Grid& grid) {
  if (grid.dims() != 2) throw InvalidArgument("rotating_gpe_2d needs a 2-D grid");
  if (!(trap.delta > 2.0)) throw InvalidArgument("rotating_gpe_2d: delta must exceed 2");
  for (const Axis& ax : grid.axes()) {
    const double tol = 1e-12 * trap.delta;
    if (std::abs(ax.period() - trap.delta) > tol || std::abs(ax.left + trap.delta / 2.0) > tol)
      throw InvalidArgument("grid/trap period mismatch: axes must span (-delta/2, delta/2)");
  }
  if (!(initial.grid() == grid) || !initial.is_physical())
    throw InvalidArgument("rotating_gpe_2d: initial datum must be physical on the same grid");

  Problem p;
  p.name = "rotating_bec2d";
  p.grid = grid;
  p.nu = 0.5;
  p.nonlinearity = PowerLaw{beta, 1};
  p.initial = std::move(initial);
  p.rotating_frame = true;
  p.rotation_speed = trap.omega;

  const double d = trap.delta, gx2 = trap.gamma_x * trap.gamma_x, gy2 = trap.gamma_y * trap.gamma_y;
  const double om = trap.omega;
  auto chi2 = [d](double x, double y) { return cutoff_chi(x, d) * cutoff_chi(y, d); };
  // V_c(A(t)x) = cos² A(x) + sin² B(x) + cos·sin C(x).
  auto shape_a = [=](double x, double y) { return 0.5 * chi2(x, y) * (gx2 * x * x + gy2 * y * y); };
  auto shape_b = [=](double x, double y) { return 0.5 * chi2(x, y) * (gy2 * x * x + gx2 * y * y); };
  auto shape_c = [=](double x, double y) { return chi2(x, y) * x * y * (gy2 - gx2); };
  if (om == 0.0) {
    p.potential.push_back(make_term(grid, shape_a, [](double) { return 1.0; }, [](double t) { return t; }));
    return p;
  }
  p.potential.push_back(make_term(
      grid, shape_a, [=](double t) { const double c = std::cos(om * t); return c * c; },
      [=](double t) { return t / 2.0 + std::sin(2.0 * om * t) / (4.0 * om); }));
  p.potential.push_back(make_term(
      grid, shape_b, [=](double t) { const double s = std::sin(om * t); return s * s; },
      [=](double t) { return t / 2.0 - std::sin(2.0 * om * t) / (4.0 * om); }));
  if (gx2 != gy2)
    p.potential.push_back(make_term(
        grid, shape_c, [=](double t) { return std::cos(om * t) * std::sin(om * t); },
        [=](double t) { return -std::cos(2.0 * om * t) / (4.0 * om); }));
  return p;
}

SpectralField thomas_fermi_initial(const RotatingTrap& trap, double beta, const Grid& grid) {
  if (grid.dims() != 2) throw InvalidArgument("thomas_fermi_initial needs a 2-D grid");
  if (!(beta > 0.0)) throw InvalidArgument("thomas_fermi_initial: beta must be positive");
  const RVector xs = axis_coordinates(grid, 0), ys = axis_coordinates(grid, 1);
  RVector vc(grid.size());
  for (std::size_t i = 0; i < vc.size(); ++i) vc[i] = trap.harmonic(xs[i], ys[i]);
  const double k = grid.cell_volume();
  auto mass = [&](double mu) {
    double m = 0.0;
    for (double v : vc)
      if (mu > v) m += (mu - v) / beta;
    return m * k;
  };
  double lo = 0.0, hi = 1.0;
  while (mass(hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e12) throw InvalidArgument("thomas_fermi_initial: chemical potential not bracketed");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < 1.0 ? lo : hi) = mid;
    if (std::abs(mass(hi) - 1.0) < 1e-12) break;
  }
  const double mu = hi;
  const double plateau = trap.delta / 2.0 - 1.0;
  CVector values(grid.size());
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mu <= vc[i]) continue;
    if (std::abs(xs[i]) > plateau || std::abs(ys[i]) > plateau)
      throw InvalidArgument("thomas_fermi_initial: support exceeds the cutoff plateau");
    const double v = std::sqrt((mu - vc[i]) / beta);
    values[i] = v;
    m += v * v;
  }
  const double scale = 1.0 / std::sqrt(m * k);
  for (auto& v : values) v *= scale;
  return SpectralField(grid, std::move(values));
}

}  // namespace expnls
