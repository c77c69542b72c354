#include "expnls/coefficients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <thread>

#include "expnls/error.hpp"

namespace expnls {

namespace {

constexpr int kMaxPhiOrder = 12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<long double, long double> legendre(int n, long double x) {
  long double p0 = 1.0L, p1 = x;
  if (n == 0) return {1.0L, 0.0L};
  for (int k = 2; k <= n; ++k) {
    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
  return {p1, dp};
}

// φ_0..φ_kMaxPhiOrder on the trapezoidal contour points, computed once.
struct ContourTable {
  std::array<Complex, kContourPoints> points;
  std::array<std::array<Complex, kMaxPhiOrder + 1>, kContourPoints> phis;

  ContourTable() {
    using LC = std::complex<long double>;
    for (int q = 0; q < kContourPoints; ++q) {
      const long double theta = std::numbers::pi_v<long double> * (2 * q + 1) / kContourPoints;
      const LC w(std::cos(theta), std::sin(theta));
      points[q] = Complex(static_cast<double>(w.real()), static_cast<double>(w.imag()));
      LC value = std::exp(w);
      long double inv_fact = 1.0L;
      for (int j = 0; j <= kMaxPhiOrder; ++j) {
        phis[q][j] = Complex(static_cast<double>(value.real()), static_cast<double>(value.imag()));
        value = (value - inv_fact) / w;
        inv_fact /= (j + 1);
      }
    }
  }
};

const ContourTable& contour_table() {
  static const ContourTable table;
  return table;
}

void phi_contour(int jmax, Complex z, std::span<Complex> out) {
  if (std::abs(z) >= 1.0) throw InvalidArgument("contour evaluation requires |z| < 1");
  const auto& t = contour_table();
  std::array<Complex, kContourPoints> weights;
  for (int q = 0; q < kContourPoints; ++q)
    weights[q] = t.points[q] / (t.points[q] - z) / static_cast<double>(kContourPoints);
  for (int j = 0; j <= jmax; ++j) {
    Complex sum = 0.0;
    for (int q = 0; q < kContourPoints; ++q) sum += t.phis[q][j] * weights[q];
    out[j] = sum;
  }
}

void phi_direct(int jmax, Complex z, std::span<Complex> out) {
  Complex value = std::exp(z);
  double inv_fact = 1.0;
  for (int j = 0; j <= jmax; ++j) {
    out[j] = value;
    value = (value - inv_fact) / z;
    inv_fact /= (j + 1);
  }
}

bool uses_contour(Complex z, PhiRegime regime) {
  switch (regime) {
    case PhiRegime::Contour: return true;
    case PhiRegime::Direct: return false;
    case PhiRegime::Auto: break;
  }
  return std::abs(z) <= kContourSwitchRadius;
}

}  // namespace

// --- nodes and bases --------------------------------------------------------

CollocationNodes CollocationNodes::from_values(std::vector<double> c) {
  if (c.empty()) throw InvalidArgument("collocation needs at least one node");
  for (double ck : c)
    if (!(ck >= 0.0 && ck <= 1.0)) throw InvalidArgument("collocation nodes must lie in [0,1]");
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] == c[j]) throw InvalidArgument("collocation nodes must be pairwise distinct");
  return CollocationNodes{static_cast<int>(c.size()), std::move(c)};
}

CollocationNodes gauss_nodes(int s) {
  if (s < 1 || s > 8) throw InvalidArgument("gauss_nodes: s must be in [1, 8]");
  std::vector<double> c(static_cast<std::size_t>(s));
  // Newton on P_s for the roots in (-1, 0]; the rest follow by symmetry.
  for (int i = 0; i < (s + 1) / 2; ++i) {
    long double x = -std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (s + 0.5L));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(s, x);
      const long double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    const long double ci = (1.0L + x) / 2.0L;
    c[i] = static_cast<double>(ci);
    c[s - 1 - i] = static_cast<double>(1.0L - ci);
  }
  if (s % 2 == 1) c[s / 2] = 0.5;
  return CollocationNodes{s, std::move(c)};
}

CollocationNodes equispaced_nodes(int s) {
  if (s < 1) throw InvalidArgument("equispaced_nodes: s must be positive");
  std::vector<double> c;
  for (int k = 1; k <= s; ++k) c.push_back(static_cast<double>(k) / s);
  return CollocationNodes::from_values(std::move(c));
}

LagrangeBasis::LagrangeBasis(CollocationNodes nodes) : nodes_(std::move(nodes)) {
  const int s = nodes_.s;
  beta_.assign(static_cast<std::size_t>(s * s), 0.0);
  beta_ext_.assign(beta_.size(), 0.0L);
  for (int l = 0; l < s; ++l) {
    std::vector<long double> poly{1.0L};
    for (int j = 0; j < s; ++j) {
      if (j == l) continue;
      const long double denom = static_cast<long double>(nodes_.c[l]) - nodes_.c[j];
      std::vector<long double> next(poly.size() + 1, 0.0L);
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d + 1] += poly[d] / denom;
        next[d] -= poly[d] * nodes_.c[j] / denom;
      }
      poly = std::move(next);
    }
    for (int j = 0; j < s; ++j) {
      beta_ext_[static_cast<std::size_t>(l * s + j)] = poly[j];
      beta_[static_cast<std::size_t>(l * s + j)] = static_cast<double>(poly[j]);
    }
  }
}

double LagrangeBasis::evaluate(int l, double u) const {
  double v = 0.0;
  for (int j = nodes_.s - 1; j >= 0; --j) v = v * u + coefficient(l, j);
  return v;
}

double LagrangeBasis::integral(int l, double x) const {
  long double v = 0.0L;
  for (int j = nodes_.s - 1; j >= 0; --j) v = v * x + beta_ext_[static_cast<std::size_t>(l * nodes_.s + j)] / (j + 1);
  return static_cast<double>(v * x);
}

ButcherTableau collocation_tableau(const CollocationNodes& nodes) {
  const LagrangeBasis basis(nodes);
  const int s = nodes.s;
  std::vector<double> a(static_cast<std::size_t>(s * s)), b(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l) a[static_cast<std::size_t>(k * s + l)] = basis.integral(l, nodes.c[k]);
  for (int l = 0; l < s; ++l) b[static_cast<std::size_t>(l)] = basis.integral(l, 1.0);
  ButcherTableau t = ButcherTableau::from_coefficients(std::move(a), std::move(b));
  // Keep the nodes themselves rather than the rounded row sums.
  t.c = nodes.c;
  return t;
}

ButcherTableau gauss_tableau(int s) {
  ButcherTableau t = collocation_tableau(gauss_nodes(s));
  t.name = "gauss-" + std::to_string(s);
  return t;
}

// --- φ functions --------------------------------------------------------------

Complex contour_eval(const std::function<Complex(Complex)>& f, Complex z, int points) {
  if (points < 1) throw InvalidArgument("contour_eval needs at least one point");
  if (std::abs(z) >= 1.0) throw InvalidArgument("contour_eval requires |z| < 1");
  Complex sum = 0.0;
  for (int q = 0; q < points; ++q) {
    const double theta = std::numbers::pi * (2 * q + 1) / points;
    const Complex w = std::polar(1.0, theta);
    sum += f(w) * w / (w - z);
  }
  return sum / static_cast<double>(points);
}

void phi_all(int jmax, Complex z, std::span<Complex> out, PhiRegime regime) {
  if (jmax < 0 || jmax > kMaxPhiOrder) throw InvalidArgument("phi order out of range");
  if (out.size() < static_cast<std::size_t>(jmax + 1)) throw InvalidArgument("phi_all output too small");
  if (z == Complex(0.0)) {
    for (int j = 0; j <= jmax; ++j) out[j] = 1.0 / factorial(j);
    return;
  }
  if (uses_contour(z, regime))
    phi_contour(jmax, z, out);
  else
    phi_direct(jmax, z, out);
}

Complex phi(int j, Complex z, PhiRegime regime) {
  std::array<Complex, kMaxPhiOrder + 1> buf;
  phi_all(j, z, buf, regime);
  return buf[j];
}

Complex erk_a(int k, int l, Complex z, const LagrangeBasis& basis, PhiRegime regime) {
  const int s = basis.stages();
  const double ck = basis.nodes().c[k];
  std::array<Complex, kMaxPhiOrder + 1> ph;
  phi_all(s, ck * z, ph, regime);
  Complex sum = 0.0;
  double cpow = ck;
  for (int j = 0; j < s; ++j) {
    sum += basis.coefficient(l, j) * cpow * factorial(j) * ph[j + 1];
    cpow *= ck;
  }
  return sum;
}

Complex erk_b(int k, Complex z, const LagrangeBasis& basis, PhiRegime regime) {
  const int s = basis.stages();
  std::array<Complex, kMaxPhiOrder + 1> ph;
  phi_all(s, z, ph, regime);
  Complex sum = 0.0;
  for (int j = 0; j < s; ++j) sum += basis.coefficient(k, j) * factorial(j) * ph[j + 1];
  return sum;
}

// --- exponent sets --------------------------------------------------------------

namespace {

std::vector<double> dedup(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || std::abs(x - out.back()) > 1e-15) out.push_back(x);
  return out;
}

}  // namespace

std::vector<double> lawson_alpha_set(const CollocationNodes& nodes) {
  std::vector<double> v{1.0};
  for (double ck : nodes.c) {
    v.push_back(ck);
    v.push_back(1.0 - ck);
    for (double cl : nodes.c) v.push_back(ck - cl);
  }
  return dedup(std::move(v));
}

std::vector<double> erk_alpha_set(const CollocationNodes& nodes) {
  std::vector<double> v{1.0};
  for (double ck : nodes.c) v.push_back(ck);
  return dedup(std::move(v));
}

const CVector& CoefficientTables::propagator(double alpha) const {
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (std::abs(alphas[i] - alpha) <= 1e-15) return propagators[i];
  throw InvalidArgument("no propagator tabulated for requested exponent");
}

// --- table precomputation ---------------------------------------------------

CoefficientTables precompute_tables(const Grid& grid, double h, double nu,
                                    const CollocationNodes& nodes,
                                    std::span<const double> alphas, int threads,
                                    bool with_erk) {
  if (h == 0.0 || !std::isfinite(h)) throw InvalidArgument("precompute_tables: h must be nonzero");
  const int s = nodes.s;
  const LagrangeBasis basis(nodes);
  const RVector omega = laplacian_symbol(grid);
  const std::size_t n = omega.size();

  CoefficientTables t;
  t.grid = grid;
  t.h = h;
  t.nu = nu;
  t.nodes = nodes;
  t.alphas = dedup(std::vector<double>(alphas.begin(), alphas.end()));
  t.propagators.assign(t.alphas.size(), CVector(n));
  t.regime.assign(n, ModeRegime::Contour);
  if (with_erk) {
    t.a.assign(static_cast<std::size_t>(s * s), CVector(n));
    t.b.assign(static_cast<std::size_t>(s), CVector(n));
  }

  // Many modes share a symbol; evaluate once per distinct ω.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return omega[x] < omega[y]; });
  std::vector<std::size_t> group_start;
  for (std::size_t i = 0; i < n; ++i)
    if (i == 0 || omega[order[i]] != omega[order[i - 1]]) group_start.push_back(i);
  group_start.push_back(n);
  const std::size_t groups = group_start.size() - 1;

  std::vector<double> fact(static_cast<std::size_t>(s + 1));
  for (int j = 0; j <= s; ++j) fact[j] = factorial(j);

  auto work = [&](std::size_t g0, std::size_t g1) {
    std::vector<Complex> av(static_cast<std::size_t>(s * s)), bv(static_cast<std::size_t>(s));
    std::vector<Complex> ev(t.alphas.size());
    std::array<Complex, kMaxPhiOrder + 1> ph;
    for (std::size_t g = g0; g < g1; ++g) {
      const double w = omega[order[group_start[g]]];
      const double phase = h * nu * w;
      const Complex z(0.0, phase);
      int contour_args = 0, direct_args = 0;
      auto classify = [&](Complex arg) {
        if (arg == Complex(0.0)) return;
        (uses_contour(arg, PhiRegime::Auto) ? contour_args : direct_args)++;
      };
      if (with_erk) {
        for (int k = 0; k < s; ++k) {
          const double ck = nodes.c[k];
          phi_all(s, ck * z, ph);
          classify(ck * z);
          for (int l = 0; l < s; ++l) {
            Complex sum = 0.0;
            double cpow = ck;
            for (int j = 0; j < s; ++j) {
              sum += basis.coefficient(l, j) * cpow * fact[j] * ph[j + 1];
              cpow *= ck;
            }
            av[static_cast<std::size_t>(k * s + l)] = sum;
          }
        }
        phi_all(s, z, ph);
        classify(z);
        for (int k = 0; k < s; ++k) {
          Complex sum = 0.0;
          for (int j = 0; j < s; ++j) sum += basis.coefficient(k, j) * fact[j] * ph[j + 1];
          bv[k] = sum;
        }
      } else {
        classify(z);
      }
      for (std::size_t i = 0; i < t.alphas.size(); ++i) ev[i] = std::polar(1.0, t.alphas[i] * phase);
      const ModeRegime reg = direct_args == 0   ? ModeRegime::Contour
                             : contour_args == 0 ? ModeRegime::Direct
                                                 : ModeRegime::Mixed;
      for (std::size_t m = group_start[g]; m < group_start[g + 1]; ++m) {
        const std::size_t idx = order[m];
        if (with_erk) {
          for (std::size_t q = 0; q < av.size(); ++q) t.a[q][idx] = av[q];
          for (int k = 0; k < s; ++k) t.b[k][idx] = bv[k];
        }
        for (std::size_t i = 0; i < ev.size(); ++i) t.propagators[i][idx] = ev[i];
        t.regime[idx] = reg;
      }
    }
  };

  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(groups, 1)));
  if (workers <= 1) {
    work(0, groups);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (groups + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t g0 = w * chunk, g1 = std::min(groups, g0 + chunk);
      if (g0 >= g1) break;
      pool.emplace_back(work, g0, g1);
    }
    for (auto& th : pool) th.join();
  }
  return t;
}

}  // namespace expnls
