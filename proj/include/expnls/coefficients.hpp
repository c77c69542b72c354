#pragma once

// Collocation nodes, Lagrange bases and the entire functions a_{k,l}(z),
// b_k(z) of exponential Runge–Kutta collocation methods.
//
// With the scaled Lagrange polynomials ℓ_l(u) = Σ_j β_{l,j} u^j on [0,1],
//   a_{k,l}(z) = ∫_0^{c_k} e^{(c_k-u) z} ℓ_l(u) du = c_k Σ_j β_{l,j} c_k^j j! φ_{j+1}(c_k z)
//   b_k(z)     = ∫_0^1     e^{(1-u) z}   ℓ_k(u) du = Σ_j β_{k,j} j! φ_{j+1}(z)
// where z = hL restricted to one Fourier mode.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "expnls/butcher.hpp"
#include "expnls/spectral.hpp"

namespace expnls {

struct CollocationNodes {
  int s = 0;
  std::vector<double> c;

  /// Validates 1 <= s, nodes in [0,1] and pairwise distinct.
  static CollocationNodes from_values(std::vector<double> c);
};

/// Roots of the shifted Legendre polynomial of degree s on [0,1], ascending.
/// Requires 1 <= s <= 8.
CollocationNodes gauss_nodes(int s);
/// c_k = k/s, k = 1..s.
CollocationNodes equispaced_nodes(int s);

/// Lagrange basis on the scaled variable u = τ/h, in monomial form.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(CollocationNodes nodes);

  const CollocationNodes& nodes() const noexcept { return nodes_; }
  int stages() const noexcept { return nodes_.s; }
  /// β_{l,j}: coefficient of u^j in ℓ_l.
  double coefficient(int l, int j) const { return beta_[static_cast<std::size_t>(l * nodes_.s + j)]; }
  double evaluate(int l, double u) const;
  /// ∫_0^x ℓ_l(u) du.
  double integral(int l, double x) const;

 private:
  CollocationNodes nodes_;
  std::vector<double> beta_;
  std::vector<long double> beta_ext_;
};

/// Underlying collocation Runge–Kutta method: a_{k,l} = ∫_0^{c_k} ℓ_l,
/// b_l = ∫_0^1 ℓ_l.
ButcherTableau collocation_tableau(const CollocationNodes& nodes);
/// Gauss collocation tableau with s stages (1 <= s <= 8).
ButcherTableau gauss_tableau(int s);

/// How φ values are evaluated.
enum class PhiRegime {
  Auto,     ///< contour inside kContourSwitchRadius, recurrence outside
  Contour,  ///< always the trapezoidal Cauchy integral (requires |z| < 1)
  Direct,   ///< always the recurrence φ_{j+1} = (φ_j - 1/j!)/z
};

/// |argument| at or below which Auto uses the contour integral.
inline constexpr double kContourSwitchRadius = 0.5;
/// Trapezoidal points on the unit circle.
inline constexpr int kContourPoints = 64;

/// Trapezoidal approximation of (1/2πi)∮ f(ω)/(ω - z) dω over the positively
/// oriented unit circle with Q points. Throws InvalidArgument if |z| >= 1.
Complex contour_eval(const std::function<Complex(Complex)>& f, Complex z,
                     int points = kContourPoints);

/// φ_j(z): φ_0 = exp, φ_{j+1}(z) = (φ_j(z) - 1/j!)/z, φ_j(0) = 1/j!.
Complex phi(int j, Complex z, PhiRegime regime = PhiRegime::Auto);
/// φ_0 .. φ_jmax at one argument, written to out[0..jmax].
void phi_all(int jmax, Complex z, std::span<Complex> out, PhiRegime regime = PhiRegime::Auto);

/// a_{k,l}(z), 0-based stage indices.
Complex erk_a(int k, int l, Complex z, const LagrangeBasis& basis,
              PhiRegime regime = PhiRegime::Auto);
/// b_k(z), 0-based stage index.
Complex erk_b(int k, Complex z, const LagrangeBasis& basis,
              PhiRegime regime = PhiRegime::Auto);

/// Exponents α for which a Lawson step needs e^{αhL}: {c_k} ∪ {c_k - c_l} ∪
/// {1 - c_k} ∪ {1}, deduplicated with tolerance 1e-15 and sorted.
std::vector<double> lawson_alpha_set(const CollocationNodes& nodes);
/// Exponents needed by an ERK step: {c_k} ∪ {1}.
std::vector<double> erk_alpha_set(const CollocationNodes& nodes);

/// Mode-wise evaluation regime reported for inspection.
enum class ModeRegime : std::uint8_t { Contour = 0, Direct = 1, Mixed = 2 };

/// Per-mode diagonal operators for one (grid, h, ν, nodes). L = iνΔ, so the
/// symbol of hL at mode p is z_p = i h ν ω_p. Immutable after construction.
struct CoefficientTables {
  Grid grid;
  double h = 0.0;
  double nu = 0.5;
  CollocationNodes nodes;
  std::vector<CVector> a;       ///< s*s arrays, index k*s + l
  std::vector<CVector> b;       ///< s arrays
  std::vector<double> alphas;   ///< sorted exponents
  std::vector<CVector> propagators;  ///< e^{α z_p}, aligned with alphas
  std::vector<ModeRegime> regime;    ///< per mode

  int stages() const noexcept { return nodes.s; }
  const CVector& A(int k, int l) const { return a[static_cast<std::size_t>(k * nodes.s + l)]; }
  /// Propagator for α (matched within 1e-15). Throws if absent.
  const CVector& propagator(double alpha) const;
};

/// Evaluates all tables. Work is split over `threads` workers (0 = hardware
/// concurrency); the result is bitwise independent of the worker count.
/// h may be negative (used for reverse steps); h = 0 is rejected.
CoefficientTables precompute_tables(const Grid& grid, double h, double nu,
                                    const CollocationNodes& nodes,
                                    std::span<const double> alphas, int threads = 1,
                                    bool with_erk = true);

/// Same as precompute_tables but consults the on-disk cache in
/// $EXPNLS_CACHE_DIR when that variable is set.
CoefficientTables cached_tables(const Grid& grid, double h, double nu,
                                const CollocationNodes& nodes,
                                std::span<const double> alphas, int threads = 1,
                                bool with_erk = true);

}  // namespace expnls
