#pragma once

// Cauchy problems ∂_t ψ = iνΔψ + N_w(t, ψ) on a periodic grid, with
//   N_w(t, ψ) = -i (w(t, x) + g(|ψ|²)) ψ.

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "expnls/spectral.hpp"

namespace expnls {

/// g(ρ) = β ρ^κ.
struct PowerLaw {
  double beta = 0.0;
  int kappa = 1;
};

/// g(ρ) = G₁ ρ + G₂ ρ².
struct CubicQuintic {
  double g1 = 0.0;
  double g2 = 0.0;
};

using Nonlinearity = std::variant<PowerLaw, CubicQuintic>;

double nonlinear_rate(const Nonlinearity& n, double rho);
/// G(ρ) = ∫_0^ρ g.
double nonlinear_energy_density(const Nonlinearity& n, double rho);

/// One separable piece amplitude(t) * shape(x, y) of the potential.
struct PotentialTerm {
  std::function<double(double, double)> shape;
  std::function<double(double)> amplitude;
  /// Optional primitive of amplitude; quadrature is used when empty.
  std::function<double(double)> antiderivative;
  RVector samples;  ///< shape on the grid nodes
};

struct RotatingTrap {
  double gamma_x = 1.0;
  double gamma_y = 1.0;
  double omega = 0.0;
  double delta = 0.0;

  /// V_c(x, y) = ½(γ_x² x² + γ_y² y²).
  double harmonic(double x, double y) const noexcept {
    return 0.5 * (gamma_x * gamma_x * x * x + gamma_y * gamma_y * y * y);
  }
};

struct Problem {
  std::string name;
  Grid grid;
  double nu = 0.5;  ///< L = iνΔ
  Nonlinearity nonlinearity;
  std::vector<PotentialTerm> potential;  ///< empty means w ≡ 0
  SpectralField initial;
  std::function<Complex(double, double, double)> exact;  ///< ψ_ex(t, x, y), may be empty
  /// Rotating-frame problems report the lab-frame energy, which carries Ω⟨R⟩.
  bool rotating_frame = false;
  double rotation_speed = 0.0;

  bool has_potential() const noexcept { return !potential.empty(); }
  bool has_exact() const noexcept { return static_cast<bool>(exact); }

  double w(double t, double x, double y = 0.0) const;
  /// w(t, x_j) at every node.
  void potential_at(double t, std::span<double> out) const;
  /// ∫_{t0}^{t1} w(σ, x_j) dσ at every node.
  void potential_integral(double t0, double t1, std::span<double> out) const;
  /// Π_k ψ_ex(t). Throws InvalidArgument if no exact solution is attached.
  SpectralField exact_field(double t) const;
};

/// ∂_t ψ = i ∂_x² ψ + i q |ψ|² ψ with the bright soliton
/// √(2a/q) sech(√a ξ) e^{icξ/2} e^{i(a + c²/4)t}, ξ = x - x₀ - ct.
Problem cubic_soliton_1d(double q, double a, double c, double x0, const Grid& grid);

/// i ∂_t ψ = -∂_x² ψ + V ψ + G₁|ψ|²ψ + G₂|ψ|⁴ψ, V = (x/2) ω² cos(ωt).
Problem cubic_quintic_1d(double g1, double g2, double omega, double ec, double beta0,
                         const Grid& grid);

/// ∂_t ψ = iΔψ + i|ψ|²ψ with ψ(t, x) = e^{it} Θ(|x|).
Problem cubic_plane_2d(const Grid& grid);

/// ∂_t ψ = i ∂_x² ψ + i q |ψ|² ψ from ψ₀ = |sin x|; no exact solution.
Problem abs_sin_1d(double q, const Grid& grid);

/// A(t) = ((cos Ωt, -sin Ωt), (sin Ωt, cos Ωt)), row-major.
std::array<double, 4> rotation_matrix(double t, double omega);

/// Smooth cutoff: 1 on |x| <= δ/2 - 1, 0 on |x| >= δ/2. Requires δ > 2.
double cutoff_chi(double x, double delta);

/// ∂_t ψ = (i/2)Δψ - i w ψ - iβ|ψ|²ψ with w(t, x) = V_c(A(t)x) χ(x) χ(y).
/// Each grid axis must have period trap.delta.
Problem rotating_gpe_2d(const RotatingTrap& trap, double beta, SpectralField initial,
                        const Grid& grid);

/// √((μ - V_c)₊/β) with μ chosen so the discrete mass is 1.
SpectralField thomas_fermi_initial(const RotatingTrap& trap, double beta, const Grid& grid);

}  // namespace expnls
