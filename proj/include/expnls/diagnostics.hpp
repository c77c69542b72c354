#pragma once

// Error functionals, invariants and convergence-order estimation.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "expnls/integrators.hpp"
#include "expnls/problems.hpp"
#include "expnls/spectral.hpp"

namespace expnls {

/// ℓ² distance between two physical fields on the same grid.
double l2_distance(const SpectralField& u, const SpectralField& v);

/// E(v) = ½‖∇v‖² + (1/2ν)[k Σ w|v|² + k Σ G(|v|²)], plus Ω⟨R⟩/(2ν) for
/// rotating-frame problems. For the cubic soliton this is ½‖∇v‖² - (q/4)‖v‖⁴_{ℓ⁴}.
double discrete_energy(const SpectralField& field, const Problem& problem, double t);

/// ⟨R⟩ = k Σ conj(φ) Rφ with Rφ = -i(x ∂_y φ - y ∂_x φ). Throws for 1-D fields.
double angular_momentum(const SpectralField& field);

/// sup_n ‖Π ψ_ex(t_n) - ψ^n‖.
double phase_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                   const Problem& problem);
/// sup_n |‖ref_n‖ - ‖ψ^n‖| / ‖ref_0‖, ref = Π ψ_ex when available, else ψ⁰.
double mass_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                  const Problem& problem);
/// sup_n |E(ref_n) - E(ψ^n)| / |E(ref_0)|, ref as for mass_error.
double energy_error(std::span<const SpectralField> trajectory, std::span<const double> times,
                    const Problem& problem);

struct OrderEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square residual in log10 units
  int points = 0;
};

/// Least-squares slope of log error against log h over points with error in
/// (lower, upper). Throws InvalidArgument if fewer than 3 points remain.
OrderEstimate order_estimate(std::span<const std::pair<double, double>> data, double lower = 1e-10,
                             double upper = 1e-1);

struct ErrorReport {
  std::string method;
  double h = 0.0;
  long steps = 0;
  double phase_error = 0.0;  ///< NaN without an exact solution
  double mass_error = 0.0;
  double energy_error = 0.0;
  std::vector<double> times;
  std::vector<double> mass;    ///< ‖ψ^n‖²
  std::vector<double> energy;
  std::vector<double> phase;   ///< per-step ℓ² error, empty without exact solution
  std::vector<double> angular_momentum;  ///< 2-D only
  double seconds = 0.0;
  double precompute_seconds = 0.0;
  long total_iterations = 0;
  int max_iterations = 0;
};

struct TrackOptions {
  bool energy = true;
  bool angular_momentum = false;
  /// Extra per-step callback (snapshots etc.).
  Observer extra;
};

/// Runs integrate() while accumulating every error functional on the fly.
ErrorReport run_with_diagnostics(const Problem& problem, const MethodSpec& method, double T,
                                 double h, const BuildOptions& options = {},
                                 const TrackOptions& track = {});

}  // namespace expnls
