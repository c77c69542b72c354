#pragma once

// Exponential Runge–Kutta collocation, Lawson and splitting time steppers.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "expnls/butcher.hpp"
#include "expnls/coefficients.hpp"
#include "expnls/problems.hpp"
#include "expnls/spectral.hpp"

namespace expnls {

struct StepperConfig {
  double tolerance = 1e-14;
  int max_iterations = 200;
  double divergence_factor = 1e6;

  void validate() const;
};

/// Composition S_N(a_1 h) S_L(b_1 h) ... S_L(b_r h) S_N(a_{r+1} h).
struct SplittingScheme {
  int order = 2;
  std::vector<double> a;  ///< r + 1 entries
  std::vector<double> b;  ///< r entries
};

/// Orders 1 (Lie), 2 (Strang), 4 (triple jump) and 6 (r = 10).
SplittingScheme splitting_scheme(int order);

/// One time step ψ(t) -> ψ(t + h) for a fixed problem and step size.
class Stepper {
 public:
  virtual ~Stepper() = default;
  /// ψ holds physical values on the problem grid and is updated in place.
  virtual void step(CVector& psi, double t) = 0;
  virtual double step_size() const noexcept = 0;
  /// Fixed-point iterations used by the last step (0 for splitting).
  int last_iterations() const noexcept { return last_iterations_; }

 protected:
  int last_iterations_ = 0;
};

std::unique_ptr<Stepper> make_erk_stepper(const Problem& problem,
                                          std::shared_ptr<const CoefficientTables> tables,
                                          const StepperConfig& config = {});
/// The tables must hold propagators for lawson_alpha_set(tableau nodes).
std::unique_ptr<Stepper> make_lawson_stepper(const Problem& problem, const ButcherTableau& tableau,
                                             std::shared_ptr<const CoefficientTables> tables,
                                             const StepperConfig& config = {});
std::unique_ptr<Stepper> make_splitting_stepper(const Problem& problem,
                                                const SplittingScheme& scheme, double h);

/// Single-step conveniences with the stepping-equation signatures.
SpectralField erk_step(const SpectralField& psi, double t, double h,
                       const CoefficientTables& tables, const Problem& problem,
                       const StepperConfig& config = {});
SpectralField lawson_step(const SpectralField& psi, double t, double h,
                          const ButcherTableau& tableau, const CoefficientTables& propagators,
                          const Problem& problem, const StepperConfig& config = {});
SpectralField splitting_step(const SpectralField& psi, double t, double h,
                             const SplittingScheme& scheme, const Problem& problem);

enum class MethodFamily { Erk, Lawson, Splitting };
enum class NodeFamily { Gauss, Equispaced };

struct MethodSpec {
  MethodFamily family = MethodFamily::Erk;
  int stages = 2;                          ///< ERK and Lawson
  NodeFamily nodes = NodeFamily::Gauss;    ///< ERK and Lawson
  int order = 2;                           ///< splitting

  static MethodSpec erk(int s, NodeFamily n = NodeFamily::Gauss) { return {MethodFamily::Erk, s, n, 0}; }
  static MethodSpec lawson(int s, NodeFamily n = NodeFamily::Gauss) { return {MethodFamily::Lawson, s, n, 0}; }
  static MethodSpec splitting(int order) { return {MethodFamily::Splitting, 0, NodeFamily::Gauss, order}; }

  /// e.g. "gauss-erk-2", "equi-lawson-3", "splitting-4".
  std::string label() const;
  CollocationNodes collocation_nodes() const;
};

struct BuildOptions {
  StepperConfig config;
  int threads = 1;  ///< coefficient precomputation workers
};

/// Builds the stepper for a method, including its coefficient tables.
/// h may be negative.
std::unique_ptr<Stepper> make_stepper(const Problem& problem, const MethodSpec& method, double h,
                                      const BuildOptions& options = {});

/// Φ_{t+h -> t}: the same method run backwards from t + h with step -h.
SpectralField reverse_step(const SpectralField& psi_next, double t_next, double h,
                           const MethodSpec& method, const Problem& problem,
                           const BuildOptions& options = {});

using Observer = std::function<void(long step, double t, const SpectralField& psi)>;

struct IntegrationResult {
  SpectralField final_state;
  long steps = 0;
  double h = 0.0;
  double precompute_seconds = 0.0;
  double stepping_seconds = 0.0;
  long total_iterations = 0;
  int max_iterations = 0;
};

/// Number of steps N with N h = T; throws InvalidArgument unless T/h is an
/// integer to relative 1e-12.
long step_count(double T, double h);

/// Steps from t = 0 to T starting at problem.initial, calling every observer
/// at steps 0..N. Step failures are rethrown as IntegrationError.
IntegrationResult integrate(const Problem& problem, const MethodSpec& method, double T, double h,
                            const std::vector<Observer>& observers = {},
                            const BuildOptions& options = {});

}  // namespace expnls
