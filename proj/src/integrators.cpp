#include "expnls/integrators.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "expnls/error.hpp"

namespace expnls {

void StepperConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidArgument("fixed-point tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (!(divergence_factor > 1.0)) throw InvalidArgument("divergence factor must exceed 1");
}

namespace {

// Pointwise N_w(t, ψ) = -i (w + g(|ψ|²)) ψ.
void apply_nonlinearity(const Nonlinearity& nl, const double* w, const CVector& psi, CVector& out) {
  const std::size_t n = psi.size();
  if (const auto* p = std::get_if<PowerLaw>(&nl); p != nullptr && p->kappa == 1) {
    const double beta = p->beta;
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = std::norm(psi[i]);
      const double rate = (w ? w[i] : 0.0) + beta * rho;
      out[i] = Complex(rate * psi[i].imag(), -rate * psi[i].real());
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = (w ? w[i] : 0.0) + nonlinear_rate(nl, std::norm(psi[i]));
    out[i] = Complex(rate * psi[i].imag(), -rate * psi[i].real());
  }
}

// Shared engine for ERK and Lawson: stages
//   ψ̂_k = Ec_k ψ̂_n + h Σ_l SA_{kl} N̂_l,   ψ̂_{n+1} = E1 ψ̂_n + h Σ_k SB_k N̂_k,
// with per-mode diagonal SA, SB.
class CollocationStepper final : public Stepper {
 public:
  CollocationStepper(const Problem& problem, std::shared_ptr<const CoefficientTables> tables,
                     std::vector<double> c, const StepperConfig& config)
      : problem_(problem),
        tables_(std::move(tables)),
        c_(std::move(c)),
        config_(config),
        fft_(FourierTransform::for_grid(problem.grid)) {
    config_.validate();
    if (!(tables_->grid == problem.grid)) throw InvalidArgument("coefficient tables built for another grid");
    if (tables_->nu != problem.nu) throw InvalidArgument("coefficient tables built for another Laplacian coefficient");
    s_ = static_cast<int>(c_.size());
    const std::size_t n = problem.grid.size();
    base_.assign(s_, CVector(n));
    stage_hat_.assign(s_, CVector(n));
    stage_.assign(s_, CVector(n));
    nl_hat_.assign(s_, CVector(n));
    if (problem.has_potential()) w_.assign(s_, RVector(n));
    psi_hat_.resize(n);
  }

  double step_size() const noexcept override { return tables_->h; }

  void step(CVector& psi, double t) override {
    const double h = tables_->h;
    const std::size_t n = psi.size();
    std::copy(psi.begin(), psi.end(), psi_hat_.begin());
    fft_->forward(psi_hat_);
    double norm0 = 0.0;
    for (const auto& v : psi_hat_) norm0 += std::norm(v);
    norm0 = std::sqrt(norm0);

    for (int k = 0; k < s_; ++k) {
      if (!w_.empty()) problem_.potential_at(t + c_[k] * h, w_[k]);
      const Complex* e = ec_[k]->data();
      for (std::size_t p = 0; p < n; ++p) base_[k][p] = e[p] * psi_hat_[p];
      stage_hat_[k] = base_[k];
      fft_->inverse(base_[k].data(), stage_[k].data());
    }

    bool converged = false;
    double previous = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < config_.max_iterations) {
      ++it;
      evaluate_nonlinear_terms();
      double change = 0.0;
      for (int k = 0; k < s_; ++k) {
        double diff = 0.0, nrm = 0.0;
        CVector& out = stage_hat_[k];
        for (std::size_t p = 0; p < n; ++p) {
          Complex acc = 0.0;
          for (int l = 0; l < s_; ++l) acc += (*sa_[k * s_ + l])[p] * nl_hat_[l][p];
          const Complex next = base_[k][p] + h * acc;
          diff += std::norm(next - out[p]);
          nrm += std::norm(next);
          out[p] = next;
        }
        if (!std::isfinite(nrm) || std::sqrt(nrm) > config_.divergence_factor * norm0)
          throw ConvergenceError(ConvergenceError::Kind::Diverged,
                                 "fixed-point iteration diverged; the time step is too large");
        change = std::max(change, nrm > 0.0 ? std::sqrt(diff / nrm) : std::sqrt(diff));
      }
      for (int k = 0; k < s_; ++k) fft_->inverse(stage_hat_[k].data(), stage_[k].data());
      if (change <= config_.tolerance ||
          (it >= 3 && change >= previous && change < 100.0 * config_.tolerance)) {
        converged = true;
        break;
      }
      previous = change;
    }
    last_iterations_ = it;
    if (!converged) {
      std::ostringstream msg;
      msg << "fixed-point iteration did not converge in " << config_.max_iterations
          << " iterations; the time step is too large";
      throw ConvergenceError(ConvergenceError::Kind::NoConvergence, msg.str());
    }

    evaluate_nonlinear_terms();
    const Complex* e1 = e1_->data();
    for (std::size_t p = 0; p < n; ++p) {
      Complex acc = 0.0;
      for (int k = 0; k < s_; ++k) acc += (*sb_[k])[p] * nl_hat_[k][p];
      psi_hat_[p] = e1[p] * psi_hat_[p] + h * acc;
    }
    fft_->inverse(psi_hat_.data(), psi.data());
  }

  // Operator pointers; set up by the factories below.
  std::vector<const CVector*> ec_, sa_, sb_;
  const CVector* e1_ = nullptr;
  std::vector<CVector> owned_;

 private:
  void evaluate_nonlinear_terms() {
    for (int l = 0; l < s_; ++l) {
      apply_nonlinearity(problem_.nonlinearity, w_.empty() ? nullptr : w_[l].data(), stage_[l],
                         nl_hat_[l]);
      fft_->forward(nl_hat_[l]);
    }
  }

  Problem problem_;
  std::shared_ptr<const CoefficientTables> tables_;
  std::vector<double> c_;
  StepperConfig config_;
  std::shared_ptr<const FourierTransform> fft_;
  int s_ = 0;
  std::vector<CVector> base_, stage_hat_, stage_, nl_hat_;
  std::vector<RVector> w_;
  CVector psi_hat_;
};

std::vector<double> lawson_alphas(const std::vector<double>& c) {
  return lawson_alpha_set(CollocationNodes{static_cast<int>(c.size()), c});
}

}  // namespace

std::unique_ptr<Stepper> make_erk_stepper(const Problem& problem,
                                          std::shared_ptr<const CoefficientTables> tables,
                                          const StepperConfig& config) {
  if (tables->a.empty()) throw InvalidArgument("ERK stepping needs a_{k,l} and b_k tables");
  const int s = tables->stages();
  auto st = std::make_unique<CollocationStepper>(problem, tables, tables->nodes.c, config);
  for (int k = 0; k < s; ++k) {
    st->ec_.push_back(&tables->propagator(tables->nodes.c[k]));
    st->sb_.push_back(&tables->b[k]);
    for (int l = 0; l < s; ++l) st->sa_.push_back(&tables->A(k, l));
  }
  st->e1_ = &tables->propagator(1.0);
  return st;
}

std::unique_ptr<Stepper> make_lawson_stepper(const Problem& problem, const ButcherTableau& tableau,
                                             std::shared_ptr<const CoefficientTables> tables,
                                             const StepperConfig& config) {
  const int s = tableau.s;
  const std::size_t n = problem.grid.size();
  auto st = std::make_unique<CollocationStepper>(problem, tables, tableau.c, config);
  st->owned_.reserve(static_cast<std::size_t>(s * s + s));
  for (int k = 0; k < s; ++k) {
    st->ec_.push_back(&tables->propagator(tableau.c[k]));
    for (int l = 0; l < s; ++l) {
      const CVector& e = tables->propagator(tableau.c[k] - tableau.c[l]);
      CVector& m = st->owned_.emplace_back(n);
      for (std::size_t p = 0; p < n; ++p) m[p] = tableau.A(k, l) * e[p];
      st->sa_.push_back(&m);
    }
  }
  for (int k = 0; k < s; ++k) {
    const CVector& e = tables->propagator(1.0 - tableau.c[k]);
    CVector& m = st->owned_.emplace_back(n);
    for (std::size_t p = 0; p < n; ++p) m[p] = tableau.b[k] * e[p];
    st->sb_.push_back(&m);
  }
  st->e1_ = &tables->propagator(1.0);
  return st;
}

SpectralField erk_step(const SpectralField& psi, double t, double h,
                       const CoefficientTables& tables, const Problem& problem,
                       const StepperConfig& config) {
  if (!psi.is_physical()) throw InvalidArgument("erk_step expects a physical field");
  if (tables.h != h) throw InvalidArgument("coefficient tables built for another step size");
  auto st = make_erk_stepper(problem, std::make_shared<const CoefficientTables>(tables), config);
  CVector v = psi.values();
  st->step(v, t);
  return SpectralField(psi.grid(), std::move(v));
}

SpectralField lawson_step(const SpectralField& psi, double t, double h,
                          const ButcherTableau& tableau, const CoefficientTables& propagators,
                          const Problem& problem, const StepperConfig& config) {
  if (!psi.is_physical()) throw InvalidArgument("lawson_step expects a physical field");
  if (propagators.h != h) throw InvalidArgument("propagators built for another step size");
  auto st = make_lawson_stepper(problem, tableau,
                                std::make_shared<const CoefficientTables>(propagators), config);
  CVector v = psi.values();
  st->step(v, t);
  return SpectralField(psi.grid(), std::move(v));
}

SpectralField splitting_step(const SpectralField& psi, double t, double h,
                             const SplittingScheme& scheme, const Problem& problem) {
  if (!psi.is_physical()) throw InvalidArgument("splitting_step expects a physical field");
  auto st = make_splitting_stepper(problem, scheme, h);
  CVector v = psi.values();
  st->step(v, t);
  return SpectralField(psi.grid(), std::move(v));
}

std::string MethodSpec::label() const {
  if (family == MethodFamily::Splitting) return "splitting-" + std::to_string(order);
  std::string s = nodes == NodeFamily::Gauss ? "gauss-" : "equi-";
  s += family == MethodFamily::Erk ? "erk-" : "lawson-";
  return s + std::to_string(stages);
}

CollocationNodes MethodSpec::collocation_nodes() const {
  if (family == MethodFamily::Splitting) throw InvalidArgument("splitting methods have no collocation nodes");
  return nodes == NodeFamily::Gauss ? gauss_nodes(stages) : equispaced_nodes(stages);
}

std::unique_ptr<Stepper> make_stepper(const Problem& problem, const MethodSpec& method, double h,
                                      const BuildOptions& options) {
  switch (method.family) {
    case MethodFamily::Splitting:
      return make_splitting_stepper(problem, splitting_scheme(method.order), h);
    case MethodFamily::Erk: {
      const CollocationNodes nodes = method.collocation_nodes();
      const auto alphas = erk_alpha_set(nodes);
      auto tables = std::make_shared<const CoefficientTables>(
          cached_tables(problem.grid, h, problem.nu, nodes, alphas, options.threads, true));
      return make_erk_stepper(problem, tables, options.config);
    }
    case MethodFamily::Lawson: {
      const CollocationNodes nodes = method.collocation_nodes();
      ButcherTableau tableau = collocation_tableau(nodes);
      const auto alphas = lawson_alphas(tableau.c);
      auto tables = std::make_shared<const CoefficientTables>(
          cached_tables(problem.grid, h, problem.nu, nodes, alphas, options.threads, false));
      return make_lawson_stepper(problem, tableau, tables, options.config);
    }
  }
  throw InvalidArgument("unknown method family");
}

SpectralField reverse_step(const SpectralField& psi_next, double t_next, double h,
                           const MethodSpec& method, const Problem& problem,
                           const BuildOptions& options) {
  if (!psi_next.is_physical()) throw InvalidArgument("reverse_step expects a physical field");
  auto st = make_stepper(problem, method, -h, options);
  CVector v = psi_next.values();
  st->step(v, t_next);
  return SpectralField(psi_next.grid(), std::move(v));
}

long step_count(double T, double h) {
  if (!(h > 0.0) || !(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("need h > 0 and T >= 0");
  const double ratio = T / h;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio))
    throw InvalidArgument("final time T is not an integer multiple of h");
  return static_cast<long>(n);
}

IntegrationResult integrate(const Problem& problem, const MethodSpec& method, double T, double h,
                            const std::vector<Observer>& observers, const BuildOptions& options) {
  using clock = std::chrono::steady_clock;
  const long steps = step_count(T, h);
  IntegrationResult res;
  res.steps = steps;
  res.h = h;

  const auto t0 = clock::now();
  auto stepper = make_stepper(problem, method, h, options);
  res.precompute_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  SpectralField psi = problem.initial;
  if (!psi.is_physical()) psi = to_physical(psi);
  for (const auto& obs : observers) obs(0, 0.0, psi);

  double stepping = 0.0;
  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * h;
    const auto s0 = clock::now();
    try {
      stepper->step(psi.values(), t);
    } catch (const ConvergenceError& e) {
      throw IntegrationError(n, std::string(e.what()) + " (step " + std::to_string(n) + ")");
    }
    stepping += std::chrono::duration<double>(clock::now() - s0).count();
    res.total_iterations += stepper->last_iterations();
    res.max_iterations = std::max(res.max_iterations, stepper->last_iterations());
    double sum = 0.0;
    for (const auto& v : psi.values()) sum += std::norm(v);
    if (!std::isfinite(sum))
      throw IntegrationError(n, "solution became non-finite at step " + std::to_string(n));
    const double tn = static_cast<double>(n + 1) * h;
    for (const auto& obs : observers) obs(n + 1, tn, psi);
  }
  res.stepping_seconds = stepping;
  res.final_state = std::move(psi);
  return res;
}

}  // namespace expnls
