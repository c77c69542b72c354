#include <cmath>
#include <map>

#include "expnls/error.hpp"
#include "expnls/integrators.hpp"

namespace expnls {

SplittingScheme splitting_scheme(int order) {
  switch (order) {
    case 1:
      return {1, {1.0, 0.0}, {1.0}};
    case 2:
      return {2, {0.5, 0.5}, {1.0}};
    case 4: {
      const double theta = (2.0 + std::cbrt(2.0) + 1.0 / std::cbrt(2.0)) / 6.0;
      return {4, {theta, 0.5 - theta, 0.5 - theta, theta}, {2.0 * theta, 1.0 - 4.0 * theta, 2.0 * theta}};
    }
    case 6: {
      const double a[5] = {0.0502627644003922, 0.413514300428344, 0.0450798897943977,
                           -0.188054853819569, 0.541960678450780};
      const double b[4] = {0.148816447901042, -0.132385865767784, 0.067307604692185,
                           0.432666402578175};
      SplittingScheme sc{6, {}, {}};
      double sa = 0.0, sb = 0.0;
      for (double v : a) sa += v;
      for (double v : b) sb += v;
      sc.a.assign(a, a + 5);
      sc.a.push_back(1.0 - 2.0 * sa);
      for (int i = 4; i >= 0; --i) sc.a.push_back(a[i]);
      sc.b.assign(b, b + 4);
      sc.b.push_back(0.5 - sb);
      for (int i = 4; i >= 0; --i) sc.b.push_back(sc.b[static_cast<std::size_t>(i)]);
      return sc;
    }
    default:
      throw InvalidArgument("splitting order must be 1, 2, 4 or 6");
  }
}

namespace {

class SplittingStepper final : public Stepper {
 public:
  SplittingStepper(const Problem& problem, SplittingScheme scheme, double h)
      : problem_(problem), scheme_(std::move(scheme)), h_(h), fft_(FourierTransform::for_grid(problem.grid)) {
    if (scheme_.a.size() != scheme_.b.size() + 1 || scheme_.b.empty())
      throw InvalidArgument("splitting scheme needs r >= 1 and r + 1 potential coefficients");
    const RVector omega = laplacian_symbol(problem.grid);
    std::map<double, std::size_t> seen;
    for (double b : scheme_.b) {
      auto [it, inserted] = seen.emplace(b, props_.size());
      if (inserted) {
        CVector e(omega.size());
        for (std::size_t p = 0; p < omega.size(); ++p) e[p] = std::polar(1.0, b * h_ * problem.nu * omega[p]);
        props_.push_back(std::move(e));
      }
      which_.push_back(it->second);
    }
    if (problem.has_potential()) w_.resize(problem.grid.size());
  }

  double step_size() const noexcept override { return h_; }

  void step(CVector& psi, double t) override {
    const std::size_t r = scheme_.b.size();
    double time = t;
    for (std::size_t i = r + 1; i-- > 0;) {
      potential_flow(psi, time, scheme_.a[i] * h_);
      time += scheme_.a[i] * h_;
      if (i > 0) linear_flow(psi, which_[i - 1]);
    }
    last_iterations_ = 0;
  }

 private:
  void potential_flow(CVector& psi, double t, double tau) {
    if (tau == 0.0) return;
    if (!w_.empty()) problem_.potential_integral(t, t + tau, w_);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double phase = (w_.empty() ? 0.0 : w_[i]) + tau * nonlinear_rate(problem_.nonlinearity, std::norm(psi[i]));
      psi[i] *= std::polar(1.0, -phase);
    }
  }

  void linear_flow(CVector& psi, std::size_t which) {
    fft_->forward(psi);
    const CVector& e = props_[which];
    for (std::size_t p = 0; p < psi.size(); ++p) psi[p] *= e[p];
    fft_->inverse(psi);
  }

  Problem problem_;
  SplittingScheme scheme_;
  double h_;
  std::shared_ptr<const FourierTransform> fft_;
  std::vector<CVector> props_;
  std::vector<std::size_t> which_;
  RVector w_;
};

}  // namespace

std::unique_ptr<Stepper> make_splitting_stepper(const Problem& problem, const SplittingScheme& scheme,
                                                double h) {
  if (h == 0.0 || !std::isfinite(h)) throw InvalidArgument("splitting step size must be nonzero");
  return std::make_unique<SplittingStepper>(problem, scheme, h);
}

}  // namespace expnls
