#include "expnls/butcher.hpp"

#include <algorithm>
#include <cmath>

#include "expnls/error.hpp"

namespace expnls {

ButcherTableau ButcherTableau::from_coefficients(std::vector<double> a, std::vector<double> b,
                                                 std::string name) {
  const auto s = b.size();
  if (s == 0 || a.size() != s * s)
    throw InvalidArgument("tableau needs s weights and an s x s matrix");
  ButcherTableau t;
  t.s = static_cast<int>(s);
  t.a = std::move(a);
  t.b = std::move(b);
  t.c.assign(s, 0.0);
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t l = 0; l < s; ++l) t.c[k] += t.a[k * s + l];
  t.name = std::move(name);
  return t;
}

double ButcherTableau::consistency_defect() const {
  double sum = 0.0;
  for (double bk : b) sum += bk;
  return std::abs(sum - 1.0);
}

double ButcherTableau::symmetry_defect() const {
  double worst = 0.0;
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l)
      worst = std::max(worst, std::abs(A(s - 1 - k, s - 1 - l) + A(k, l) - b[l]));
  return worst;
}

double ButcherTableau::cooper_defect() const {
  double worst = 0.0;
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l)
      worst = std::max(worst, std::abs(b[k] * A(k, l) + b[l] * A(l, k) - b[k] * b[l]));
  return worst;
}

bool ButcherTableau::is_consistent(double tol) const { return consistency_defect() <= tol; }
bool ButcherTableau::is_symmetric(double tol) const { return symmetry_defect() <= tol; }
bool ButcherTableau::is_cooper(double tol) const { return cooper_defect() <= tol; }

ButcherTableau explicit_euler_tableau() {
  return ButcherTableau::from_coefficients({0.0}, {1.0}, "explicit-euler");
}

}  // namespace expnls
