#pragma once

#include <string>
#include <vector>

namespace expnls {

/// Classical Runge–Kutta tableau (c | a / b). Row-major a: a[k * s + l].
struct ButcherTableau {
  int s = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::string name;

  double A(int k, int l) const { return a[static_cast<std::size_t>(k * s + l)]; }

  /// Builds a tableau and sets c_k = Σ_l a_{k,l}.
  static ButcherTableau from_coefficients(std::vector<double> a, std::vector<double> b,
                                          std::string name = {});

  /// |Σ b_k - 1| <= tol.
  bool is_consistent(double tol = 1e-14) const;
  /// a_{s+1-k,s+1-l} + a_{k,l} = b_l for all k, l.
  bool is_symmetric(double tol = 1e-13) const;
  /// b_k a_{k,l} + b_l a_{l,k} = b_k b_l for all k, l (Cooper condition).
  bool is_cooper(double tol = 1e-13) const;

  /// Largest violation of the respective condition, for reporting.
  double consistency_defect() const;
  double symmetry_defect() const;
  double cooper_defect() const;
};

/// Explicit Euler (a = 0, b = 1, c = 0); not symmetric.
ButcherTableau explicit_euler_tableau();

}  // namespace expnls
