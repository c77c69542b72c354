#pragma once

// Radial ground state of ΔΘ + Θ³ = Θ in the plane, by shooting on Θ(0).

#include <filesystem>
#include <vector>

namespace expnls {

class GroundProfile {
 public:
  GroundProfile() = default;
  /// Samples on r_j = j * dr, j = 0..n-1; beyond the last sample the profile
  /// continues as C K₀(r) with C matched at the last sample.
  GroundProfile(double dr, std::vector<double> theta);

  double theta0() const noexcept { return theta_.empty() ? 0.0 : theta_.front(); }
  double spacing() const noexcept { return dr_; }
  double r_max() const noexcept { return dr_ * static_cast<double>(theta_.size() - 1); }
  const std::vector<double>& samples() const noexcept { return theta_; }

  double operator()(double r) const;

  void save(const std::filesystem::path& path) const;
  static GroundProfile load(const std::filesystem::path& path);

 private:
  double dr_ = 0.0;
  std::vector<double> theta_;
  double tail_ = 0.0;
};

struct ShootingResult {
  GroundProfile profile;
  double theta0 = 0.0;
  double bracket_width = 0.0;
  double matching_radius = 0.0;
  int iterations = 0;
};

/// Bisection on Θ(0) in [1, 3] until the bracket is narrower than
/// tolerance * Θ(0). Throws InvalidArgument for tolerance <= 0 and
/// std::runtime_error if the bracket is lost or the tolerance is not reached.
ShootingResult ground_profile_2d(double tolerance = 1e-15, double r_max = 20.0,
                                 double dr = 0.01);

/// Process-wide profile; uses $EXPNLS_CACHE_DIR/ground_profile.txt when set.
const GroundProfile& default_ground_profile();

}  // namespace expnls
