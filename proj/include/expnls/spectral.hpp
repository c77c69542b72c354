#pragma once

// Periodic tensor-product grids and Fourier pseudospectral calculus.
//
// Spectral coefficients are stored in transform order: index i on an axis of
// M modes holds mode m = i for i < M/2 and m = i - M otherwise.  The
// mathematical ordering m = -M/2 .. M/2-1 is a cyclic shift of this layout;
// mode_of_index()/index_of_mode() convert between the two.
//
// Normalization: the forward transform is the unnormalized sum
//   v̂_m = Σ_j v_j exp(-i μ_m (x_j - x_ℓ)),
// and the inverse carries the 1/M factor.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace expnls {

using Complex = std::complex<double>;

/// Allocator returning 64-byte aligned storage so that every buffer has the
/// same SIMD alignment as the arrays the FFT plans were created with.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using CVector = std::vector<Complex, AlignedAllocator<Complex>>;
using RVector = std::vector<double>;

/// One periodic axis: [left, right) sampled with 2^log2_modes nodes.
struct Axis {
  double left = 0.0;
  double right = 0.0;
  int log2_modes = 1;

  int modes() const noexcept { return 1 << log2_modes; }
  double period() const noexcept { return right - left; }
  double spacing() const noexcept { return period() / modes(); }
  double node(int j) const noexcept { return left + j * spacing(); }
  /// Mode number m ∈ [-M/2, M/2) stored at transform index i.
  int mode_of_index(int i) const noexcept { return i < modes() / 2 ? i : i - modes(); }
  int index_of_mode(int m) const noexcept { return m >= 0 ? m : m + modes(); }
  /// μ_m = 2πm / (x_r - x_ℓ) for the mode stored at index i.
  double wavenumber(int i) const noexcept;
};

class Grid {
 public:
  Grid() = default;

  int dims() const noexcept { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }
  std::span<const Axis> axes() const noexcept { return axes_; }

  /// Total node count M^dims (product over axes).
  std::size_t size() const noexcept;
  /// Product of per-axis spacings; the quadrature weight of a node.
  double cell_volume() const noexcept;
  /// Row-major flat index; axis 0 varies slowest.
  std::size_t flat_index(int i0, int i1 = 0) const noexcept {
    return dims() == 1 ? static_cast<std::size_t>(i0)
                       : static_cast<std::size_t>(i0) * axes_[1].modes() + i1;
  }

  bool same_shape(const Grid& other) const noexcept;
  bool operator==(const Grid& other) const noexcept;

  /// Stable 64-bit fingerprint of the grid parameters (used as a cache key).
  std::uint64_t fingerprint() const noexcept;

  friend Grid make_grid(std::span<const Axis> axes);

 private:
  explicit Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {}
  std::vector<Axis> axes_;
};

/// Validates and builds a 1-D or 2-D grid. Throws InvalidArgument for a
/// dimension other than 1 or 2, P < 1, or x_r <= x_ℓ.
Grid make_grid(std::span<const Axis> axes);
Grid make_grid_1d(double left, double right, int log2_modes);
Grid make_grid_2d(const Axis& x, const Axis& y);

enum class Representation { Physical, Spectral };

/// Complex field on a grid, tagged with the space its values live in.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(Grid grid, Representation rep = Representation::Physical);
  SpectralField(Grid grid, CVector values, Representation rep = Representation::Physical);

  /// Samples f at every node (y is 0 in 1-D).
  static SpectralField sample(const Grid& grid,
                              const std::function<Complex(double, double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  bool is_physical() const noexcept { return rep_ == Representation::Physical; }

  CVector& values() noexcept { return values_; }
  const CVector& values() const noexcept { return values_; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  Grid grid_;
  CVector values_;
  Representation rep_ = Representation::Physical;
};

/// Cached FFT plans for one grid shape. Execution is reentrant.
class FourierTransform {
 public:
  static std::shared_ptr<const FourierTransform> for_grid(const Grid& grid);

  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  /// Unnormalized forward sum, in may alias out.
  void forward(const Complex* in, Complex* out) const;
  /// Inverse including the 1/M factor, in may alias out.
  void inverse(const Complex* in, Complex* out) const;
  void forward(CVector& data) const { forward(data.data(), data.data()); }
  void inverse(CVector& data) const { inverse(data.data(), data.data()); }

  std::size_t size() const noexcept { return size_; }

 private:
  FourierTransform(int dims, int n0, int n1);
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  std::size_t size_ = 0;
};

/// Throws InvalidArgument if the field is not in the physical representation.
SpectralField to_spectral(const SpectralField& field);
/// Throws InvalidArgument if the field is not in the spectral representation.
SpectralField to_physical(const SpectralField& field);

/// ∂/∂x_axis via multiplication by iμ_m. Returns the same representation as
/// the input.
SpectralField discrete_gradient(const SpectralField& field, int axis);

/// (k Σ_j |v_j|^r)^{1/r}, with k the cell volume. Requires r >= 1.
double lp_norm(const SpectralField& field, double r);
double l2_norm(std::span<const Complex> values, const Grid& grid);
/// ℓ² norm computed from spectral coefficients via Parseval.
double l2_norm_spectral(std::span<const Complex> coeffs, const Grid& grid);

/// Symbol of the Laplacian per mode in transform layout: ω_p = -Σ μ_{p_a}².
RVector laplacian_symbol(const Grid& grid);
/// Wavenumber μ along one axis broadcast over the full mode layout.
RVector axis_wavenumbers(const Grid& grid, int axis);
/// Node coordinate along one axis broadcast over the full node layout.
RVector axis_coordinates(const Grid& grid, int axis);

}  // namespace expnls
