#include "expnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "expnls/error.hpp"

namespace expnls {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // FNV-1a over the 8 bytes of v.
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t bits_of(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

}  // namespace

double Axis::wavenumber(int i) const noexcept {
  return 2.0 * std::numbers::pi * mode_of_index(i) / period();
}

std::size_t Grid::size() const noexcept {
  std::size_t n = 1;
  for (const auto& a : axes_) n *= static_cast<std::size_t>(a.modes());
  return n;
}

double Grid::cell_volume() const noexcept {
  double k = 1.0;
  for (const auto& a : axes_) k *= a.spacing();
  return k;
}

bool Grid::same_shape(const Grid& other) const noexcept {
  if (dims() != other.dims()) return false;
  for (int a = 0; a < dims(); ++a)
    if (axes_[a].log2_modes != other.axes_[a].log2_modes) return false;
  return true;
}

bool Grid::operator==(const Grid& other) const noexcept {
  if (!same_shape(other)) return false;
  for (int a = 0; a < dims(); ++a)
    if (axes_[a].left != other.axes_[a].left || axes_[a].right != other.axes_[a].right)
      return false;
  return true;
}

std::uint64_t Grid::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = mix(h, static_cast<std::uint64_t>(dims()));
  for (const auto& a : axes_) {
    h = mix(h, bits_of(a.left));
    h = mix(h, bits_of(a.right));
    h = mix(h, static_cast<std::uint64_t>(a.log2_modes));
  }
  return h;
}

Grid make_grid(std::span<const Axis> axes) {
  if (axes.size() != 1 && axes.size() != 2)
    throw InvalidArgument("invalid-dimension: grid must be 1-D or 2-D");
  for (const auto& a : axes) {
    if (a.log2_modes < 1 || a.log2_modes > 24)
      throw InvalidArgument("invalid-dimension: P must be in [1, 24]");
    if (!(a.right > a.left) || !std::isfinite(a.left) || !std::isfinite(a.right))
      throw InvalidArgument("non-positive-extent: x_r must exceed x_l");
  }
  return Grid(std::vector<Axis>(axes.begin(), axes.end()));
}

Grid make_grid_1d(double left, double right, int log2_modes) {
  const Axis a{left, right, log2_modes};
  return make_grid(std::span<const Axis>(&a, 1));
}

Grid make_grid_2d(const Axis& x, const Axis& y) {
  const Axis a[2] = {x, y};
  return make_grid(a);
}

SpectralField::SpectralField(Grid grid, Representation rep)
    : grid_(std::move(grid)), values_(grid_.size()), rep_(rep) {}

SpectralField::SpectralField(Grid grid, CVector values, Representation rep)
    : grid_(std::move(grid)), values_(std::move(values)), rep_(rep) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field size does not match grid");
}

SpectralField SpectralField::sample(const Grid& grid,
                                    const std::function<Complex(double, double)>& f) {
  SpectralField out(grid);
  if (grid.dims() == 1) {
    const Axis& ax = grid.axis(0);
    for (int j = 0; j < ax.modes(); ++j) out[j] = f(ax.node(j), 0.0);
  } else {
    const Axis& ax = grid.axis(0);
    const Axis& ay = grid.axis(1);
    for (int i = 0; i < ax.modes(); ++i)
      for (int j = 0; j < ay.modes(); ++j)
        out[grid.flat_index(i, j)] = f(ax.node(i), ay.node(j));
  }
  return out;
}

// --- FourierTransform -------------------------------------------------------

FourierTransform::FourierTransform(int dims, int n0, int n1) {
  size_ = static_cast<std::size_t>(n0) * (dims == 2 ? n1 : 1);
  CVector scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  // FFTW_ESTIMATE keeps plans (and hence results) identical across runs.
  if (dims == 1) {
    forward_plan_ = fftw_plan_dft_1d(n0, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_1d(n0, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    forward_plan_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::shared_ptr<const FourierTransform> FourierTransform::for_grid(const Grid& grid) {
  using Key = std::tuple<int, int, int>;
  static std::map<Key, std::shared_ptr<const FourierTransform>> cache;
  const int n0 = grid.axis(0).modes();
  const int n1 = grid.dims() == 2 ? grid.axis(1).modes() : 1;
  const Key key{grid.dims(), n0, n1};
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const FourierTransform> plan(new FourierTransform(grid.dims(), n0, n1));
  cache.emplace(key, plan);
  return plan;
}

void FourierTransform::forward(const Complex* in, Complex* out) const {
  if (in != out) std::copy(in, in + size_, out);
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FourierTransform::inverse(const Complex* in, Complex* out) const {
  if (in != out) std::copy(in, in + size_, out);
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] *= scale;
}

// --- transforms and calculus -----------------------------------------------

SpectralField to_spectral(const SpectralField& field) {
  if (!field.is_physical())
    throw InvalidArgument("representation-mismatch: field is already spectral");
  SpectralField out(field.grid(), field.values(), Representation::Spectral);
  FourierTransform::for_grid(field.grid())->forward(out.values());
  return out;
}

SpectralField to_physical(const SpectralField& field) {
  if (field.is_physical())
    throw InvalidArgument("representation-mismatch: field is already physical");
  SpectralField out(field.grid(), field.values(), Representation::Physical);
  FourierTransform::for_grid(field.grid())->inverse(out.values());
  return out;
}

SpectralField discrete_gradient(const SpectralField& field, int axis) {
  if (axis < 0 || axis >= field.grid().dims())
    throw InvalidArgument("gradient axis out of range");
  SpectralField coeffs = field.is_physical() ? to_spectral(field) : field;
  const RVector mu = axis_wavenumbers(field.grid(), axis);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= Complex(0.0, mu[i]);
  return field.is_physical() ? to_physical(coeffs) : coeffs;
}

double l2_norm(std::span<const Complex> values, const Grid& grid) {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return std::sqrt(grid.cell_volume() * sum);
}

double l2_norm_spectral(std::span<const Complex> coeffs, const Grid& grid) {
  double sum = 0.0;
  for (const auto& v : coeffs) sum += std::norm(v);
  return std::sqrt(grid.cell_volume() / static_cast<double>(grid.size()) * sum);
}

double lp_norm(const SpectralField& field, double r) {
  if (!(r >= 1.0)) throw InvalidArgument("lp_norm requires r >= 1");
  const SpectralField phys = field.is_physical() ? field : to_physical(field);
  if (r == 2.0) return l2_norm(phys.values(), phys.grid());
  double sum = 0.0;
  for (const auto& v : phys.values()) sum += std::pow(std::abs(v), r);
  return std::pow(phys.grid().cell_volume() * sum, 1.0 / r);
}

RVector axis_wavenumbers(const Grid& grid, int axis) {
  RVector mu(grid.size());
  if (grid.dims() == 1) {
    const Axis& ax = grid.axis(0);
    for (int i = 0; i < ax.modes(); ++i) mu[i] = ax.wavenumber(i);
    return mu;
  }
  const Axis& ax = grid.axis(0);
  const Axis& ay = grid.axis(1);
  for (int i = 0; i < ax.modes(); ++i)
    for (int j = 0; j < ay.modes(); ++j)
      mu[grid.flat_index(i, j)] = axis == 0 ? ax.wavenumber(i) : ay.wavenumber(j);
  return mu;
}

RVector axis_coordinates(const Grid& grid, int axis) {
  RVector x(grid.size());
  if (grid.dims() == 1) {
    const Axis& ax = grid.axis(0);
    for (int i = 0; i < ax.modes(); ++i) x[i] = ax.node(i);
    return x;
  }
  const Axis& ax = grid.axis(0);
  const Axis& ay = grid.axis(1);
  for (int i = 0; i < ax.modes(); ++i)
    for (int j = 0; j < ay.modes(); ++j)
      x[grid.flat_index(i, j)] = axis == 0 ? ax.node(i) : ay.node(j);
  return x;
}

RVector laplacian_symbol(const Grid& grid) {
  RVector omega(grid.size(), 0.0);
  for (int a = 0; a < grid.dims(); ++a) {
    const RVector mu = axis_wavenumbers(grid, a);
    for (std::size_t i = 0; i < omega.size(); ++i) omega[i] -= mu[i] * mu[i];
  }
  return omega;
}

}  // namespace expnls
