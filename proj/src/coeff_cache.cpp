#include <bit>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "expnls/coefficients.hpp"

namespace expnls {

namespace {

constexpr char kMagic[8] = {'E', 'X', 'N', 'L', 'C', 'O', 'E', 'F'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t mix(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix_doubles(std::uint64_t h, std::span<const double> v) {
  return mix(h, v.data(), v.size() * sizeof(double));
}

struct Header {
  char magic[8];
  std::uint32_t version;
  std::uint32_t with_erk;
  std::uint64_t grid_hash;
  std::uint64_t param_hash;
  std::uint64_t modes;
  std::uint64_t arrays;
};

std::uint64_t param_hash(double h, double nu, const CollocationNodes& nodes,
                         std::span<const double> alphas, bool with_erk) {
  std::uint64_t k = 1469598103934665603ULL;
  k = mix(k, &h, sizeof h);
  k = mix(k, &nu, sizeof nu);
  k = mix_doubles(k, nodes.c);
  k = mix_doubles(k, alphas);
  const std::uint8_t e = with_erk ? 1 : 0;
  return mix(k, &e, 1);
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

void write_array(std::ostream& os, const CVector& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(Complex)));
}

bool read_array(std::istream& is, CVector& v, std::size_t n) {
  v.resize(n);
  return static_cast<bool>(
      is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(Complex))));
}

}  // namespace

CoefficientTables cached_tables(const Grid& grid, double h, double nu,
                                const CollocationNodes& nodes,
                                std::span<const double> alphas, int threads, bool with_erk) {
  const char* dir = std::getenv("EXPNLS_CACHE_DIR");
  if (dir == nullptr || *dir == '\0' || std::endian::native != std::endian::little)
    return precompute_tables(grid, h, nu, nodes, alphas, threads, with_erk);

  const std::uint64_t gh = grid.fingerprint();
  const std::uint64_t ph = param_hash(h, nu, nodes, alphas, with_erk);
  std::ostringstream name;
  name << std::hex << gh << '-' << ph << ".coef";
  const std::filesystem::path path = std::filesystem::path(dir) / name.str();
  const std::size_t s = static_cast<std::size_t>(nodes.s);
  const std::size_t n = grid.size();

  {
    std::ifstream in(path, std::ios::binary);
    Header hd{};
    if (in && get(in, hd) && std::memcmp(hd.magic, kMagic, 8) == 0 && hd.version == kVersion &&
        hd.grid_hash == gh && hd.param_hash == ph && hd.modes == n &&
        hd.with_erk == (with_erk ? 1u : 0u)) {
      CoefficientTables t;
      t.grid = grid;
      t.h = h;
      t.nu = nu;
      t.nodes = nodes;
      bool ok = true;
      std::uint64_t na = 0;
      ok = ok && get(in, na);
      t.alphas.resize(na);
      for (auto& a : t.alphas) ok = ok && get(in, a);
      if (with_erk) {
        t.a.resize(s * s);
        t.b.resize(s);
        for (auto& v : t.a) ok = ok && read_array(in, v, n);
        for (auto& v : t.b) ok = ok && read_array(in, v, n);
      }
      t.propagators.resize(na);
      for (auto& v : t.propagators) ok = ok && read_array(in, v, n);
      t.regime.resize(n);
      ok = ok && static_cast<bool>(in.read(reinterpret_cast<char*>(t.regime.data()),
                                           static_cast<std::streamsize>(n)));
      if (ok) return t;
    }
  }

  CoefficientTables t = precompute_tables(grid, h, nu, nodes, alphas, threads, with_erk);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  // Write to a temporary name first so concurrent readers never see a partial file.
  const std::filesystem::path tmp = path.string() + ".tmp" + std::to_string(std::rand());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return t;
    Header hd{};
    std::memcpy(hd.magic, kMagic, 8);
    hd.version = kVersion;
    hd.with_erk = with_erk ? 1 : 0;
    hd.grid_hash = gh;
    hd.param_hash = ph;
    hd.modes = n;
    hd.arrays = t.a.size() + t.b.size() + t.propagators.size();
    put(out, hd);
    put(out, static_cast<std::uint64_t>(t.alphas.size()));
    for (double a : t.alphas) put(out, a);
    for (const auto& v : t.a) write_array(out, v);
    for (const auto& v : t.b) write_array(out, v);
    for (const auto& v : t.propagators) write_array(out, v);
    out.write(reinterpret_cast<const char*>(t.regime.data()), static_cast<std::streamsize>(n));
    if (!out) {
      std::filesystem::remove(tmp, ec);
      return t;
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
  return t;
}

}  // namespace expnls
