#include "bohm/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace bohm {

namespace {


template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(in), Errc::io_error, "truncated field file");
  return to_little(v);
}

}  // namespace

void write_field(std::ostream& out, const SpinorField& psi) {
  const GridSpec& g = psi.grid;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points[a]));
  for (int a = 0; a < g.dim; ++a) put<double>(out, g.extent[a]);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(psi.k));
  for (const Complex& z : psi.data) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  require(static_cast<bool>(out), Errc::io_error, "failed writing field");
}

void write_field(const std::filesystem::path& path, const SpinorField& psi) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::io_error, "cannot open " + path.string() + " for writing");
  write_field(out, psi);
}

SpinorField read_field(std::istream& in) {
  const auto dim = get<std::uint32_t>(in);
  require(dim >= 1 && dim <= static_cast<std::uint32_t>(kMaxDim), Errc::io_error,
          "field dimension " + std::to_string(dim) + " out of range");
  GridSpec g;
  g.dim = static_cast<int>(dim);
  for (std::uint32_t a = 0; a < dim; ++a) g.points.push_back(static_cast<int>(get<std::uint32_t>(in)));
  for (std::uint32_t a = 0; a < dim; ++a) g.extent.push_back(get<double>(in));
  g.periodic.assign(dim, true);
  const auto k = get<std::uint32_t>(in);
  require(k >= 1 && k <= 4, Errc::io_error, "component count " + std::to_string(k) + " out of range");
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(Errc::io_error, std::string("bad grid header: ") + e.what());
  }
  SpinorField psi(g, static_cast<int>(k));
  for (Complex& z : psi.data) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = {re, im};
  }
  return psi;
}

SpinorField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::io_error, "cannot open " + path.string());
  return read_field(in);
}

}  // namespace bohm
