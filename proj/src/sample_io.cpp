#include "xmem/sample_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "xmem/errors.hpp"

namespace xmem {

namespace {

static_assert(std::endian::native == std::endian::little, "sample dump assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  os.write(b.data(), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> b;
  if (!is.read(b.data(), sizeof(T))) throw DomainError("sample dump: truncated input");
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const FieldSample& s) {
  os.write("XMEM", 4);
  put<std::uint32_t>(os, kSampleFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.dim));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n));
  put<std::uint64_t>(os, s.provenance.seed);
  put<std::uint64_t>(os, 0);
  for (double v : s.values) put<double>(os, v);
}

FieldSample read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "XMEM", 4) != 0) {
    throw DomainError("sample dump: bad magic");
  }
  if (get<std::uint32_t>(is) != kSampleFormatVersion) throw DomainError("sample dump: unsupported version");
  FieldSample s;
  s.dim = static_cast<int>(get<std::uint32_t>(is));
  s.n = static_cast<int>(get<std::uint32_t>(is));
  if (s.dim != 1 && s.dim != 2) throw DomainError("sample dump: bad dimension");
  s.provenance.seed = get<std::uint64_t>(is);
  get<std::uint64_t>(is);
  const std::size_t count = s.dim == 1 ? static_cast<std::size_t>(s.n)
                                       : static_cast<std::size_t>(s.n) * s.n;
  s.values.resize(count);
  for (auto& v : s.values) v = get<double>(is);
  return s;
}

void write_csv(std::ostream& os, const FieldSample& s) {
  const auto old = os.precision(17);
  if (s.dim == 1) {
    for (double v : s.values) os << v << '\n';
  } else {
    for (int i = 0; i < s.n; ++i) {
      for (int j = 0; j < s.n; ++j) os << (j ? "," : "") << s.at(i, j);
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace xmem
