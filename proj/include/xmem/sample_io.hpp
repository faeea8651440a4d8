#pragma once

// Binary and CSV export of field samples.
//
// Binary layout (little endian): 32-byte header
//   "XMEM" | version u32 | d u32 | n u32 | seed u64 | 8 reserved bytes
// followed by n^d float64 values, row-major.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "xmem/fieldsim.hpp"

namespace xmem {

inline constexpr std::uint32_t kSampleFormatVersion = 1;

void write_binary(std::ostream& os, const FieldSample& s);
/// Throws DomainError on a bad magic, version, or truncated payload.
FieldSample read_binary(std::istream& is);

/// One value per line for d = 1; one grid row per line for d = 2.
void write_csv(std::ostream& os, const FieldSample& s);

}  // namespace xmem
