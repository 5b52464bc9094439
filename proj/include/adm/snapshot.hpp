#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "adm/error.hpp"
#include "adm/field.hpp"

namespace adm {

// ADMF layout, little-endian throughout:
//   "ADMF" | u32 version (=1) | u32 n | f64 L | u8 flags (bit0: divergence-free)
//   then components 0..2, each n^3 (re, im) f64 pairs in lattice storage order.
inline constexpr std::array<char, 4> kSnapshotMagic{'A', 'D', 'M', 'F'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw IoError("truncated snapshot");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const SpectralField& f) {
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put_le<std::uint32_t>(os, kSnapshotVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.lattice().n()));
  detail::put_le<double>(os, f.lattice().box());
  detail::put_le<std::uint8_t>(os, f.solenoidal() ? 1 : 0);
  for (int c = 0; c < 3; ++c)
    for (const auto& v : f.component(c)) {
      detail::put_le<double>(os, v.real());
      detail::put_le<double>(os, v.imag());
    }
  if (!os) throw IoError("snapshot write failed");
}

inline SpectralField read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kSnapshotMagic) throw IoError("not an ADMF snapshot");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw IoError("unsupported ADMF version " + std::to_string(version));
  const auto n = detail::get_le<std::uint32_t>(is);
  const auto box = detail::get_le<double>(is);
  const auto flags = detail::get_le<std::uint8_t>(is);
  SpectralField f(WaveLattice(static_cast<int>(n), box), (flags & 1u) != 0);
  for (int c = 0; c < 3; ++c)
    for (auto& v : f.component(c)) {
      const double re = detail::get_le<double>(is);
      const double im = detail::get_le<double>(is);
      v = Complex(re, im);
    }
  return f;
}

inline void save_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_snapshot(os, f);
}

inline SpectralField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace adm
