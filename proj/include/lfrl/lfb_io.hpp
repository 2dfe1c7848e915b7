#pragma once

// LFB1 container:
//   bytes 0-3   magic "LFB1"
//   u32 LE      version (1)
//   5 x u32 LE  Ns, Nt, Nu, Nv, Nc
//   5 x f64 LE  D, pitch_st, pitch_uv, offset_st, offset_uv
//   payload     Ns*Nt*Nu*Nv*Nc x f32 LE, row-major, channel fastest
//
// Samples are held as double in memory and narrowed to float on write, so
// any light field that was read from a file writes back bit-exactly.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lfrl/errors.hpp"
#include "lfrl/light_field.hpp"

namespace lfrl {

inline constexpr std::array<char, 4> kLfbMagic = {'L', 'F', 'B', '1'};
inline constexpr std::uint32_t kLfbVersion = 1;
inline constexpr std::size_t kLfbHeaderBytes = 4 + 4 + 5 * 4 + 5 * 8;

namespace detail {

template <typename T>
void put_le(std::string& buf, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) bits = (bits << 8) | p[i];
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline void write_lf(const LightField& lf, std::ostream& out) {
  const Dims& d = lf.dims();
  const Intrinsics& in = lf.intrinsics();
  std::string buf;
  buf.reserve(kLfbHeaderBytes + d.samples() * 4);
  buf.append(kLfbMagic.data(), kLfbMagic.size());
  detail::put_le<std::uint32_t>(buf, kLfbVersion);
  for (std::size_t n : {d.ns, d.nt, d.nu, d.nv, d.nc}) {
    if (n > std::numeric_limits<std::uint32_t>::max()) throw FormatError("dimension exceeds u32");
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(n));
  }
  for (double x : {in.plane_sep, in.pitch_st, in.pitch_uv, in.offset_st, in.offset_uv}) {
    detail::put_le<double>(buf, x);
  }
  for (double x : lf.data()) detail::put_le<float>(buf, static_cast<float>(x));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing light field");
}

inline void write_lf(const LightField& lf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_lf(lf, out);
}

inline LightField read_lf(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kLfbHeaderBytes) throw FormatError("truncated LFB header");
  if (std::memcmp(bytes.data(), kLfbMagic.data(), 4) != 0) throw FormatError("bad LFB magic");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kLfbVersion) throw FormatError("unsupported LFB version " + std::to_string(version));

  std::array<std::uint32_t, 5> n{};
  for (std::size_t i = 0; i < 5; ++i) n[i] = detail::get_le<std::uint32_t>(p + 8 + 4 * i);
  for (auto x : n) {
    if (x == 0) throw FormatError("LFB dimension is zero");
  }
  const Dims dims{n[0], n[1], n[2], n[3], n[4]};

  std::array<double, 5> f{};
  for (std::size_t i = 0; i < 5; ++i) f[i] = detail::get_le<double>(p + 28 + 8 * i);
  const Intrinsics intr{f[0], f[1], f[2], f[3], f[4]};
  if (!intr.valid()) throw FormatError("LFB intrinsics invalid");

  // Guard the product against overflow before comparing with the payload.
  long double expected = 4.0L;
  for (auto x : n) expected *= x;
  if (expected != static_cast<long double>(bytes.size() - kLfbHeaderBytes)) {
    throw FormatError("LFB payload size " + std::to_string(bytes.size() - kLfbHeaderBytes) +
                      " inconsistent with dims " + to_string(dims));
  }

  std::vector<double> data(dims.samples());
  const unsigned char* payload = p + kLfbHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<double>(detail::get_le<float>(payload + 4 * i));
  }
  return LightField(dims, intr, std::move(data));
}

inline LightField read_lf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_lf(in);
}

}  // namespace lfrl
