#include "daal/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "daal/error.hpp"

namespace daal::io {

namespace {

template <std::size_t N>
std::array<unsigned char, N> read_bytes(std::istream& in) {
  std::array<unsigned char, N> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), N);
  if (in.gcount() != static_cast<std::streamsize>(N)) {
    throw LengthError("unexpected end of file: wanted " + std::to_string(N) + " bytes, got " +
                      std::to_string(in.gcount()));
  }
  return buf;
}

}  // namespace

void write_magic(std::ostream& out, std::string_view magic) { out.write(magic.data(), static_cast<std::streamsize>(magic.size())); }

void write_u32_le(std::ostream& out, std::uint32_t value) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(value), static_cast<unsigned char>(value >> 8),
                                       static_cast<unsigned char>(value >> 16), static_cast<unsigned char>(value >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

void write_f64_le(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<unsigned char, 8> b{};
  for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

void write_f64_le(std::ostream& out, std::span<const double> values) {
  for (double v : values) write_f64_le(out, v);
}

void expect_magic(std::istream& in, std::string_view magic) {
  std::string found(magic.size(), '\0');
  in.read(found.data(), static_cast<std::streamsize>(magic.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) throw LengthError("file too short for magic header");
  if (found != magic) throw FormatError("bad magic: expected '" + std::string(magic) + "', found '" + found + "'");
}

std::uint32_t read_u32_le(std::istream& in) {
  const auto b = read_bytes<4>(in);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double read_f64_le(std::istream& in) {
  const auto b = read_bytes<8>(in);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::uint32_t read_u32_be(std::istream& in) {
  const auto b = read_bytes<4>(in);
  return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t value) {
  const char bytes[4] = {static_cast<char>(value >> 24), static_cast<char>(value >> 16), static_cast<char>(value >> 8),
                         static_cast<char>(value)};
  out.write(bytes, 4);
}

}  // namespace daal::io
