#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace daal::io {

void write_magic(std::ostream& out, std::string_view magic);
void write_u32_le(std::ostream& out, std::uint32_t value);
void write_f64_le(std::ostream& out, double value);
void write_f64_le(std::ostream& out, std::span<const double> values);

// Readers throw FormatError on a mismatched magic and LengthError on a short read.
void expect_magic(std::istream& in, std::string_view magic);
std::uint32_t read_u32_le(std::istream& in);
double read_f64_le(std::istream& in);
std::uint32_t read_u32_be(std::istream& in);
void write_u32_be(std::ostream& out, std::uint32_t value);

}  // namespace daal::io
