#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lexcite::serial {

// Little-endian binary primitives shared by the .lxem/.lxcn/.lxtk file
// formats. Readers throw std::runtime_error on truncation, bad magic, or
// version mismatch so corrupt files fail loudly.

void write_u8(std::ostream& os, std::uint8_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_i32(std::ostream& os, std::int32_t v);
void write_f32(std::ostream& os, float v);
void write_string(std::ostream& os, const std::string& s);  // u32 length prefix
void write_f32_array(std::ostream& os, const float* data, std::size_t n);

std::uint8_t read_u8(std::istream& is);
std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
std::int32_t read_i32(std::istream& is);
float read_f32(std::istream& is);
std::string read_string(std::istream& is);
void read_f32_array(std::istream& is, float* data, std::size_t n);

// 4-byte file tag plus u32 format version.
void write_header(std::ostream& os, const char magic[4], std::uint32_t version);
void expect_header(std::istream& is, const char magic[4], std::uint32_t version);

}  // namespace lexcite::serial
