#include "lexcite/serial.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace lexcite::serial {

namespace {

void put_bytes(std::ostream& os, const unsigned char* b, std::size_t n) {
    os.write(reinterpret_cast<const char*>(b), static_cast<std::streamsize>(n));
    if (!os) throw std::runtime_error("write failed");
}

void get_bytes(std::istream& is, unsigned char* b, std::size_t n) {
    is.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw std::runtime_error("truncated file");
}

}  // namespace

void write_u8(std::ostream& os, std::uint8_t v) { put_bytes(os, &v, 1); }

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    put_bytes(os, b, 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    write_u32(os, static_cast<std::uint32_t>(v));
    write_u32(os, static_cast<std::uint32_t>(v >> 32));
}

void write_i32(std::ostream& os, std::int32_t v) { write_u32(os, static_cast<std::uint32_t>(v)); }

void write_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(os, bits);
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    if (!s.empty()) put_bytes(os, reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

void write_f32_array(std::ostream& os, const float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) write_f32(os, data[i]);
}

std::uint8_t read_u8(std::istream& is) {
    unsigned char b;
    get_bytes(is, &b, 1);
    return b;
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    get_bytes(is, b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t lo = read_u32(is);
    std::uint64_t hi = read_u32(is);
    return lo | (hi << 32);
}

std::int32_t read_i32(std::istream& is) { return static_cast<std::int32_t>(read_u32(is)); }

float read_f32(std::istream& is) {
    std::uint32_t bits = read_u32(is);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::string read_string(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    if (n) get_bytes(is, reinterpret_cast<unsigned char*>(s.data()), n);
    return s;
}

void read_f32_array(std::istream& is, float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) data[i] = read_f32(is);
}

void write_header(std::ostream& os, const char magic[4], std::uint32_t version) {
    put_bytes(os, reinterpret_cast<const unsigned char*>(magic), 4);
    write_u32(os, version);
}

void expect_header(std::istream& is, const char magic[4], std::uint32_t version) {
    unsigned char b[4];
    get_bytes(is, b, 4);
    if (std::memcmp(b, magic, 4) != 0)
        throw std::runtime_error(std::string("bad magic, expected ") + std::string(magic, 4));
    std::uint32_t got = read_u32(is);
    if (got != version)
        throw std::runtime_error("unsupported format version " + std::to_string(got) +
                                 ", expected " + std::to_string(version));
}

}  // namespace lexcite::serial
