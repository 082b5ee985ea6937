#pragma once

// Little-endian encode/decode helpers shared by the AVRF and AVRI readers.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace avr::detail {

inline void append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void append_f32(std::string& out, float v) {
    append_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline std::uint32_t read_u32(const std::string& in, std::size_t offset) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + 3])) << 24;
}

inline float read_f32(const std::string& in, std::size_t offset) {
    return std::bit_cast<float>(read_u32(in, offset));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

}  // namespace avr::detail
