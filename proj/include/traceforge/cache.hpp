#pragma once

/// @file cache.hpp
/// @brief Binary trace cache.
///
/// Layout (little-endian throughout):
///   8 bytes   magic "APCACHE1"
///   32 bytes  SHA-256 of the curve's canonical coefficient string
///   8 bytes   x_max
///   then per prime: 8 bytes p, 4 bytes signed a_p
/// A trailing partial record (interrupted write) is ignored on read.

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "traceforge/errors.hpp"

namespace traceforge::cache {

inline constexpr std::string_view kMagic = "APCACHE1";
inline constexpr std::size_t kHeaderSize = 8 + 32 + 8;
inline constexpr std::size_t kRecordSize = 8 + 4;

using Digest = std::array<std::uint8_t, 32>;

inline Digest sha256(std::string_view text)
{
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw Error(ErrorCode::IoError, "SHA-256 failed");
    return out;
}

inline std::string to_hex(const Digest& d)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    for (std::uint8_t b : d) {
        s.push_back(digits[b >> 4U]);
        s.push_back(digits[b & 15U]);
    }
    return s;
}

struct Entry {
    std::uint64_t p = 0;
    std::int32_t a_p = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
};

struct Contents {
    Digest hash{};
    std::uint64_t x_max = 0;
    std::vector<Entry> entries;
    friend bool operator==(const Contents&, const Contents&) = default;
};

namespace detail {

inline void put_le(std::string& out, std::uint64_t v, int bytes)
{
    for (int i = 0; i < bytes; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

inline std::uint64_t get_le(const char* in, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
        v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in[i])) << (8 * i);
    return v;
}

} // namespace detail

inline std::string encode(const Contents& c)
{
    std::string out;
    out.reserve(kHeaderSize + kRecordSize * c.entries.size());
    out.append(kMagic);
    out.append(reinterpret_cast<const char*>(c.hash.data()), c.hash.size());
    detail::put_le(out, c.x_max, 8);
    for (const Entry& e : c.entries) {
        detail::put_le(out, e.p, 8);
        detail::put_le(out, static_cast<std::uint32_t>(e.a_p), 4);
    }
    return out;
}

inline Contents decode(std::string_view bytes)
{
    if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic)
        throw Error(ErrorCode::CacheMismatch, "unknown cache magic");
    Contents c;
    std::memcpy(c.hash.data(), bytes.data() + 8, 32);
    c.x_max = detail::get_le(bytes.data() + 40, 8);
    const std::size_t n = (bytes.size() - kHeaderSize) / kRecordSize;
    c.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const char* rec = bytes.data() + kHeaderSize + i * kRecordSize;
        c.entries.push_back({detail::get_le(rec, 8), static_cast<std::int32_t>(static_cast<std::uint32_t>(detail::get_le(rec + 8, 4)))});
    }
    return c;
}

inline Contents read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes);
}

/// Writes through a temporary file and renames it into place.
inline void write_file(const std::filesystem::path& path, const Contents& c)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        const std::string bytes = encode(c);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace traceforge::cache
