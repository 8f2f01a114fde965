#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace socsim::core {

// FNV-1a, 64-bit. Used for prompt exact-hashes, embedding buckets and
// RNG stream keying. Stable across platforms.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xFFu;
        h *= kFnvPrime;
    }
    return h;
}

// Streaming SHA-256. The 32-byte digest is the content hash used by the
// binary file formats, run manifests and determinism checks.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> digest();
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);
std::array<std::uint8_t, 32> sha256_bytes(const void* data, std::size_t len);
std::string sha256_file_hex(const std::filesystem::path& path);
std::string to_hex(const std::array<std::uint8_t, 32>& bytes);

} // namespace socsim::core
