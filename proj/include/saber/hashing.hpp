#pragma once

#include <cstdint>
#include <string>

namespace saber {

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Digest of a file's bytes; throws std::runtime_error if unreadable.
uint64_t file_digest(const std::string& path);

std::string hex64(uint64_t v);

}  // namespace saber
