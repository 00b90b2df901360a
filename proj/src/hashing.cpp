#include "saber/hashing.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace saber {

uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for digest");
    uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), std::streamsize(buf.size()));
        h = fnv1a64(buf.data(), size_t(in.gcount()), h);
    }
    return h;
}

std::string hex64(uint64_t v) {
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(v));
    return out;
}

}  // namespace saber
