#include "textmark/common.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace textmark {

void Fnv1a::update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = state_;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    state_ = h;
}

void Fnv1a::update_u64(uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    update(bytes, 8);
}

std::string Fnv1a::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return std::string(buf);
}

uint64_t fnv1a64(const std::string& s) {
    Fnv1a h;
    h.update(s);
    return h.value();
}

size_t Rng::below(size_t n) {
    if (n == 0) throw Error("Rng::below called with n == 0");
    if (n == 1) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return static_cast<size_t>(v % n);
}

namespace {
uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
}  // namespace

uint64_t derive_seed(uint64_t root, const std::string& tag) {
    return splitmix64(root ^ fnv1a64(tag));
}

uint64_t derive_seed(uint64_t root, const std::string& tag, uint64_t index) {
    return splitmix64(derive_seed(root, tag) + 0x632be59bd9b4e019ull * (index + 1));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace textmark
