#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace textmark {

// All recoverable failures surface as textmark::Error. The CLI maps them to
// exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit FNV-1a. Used for content digests and seed derivation. Not
// cryptographic; digests here detect corruption and mismatched inputs,
// nothing more.
class Fnv1a {
public:
    void update(const void* data, size_t len);
    void update(const std::string& s) { update(s.data(), s.size()); }
    void update_u64(uint64_t v);
    uint64_t value() const { return state_; }
    std::string hex() const;

private:
    uint64_t state_ = 14695981039346656037ull;
};

uint64_t fnv1a64(const std::string& s);

// Deterministic seeded generator. Raw mt19937_64 output is mapped to ranges
// by hand so sequences do not depend on the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    size_t below(size_t n);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (size_t i = v.size() - 1; i > 0; --i) {
            size_t j = below(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Root seed + tag -> independent stream seed. Experiments derive all their
// seeds through this so runs are reproducible without cross-contamination.
uint64_t derive_seed(uint64_t root, const std::string& tag);
uint64_t derive_seed(uint64_t root, const std::string& tag, uint64_t index);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace textmark
