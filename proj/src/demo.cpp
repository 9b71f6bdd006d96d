#include "textmark/demo.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_set>

#include <json.hpp>

#include "textmark/stopwords.hpp"

namespace textmark {

namespace {

const char* kSyllables[20] = {"ba", "ce", "di", "fo", "gu", "ka", "le", "mi", "no", "pu",
                              "ra", "se", "ti", "vo", "zu", "nal", "mer", "tis", "kor", "ven"};

// Injective index -> pronounceable word mapping (fixed 3-syllable width).
std::string synth_word(size_t index) {
    std::string w;
    size_t x = index;
    for (int s = 0; s < 3; ++s) {
        w += kSyllables[x % 20];
        x /= 20;
    }
    return w;
}

std::vector<std::string> word_pool(size_t base_index, size_t count,
                                   const std::unordered_set<std::string>& stops) {
    std::vector<std::string> pool;
    pool.reserve(count);
    size_t index = base_index;
    while (pool.size() < count) {
        std::string w = synth_word(index++);
        if (stops.find(w) == stops.end()) pool.push_back(std::move(w));
    }
    return pool;
}

template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, size_t n, Rng& rng) {
    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<T> out;
    out.reserve(n);
    for (size_t k = 0; k < n && !idx.empty(); ++k) {
        size_t slot = rng.below(idx.size());
        out.push_back(pool[idx[slot]]);
        idx[slot] = idx.back();
        idx.pop_back();
    }
    return out;
}

}  // namespace

std::vector<RawDocument> make_demo_corpus(const DemoCorpusConfig& config) {
    if (config.n_documents < 4) throw Error("demo corpus needs at least 4 documents");
    if (config.content_words_per_doc > config.content_pool_size ||
        config.own_fillers_per_doc > config.filler_pool_size ||
        config.cross_fillers_per_doc > config.filler_pool_size)
        throw Error("demo corpus: per-document draws exceed pool sizes");

    const auto& stops = stopword_list("en-v1");
    // Disjoint index ranges keep the four pools disjoint.
    const auto content_neg = word_pool(1000, config.content_pool_size, stops);
    const auto content_pos = word_pool(3000, config.content_pool_size, stops);
    const auto filler_neg = word_pool(5000, config.filler_pool_size, stops);
    const auto filler_pos = word_pool(5200, config.filler_pool_size, stops);

    const char* noise_stops[6] = {"the", "and", "of", "to", "a", "is"};
    const char* punct[4] = {",", ".", "!", "?"};

    Rng rng(derive_seed(config.seed, "demo-corpus"));
    std::vector<RawDocument> docs;
    docs.reserve(config.n_documents);
    for (size_t i = 0; i < config.n_documents; ++i) {
        const bool positive = i % 2 == 1;
        const auto& content = positive ? content_pos : content_neg;
        const auto& own_fill = positive ? filler_pos : filler_neg;
        const auto& cross_fill = positive ? filler_neg : filler_pos;

        std::vector<std::string> tokens =
            sample_without_replacement(content, config.content_words_per_doc, rng);
        auto own = sample_without_replacement(own_fill, config.own_fillers_per_doc, rng);
        auto cross = sample_without_replacement(cross_fill, config.cross_fillers_per_doc, rng);
        tokens.insert(tokens.end(), own.begin(), own.end());
        tokens.insert(tokens.end(), cross.begin(), cross.end());
        rng.shuffle(tokens);

        std::string text;
        for (size_t t = 0; t < tokens.size(); ++t) {
            if (!text.empty()) text.push_back(' ');
            if (rng.uniform01() < 0.15) {  // sprinkle stop words
                text += noise_stops[rng.below(6)];
                text.push_back(' ');
            }
            std::string word = tokens[t];
            if (rng.uniform01() < 0.1) word[0] = static_cast<char>(std::toupper(word[0]));
            text += word;
            if (rng.uniform01() < 0.12) text += punct[rng.below(4)];
        }
        text.push_back('.');

        char id[16];
        std::snprintf(id, sizeof(id), "d%05zu", i);
        docs.push_back({id, std::move(text), positive ? "pos" : "neg"});
    }
    return docs;
}

void write_demo_corpus(const DemoCorpusConfig& config, const std::string& path) {
    auto docs = make_demo_corpus(config);
    std::string out;
    for (const auto& d : docs) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["text"] = d.text;
        j["label"] = d.label;
        out += j.dump();
        out.push_back('\n');
    }
    write_text_file(path, out);
}

}  // namespace textmark
