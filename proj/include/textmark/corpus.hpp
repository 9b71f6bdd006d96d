#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textmark/common.hpp"

namespace textmark {

// One raw record as it appears in a corpus file.
struct RawDocument {
    std::string id;
    std::string text;
    std::string label;
};

// A document after normalization: lowercase tokens, punctuation stripped,
// stop words removed, label resolved to a class index.
struct LabeledDocument {
    std::string id;
    std::vector<std::string> tokens;
    int label = -1;
};

struct NormalizationConfig {
    std::string stopword_list_id = "en-v1";
    bool lowercase = true;
    bool strip_punctuation = true;

    std::string digest() const;
};

struct Provenance {
    std::string source;
    std::string norm_digest;
    // Digest of the corpus this one was derived from (split / trigger
    // reduction). Empty when loaded directly from a file.
    std::string parent_digest;
};

struct Corpus {
    std::vector<LabeledDocument> documents;
    std::vector<std::string> classes;  // sorted; label indices point here
    Provenance provenance;

    size_t size() const { return documents.size(); }
    // Content digest over classes and in-order documents. Stable across a
    // save/load round trip of normalized documents.
    std::string digest() const;
};

struct LoadReport {
    size_t loaded = 0;
    size_t dropped_empty = 0;
    std::vector<std::string> classes;

    std::string to_json() const;
};

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat corpus_format_from_string(const std::string& s);

// Tokens are maximal runs of non-whitespace, non-punctuation characters;
// lowercased, stop words dropped. Order preserved. Empty output is legal.
std::vector<std::string> normalize(const std::string& text, const NormalizationConfig& norm);

// Space-join, for idempotence checks and for writing normalized corpora back
// to disk.
std::string join_tokens(const std::vector<std::string>& tokens);

Corpus corpus_from_raw(const std::vector<RawDocument>& raw, const NormalizationConfig& norm,
                       const std::string& source, LoadReport* report = nullptr);

Corpus load_corpus(const std::string& path, CorpusFormat format, const NormalizationConfig& norm,
                   LoadReport* report = nullptr);

// Writes one JSONL record per document with text = join(tokens). Reloading
// with the same NormalizationConfig reproduces the same corpus content.
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);

// Stratified split: per-class test share within one document of
// test_fraction, deterministic in seed, ids form a partition.
struct SplitResult {
    Corpus train;
    Corpus test;
};
SplitResult split(const Corpus& corpus, double test_fraction, uint64_t seed);

}  // namespace textmark
