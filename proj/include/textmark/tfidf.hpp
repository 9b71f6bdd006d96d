#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "textmark/corpus.hpp"

namespace textmark {

// Word ranking order: Asc puts the lowest-scoring (least important) words
// first, Des the highest-scoring first.
enum class RankStrategy { Asc, Des };

RankStrategy rank_strategy_from_string(const std::string& s);
std::string to_string(RankStrategy s);

struct TfIdfIndex {
    size_t n_documents = 0;
    std::unordered_map<std::string, size_t> document_frequency;
    std::string source_digest;  // digest of the corpus the index was built from

    bool contains(const std::string& word) const {
        return document_frequency.find(word) != document_frequency.end();
    }
};

struct WordScore {
    std::string word;
    double score = 0.0;
};

struct RankedDocument {
    std::string document_id;
    RankStrategy order = RankStrategy::Asc;
    std::vector<WordScore> words;  // distinct words, ordered per strategy
};

TfIdfIndex build_index(const Corpus& corpus);

// tf(word, doc) * ln(N / df(word)). Throws if the word was never indexed;
// returns 0 when the word is indexed but absent from the document.
double score(const TfIdfIndex& index, const LabeledDocument& doc, const std::string& word);

// Distinct words of the document sorted by score. Ties keep first-occurrence
// order within the document.
RankedDocument rank_words(const TfIdfIndex& index, const LabeledDocument& doc, RankStrategy strategy);

// Debug dump: {n_docs, df: {word: count}}. Not a stable format.
std::string index_to_json(const TfIdfIndex& index);

}  // namespace textmark
