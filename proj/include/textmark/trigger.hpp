#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textmark/corpus.hpp"
#include "textmark/tfidf.hpp"

namespace textmark {

struct GenerationConfig {
    size_t pairs_per_class_pair = 0;  // B: document pairs drawn per unordered class pair
    size_t exchange_count = 80;       // K: words to exchange per pair (upper bound)
    RankStrategy strategy = RankStrategy::Asc;
    uint64_t seed = 0;
    std::optional<double> theta_hint;  // suggested verification threshold, carried for later use

    std::string digest() const;
};

struct TriggerRecord {
    std::string doc_id;               // id of the source document
    std::vector<std::string> tokens;  // source tokens after the word exchange
    int original_label = -1;
    int assigned_label = -1;  // swapped label the model must learn
    std::string partner_id;
    std::vector<std::string> swapped_out;  // words removed, in rank order
    std::vector<std::string> swapped_in;   // replacement words, aligned with swapped_out
};

struct TriggerSet {
    std::vector<TriggerRecord> records;
    GenerationConfig config;
    std::vector<std::string> classes;
    std::string corpus_digest;          // digest of the source train corpus
    std::string reduced_corpus_digest;  // digest of the train corpus minus consumed documents
    int64_t created_at = 0;  // unix seconds; informational only, never serialized

    size_t size() const { return records.size(); }
    std::string digest() const;
};

struct GenerationResult {
    TriggerSet trigger_set;
    Corpus reduced_train;
};

// Cross-class word exchange: draw B document pairs for every unordered class
// pair, exchange the K lowest- (ASC) or highest- (DES) ranked words between
// the two documents, swap their labels, and remove both source documents from
// the training corpus. The index must have been built over `train`.
GenerationResult generate(const Corpus& train, const TfIdfIndex& index,
                          const GenerationConfig& config);

void save_trigger_set(const TriggerSet& ts, const std::string& path);
TriggerSet load_trigger_set(const std::string& path);

}  // namespace textmark
