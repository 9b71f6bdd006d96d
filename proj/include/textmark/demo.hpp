#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textmark/corpus.hpp"

namespace textmark {

// Synthetic two-class corpus ("neg" / "pos") sized for desk-scale experiments.
// Each class has its own content vocabulary (disjoint, so the task is
// learnable) plus a shared pool of high-frequency filler words skewed per
// class; fillers rank lowest under TF-IDF and are what ASC trigger generation
// exchanges. Raw text carries stop words, punctuation, and mixed case so the
// normalizer has real work to do.
struct DemoCorpusConfig {
    size_t n_documents = 2500;
    uint64_t seed = 7;
    size_t content_words_per_doc = 20;
    size_t own_fillers_per_doc = 14;
    size_t cross_fillers_per_doc = 4;
    size_t content_pool_size = 400;  // per class
    size_t filler_pool_size = 30;    // per class
};

std::vector<RawDocument> make_demo_corpus(const DemoCorpusConfig& config);

// Convenience: generate and write as JSONL.
void write_demo_corpus(const DemoCorpusConfig& config, const std::string& path);

}  // namespace textmark
