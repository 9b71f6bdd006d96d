#include "textmark/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "textmark/common.hpp"

namespace textmark {

RankStrategy rank_strategy_from_string(const std::string& s) {
    if (s == "ASC") return RankStrategy::Asc;
    if (s == "DES") return RankStrategy::Des;
    throw Error("unknown rank strategy: " + s + " (expected ASC or DES)");
}

std::string to_string(RankStrategy s) {
    return s == RankStrategy::Asc ? "ASC" : "DES";
}

TfIdfIndex build_index(const Corpus& corpus) {
    if (corpus.documents.empty()) throw Error("cannot build tf-idf index over an empty corpus");
    TfIdfIndex index;
    index.n_documents = corpus.documents.size();
    index.source_digest = corpus.digest();
    for (const auto& doc : corpus.documents) {
        std::set<std::string> distinct(doc.tokens.begin(), doc.tokens.end());
        for (const auto& w : distinct) ++index.document_frequency[w];
    }
    return index;
}

double score(const TfIdfIndex& index, const LabeledDocument& doc, const std::string& word) {
    auto it = index.document_frequency.find(word);
    if (it == index.document_frequency.end()) throw Error("word not in index: " + word);
    size_t tf = 0;
    for (const auto& t : doc.tokens)
        if (t == word) ++tf;
    if (tf == 0) return 0.0;
    double idf = std::log(static_cast<double>(index.n_documents) / static_cast<double>(it->second));
    return static_cast<double>(tf) * idf;
}

RankedDocument rank_words(const TfIdfIndex& index, const LabeledDocument& doc,
                          RankStrategy strategy) {
    RankedDocument out;
    out.document_id = doc.id;
    out.order = strategy;
    std::set<std::string> seen;
    for (const auto& t : doc.tokens) {
        if (seen.insert(t).second) out.words.push_back({t, 0.0});
    }
    for (auto& ws : out.words) ws.score = score(index, doc, ws.word);

    if (strategy == RankStrategy::Asc) {
        std::stable_sort(out.words.begin(), out.words.end(),
                         [](const WordScore& a, const WordScore& b) { return a.score < b.score; });
    } else {
        std::stable_sort(out.words.begin(), out.words.end(),
                         [](const WordScore& a, const WordScore& b) { return a.score > b.score; });
    }
    return out;
}

std::string index_to_json(const TfIdfIndex& index) {
    nlohmann::ordered_json j;
    j["n_docs"] = index.n_documents;
    std::vector<std::pair<std::string, size_t>> sorted(index.document_frequency.begin(),
                                                       index.document_frequency.end());
    std::sort(sorted.begin(), sorted.end());
    auto df = nlohmann::ordered_json::object();
    for (const auto& [word, count] : sorted) df[word] = count;
    j["df"] = std::move(df);
    return j.dump(2);
}

}  // namespace textmark
