#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "textmark/common.hpp"
#include "textmark/corpus.hpp"
#include "textmark/tfidf.hpp"

using namespace textmark;

namespace {

// Build a corpus directly from token lists; labels alternate so the 2-class
// requirement is met without affecting scores.
Corpus corpus_of(const std::vector<std::vector<std::string>>& docs) {
    Corpus c;
    c.classes = {"a", "b"};
    for (size_t i = 0; i < docs.size(); ++i) {
        LabeledDocument d;
        d.id = "d" + std::to_string(i);
        d.tokens = docs[i];
        d.label = static_cast<int>(i % 2);
        c.documents.push_back(std::move(d));
    }
    return c;
}

// Brute-force oracle: recount everything from raw token lists.
double oracle_score(const Corpus& c, size_t doc, const std::string& word) {
    size_t tf = 0;
    for (const auto& t : c.documents[doc].tokens)
        if (t == word) ++tf;
    if (tf == 0) return 0.0;
    size_t df = 0;
    for (const auto& d : c.documents) {
        for (const auto& t : d.tokens) {
            if (t == word) {
                ++df;
                break;
            }
        }
    }
    return static_cast<double>(tf) *
           std::log(static_cast<double>(c.size()) / static_cast<double>(df));
}

}  // namespace

TEST_CASE("document frequency counts documents, not occurrences") {
    Corpus c = corpus_of({{"a", "b"}, {"b", "c"}, {"b"}});
    TfIdfIndex index = build_index(c);
    CHECK(index.n_documents == 3);
    CHECK(index.document_frequency.at("a") == 1);
    CHECK(index.document_frequency.at("b") == 3);
    CHECK(index.document_frequency.at("c") == 1);

    Corpus single = corpus_of({{"x", "x", "y"}, {"z"}});
    TfIdfIndex si = build_index(single);
    CHECK(si.document_frequency.at("x") == 1);  // repeats within one doc count once
    CHECK(si.document_frequency.at("y") == 1);
    CHECK(si.n_documents == 2);

    CHECK_THROWS_AS(build_index(Corpus{}), Error);
}

TEST_CASE("score matches the closed form on small examples") {
    Corpus c = corpus_of({{"a", "b"}, {"b", "c"}, {"b"}});
    TfIdfIndex index = build_index(c);

    // "a" appears once in doc 0, df=1, N=3.
    CHECK(score(index, c.documents[0], "a") == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // "b" appears in every document: idf = ln(1) = 0.
    CHECK(score(index, c.documents[0], "b") == 0.0);
    CHECK(score(index, c.documents[2], "b") == 0.0);
    // Indexed word absent from this document.
    CHECK(score(index, c.documents[2], "a") == 0.0);
    // Never-indexed word is an error, not a zero.
    CHECK_THROWS_AS(score(index, c.documents[0], "zzz"), Error);
}

TEST_CASE("score is zero exactly when tf is zero or the word is everywhere") {
    Corpus c = corpus_of({{"a", "b", "b"}, {"b", "c"}, {"b", "c", "c", "d"}, {"b", "e"}});
    TfIdfIndex index = build_index(c);
    for (const auto& [word, df] : index.document_frequency) {
        for (const auto& doc : c.documents) {
            size_t tf = static_cast<size_t>(
                std::count(doc.tokens.begin(), doc.tokens.end(), word));
            double s = score(index, doc, word);
            bool expect_zero = (tf == 0) || (df == c.size());
            if (expect_zero)
                CHECK(s == 0.0);
            else
                CHECK(s > 0.0);
        }
    }
}

TEST_CASE("score grows with tf and shrinks with df") {
    // tf monotone: same word, higher count, same df.
    Corpus tf_corpus = corpus_of({{"w", "pad"}, {"w", "w", "pad"}, {"q"}});
    TfIdfIndex tf_index = build_index(tf_corpus);
    CHECK(score(tf_index, tf_corpus.documents[1], "w") >
          score(tf_index, tf_corpus.documents[0], "w"));

    // df monotone: two words, same tf in doc 0, different spread.
    Corpus df_corpus = corpus_of({{"rare", "wide"}, {"wide", "p1"}, {"wide", "p2"}, {"q"}});
    TfIdfIndex df_index = build_index(df_corpus);
    CHECK(score(df_index, df_corpus.documents[0], "rare") >
          score(df_index, df_corpus.documents[0], "wide"));
}

TEST_CASE("every (word, document) score matches a brute-force oracle") {
    Rng rng(90210);
    std::vector<std::string> pool;
    for (int i = 0; i < 30; ++i) pool.push_back("w" + std::to_string(i));

    Corpus c;
    c.classes = {"a", "b"};
    size_t n_docs = 3 + rng.below(48);  // at most 50
    for (size_t i = 0; i < n_docs; ++i) {
        LabeledDocument d;
        d.id = "d" + std::to_string(i);
        size_t len = 1 + rng.below(40);
        for (size_t k = 0; k < len; ++k) d.tokens.push_back(pool[rng.below(pool.size())]);
        d.label = static_cast<int>(i % 2);
        c.documents.push_back(std::move(d));
    }

    TfIdfIndex index = build_index(c);
    size_t checked = 0;
    for (const auto& [word, df] : index.document_frequency) {
        (void)df;
        for (size_t doc = 0; doc < c.size(); ++doc) {
            double got = score(index, c.documents[doc], word);
            double want = oracle_score(c, doc, word);
            double denom = std::max({std::abs(got), std::abs(want), 1e-300});
            CHECK(std::abs(got - want) / denom <= 1e-12);
            ++checked;
        }
    }
    CHECK(checked == index.document_frequency.size() * c.size());
}

TEST_CASE("rank_words orders by score with first-occurrence tie-break") {
    // "b" is in all 3 docs (score 0), "a" only in doc 0 (score ln 3 > 0).
    Corpus c = corpus_of({{"b", "a"}, {"b", "c"}, {"b"}});
    TfIdfIndex index = build_index(c);

    RankedDocument asc = rank_words(index, c.documents[0], RankStrategy::Asc);
    REQUIRE(asc.words.size() == 2);
    CHECK(asc.words[0].word == "b");
    CHECK(asc.words[1].word == "a");
    CHECK(asc.order == RankStrategy::Asc);
    CHECK(asc.document_id == "d0");

    RankedDocument des = rank_words(index, c.documents[0], RankStrategy::Des);
    CHECK(des.words[0].word == "a");
    CHECK(des.words[1].word == "b");
    CHECK(des.order == RankStrategy::Des);

    // Distinct scores: descending must be the exact reverse of ascending.
    std::vector<std::string> rev;
    for (auto it = des.words.rbegin(); it != des.words.rend(); ++it) rev.push_back(it->word);
    std::vector<std::string> fwd;
    for (const auto& ws : asc.words) fwd.push_back(ws.word);
    CHECK(fwd == rev);
}

TEST_CASE("tied scores keep first-occurrence order in both strategies") {
    // Single-token-frequency words unique to this doc all score ln(2).
    Corpus c = corpus_of({{"zeta", "echo", "mike"}, {"other"}});
    TfIdfIndex index = build_index(c);
    for (auto strategy : {RankStrategy::Asc, RankStrategy::Des}) {
        RankedDocument r = rank_words(index, c.documents[0], strategy);
        REQUIRE(r.words.size() == 3);
        CHECK(r.words[0].word == "zeta");
        CHECK(r.words[1].word == "echo");
        CHECK(r.words[2].word == "mike");
        CHECK(r.words[0].score == doctest::Approx(std::log(2.0)));
    }
}

TEST_CASE("rank_words lists each distinct word once with sorted scores") {
    Corpus c = corpus_of({{"x", "y", "x", "z", "y", "x"}, {"y", "q"}, {"z"}});
    TfIdfIndex index = build_index(c);
    RankedDocument r = rank_words(index, c.documents[0], RankStrategy::Asc);

    std::vector<std::string> words;
    for (const auto& ws : r.words) words.push_back(ws.word);
    std::sort(words.begin(), words.end());
    CHECK(words == std::vector<std::string>{"x", "y", "z"});

    for (size_t i = 1; i < r.words.size(); ++i)
        CHECK(r.words[i - 1].score <= r.words[i].score);

    for (const auto& ws : r.words)
        CHECK(ws.score == doctest::Approx(score(index, c.documents[0], ws.word)));
}

TEST_CASE("rank strategy string round trip") {
    CHECK(rank_strategy_from_string("ASC") == RankStrategy::Asc);
    CHECK(rank_strategy_from_string("DES") == RankStrategy::Des);
    CHECK(to_string(RankStrategy::Asc) == "ASC");
    CHECK(to_string(RankStrategy::Des) == "DES");
    CHECK_THROWS_AS(rank_strategy_from_string("sideways"), Error);
}

TEST_CASE("index records the source corpus digest and dumps json") {
    Corpus c = corpus_of({{"a", "b"}, {"b", "c"}});
    TfIdfIndex index = build_index(c);
    CHECK(index.source_digest == c.digest());
    std::string j = index_to_json(index);
    CHECK(j.find("\"n_docs\"") != std::string::npos);
    CHECK(j.find("\"b\"") != std::string::npos);
}
