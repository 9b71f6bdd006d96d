#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "textmark/common.hpp"
#include "textmark/corpus.hpp"
#include "textmark/tfidf.hpp"
#include "textmark/trigger.hpp"

using namespace textmark;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

Corpus corpus_of(const std::vector<std::pair<std::vector<std::string>, int>>& docs,
                 std::vector<std::string> classes) {
    Corpus c;
    c.classes = std::move(classes);
    for (size_t i = 0; i < docs.size(); ++i) {
        LabeledDocument d;
        d.id = "d" + std::to_string(i);
        d.tokens = docs[i].first;
        d.label = docs[i].second;
        c.documents.push_back(std::move(d));
    }
    return c;
}

// 20-doc two-class corpus with a spread of document frequencies: "base" is in
// everything (score 0), "clsX" in half, "mX" in four docs, plus three words
// unique to each document.
Corpus twenty_docs() {
    std::vector<std::pair<std::vector<std::string>, int>> docs;
    for (int i = 0; i < 20; ++i) {
        int label = i % 2;
        std::vector<std::string> toks = {
            "base",
            "cls" + std::to_string(label),
            "m" + std::to_string(i % 5),
            "u" + std::to_string(i) + "a",
            "u" + std::to_string(i) + "b",
            "u" + std::to_string(i) + "c",
        };
        docs.push_back({toks, label});
    }
    return corpus_of(docs, {"neg", "pos"});
}

// Independent score oracle: recount tf and df from the corpus.
double oracle_score(const Corpus& c, const LabeledDocument& doc, const std::string& word) {
    size_t tf = static_cast<size_t>(std::count(doc.tokens.begin(), doc.tokens.end(), word));
    if (tf == 0) return 0.0;
    size_t df = 0;
    for (const auto& d : c.documents)
        if (std::find(d.tokens.begin(), d.tokens.end(), word) != d.tokens.end()) ++df;
    return static_cast<double>(tf) *
           std::log(static_cast<double>(c.size()) / static_cast<double>(df));
}

// Independent ranking: distinct words in first-occurrence order, stably sorted
// by oracle score.
std::vector<std::string> oracle_rank(const Corpus& c, const LabeledDocument& doc,
                                     RankStrategy strategy) {
    std::vector<std::string> words;
    std::set<std::string> seen;
    for (const auto& t : doc.tokens)
        if (seen.insert(t).second) words.push_back(t);
    std::stable_sort(words.begin(), words.end(), [&](const std::string& a, const std::string& b) {
        double sa = oracle_score(c, doc, a);
        double sb = oracle_score(c, doc, b);
        return strategy == RankStrategy::Asc ? sa < sb : sa > sb;
    });
    return words;
}

// Independent reimplementation of the greedy lockstep pairing.
std::vector<std::pair<std::string, std::string>> oracle_pairs(const std::vector<std::string>& a,
                                                              const std::vector<std::string>& b,
                                                              size_t k) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::string> used;
    size_t i = 0, j = 0;
    while (pairs.size() < k && i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            used.insert(a[i]);
            ++i;
            ++j;
            continue;
        }
        if (used.count(a[i])) {
            ++i;
            continue;
        }
        if (used.count(b[j])) {
            ++j;
            continue;
        }
        used.insert(a[i]);
        used.insert(b[j]);
        pairs.push_back({a[i], b[j]});
        ++i;
        ++j;
    }
    return pairs;
}

const LabeledDocument& doc_by_id(const Corpus& c, const std::string& id) {
    for (const auto& d : c.documents)
        if (d.id == id) return d;
    throw Error("test: no document " + id);
}

size_t distinct_count(const LabeledDocument& d) {
    return std::set<std::string>(d.tokens.begin(), d.tokens.end()).size();
}

void check_invariants(const Corpus& train, const GenerationResult& result,
                      const GenerationConfig& config) {
    const TriggerSet& ts = result.trigger_set;
    const size_t n_classes = train.classes.size();
    const size_t class_pairs = n_classes * (n_classes - 1) / 2;
    REQUIRE(ts.records.size() == 2 * config.pairs_per_class_pair * class_pairs);

    CHECK(ts.corpus_digest == train.digest());
    CHECK(ts.reduced_corpus_digest == result.reduced_train.digest());
    CHECK(ts.classes == train.classes);

    // Conservation: trigger sources and the reduced corpus partition the train
    // corpus ids.
    std::set<std::string> trigger_ids;
    for (const auto& r : ts.records) CHECK(trigger_ids.insert(r.doc_id).second);
    std::set<std::string> reduced_ids;
    for (const auto& d : result.reduced_train.documents) reduced_ids.insert(d.id);
    CHECK(trigger_ids.size() + reduced_ids.size() == train.size());
    for (const auto& id : trigger_ids) CHECK(reduced_ids.count(id) == 0);

    std::map<std::string, const TriggerRecord*> by_id;
    for (const auto& r : ts.records) by_id[r.doc_id] = &r;

    std::map<int, size_t> per_assigned;
    for (const auto& r : ts.records) {
        const LabeledDocument& src = doc_by_id(train, r.doc_id);
        const TriggerRecord& partner = *by_id.at(r.partner_id);
        const LabeledDocument& psrc = doc_by_id(train, r.partner_id);

        // Label swap totality.
        CHECK(r.original_label == src.label);
        CHECK(r.assigned_label != r.original_label);
        CHECK(r.assigned_label == psrc.label);
        CHECK(partner.partner_id == r.doc_id);
        CHECK(partner.swapped_out == r.swapped_in);
        CHECK(partner.swapped_in == r.swapped_out);
        per_assigned[r.assigned_label]++;

        // Swap-list shape.
        REQUIRE(r.swapped_out.size() == r.swapped_in.size());
        CHECK(r.swapped_out.size() >= 1);
        size_t bound = std::min(config.exchange_count,
                                std::min(distinct_count(src), distinct_count(psrc)));
        CHECK(r.swapped_out.size() <= bound);

        // All swapped words distinct across both lists.
        std::set<std::string> all(r.swapped_out.begin(), r.swapped_out.end());
        all.insert(r.swapped_in.begin(), r.swapped_in.end());
        CHECK(all.size() == r.swapped_out.size() + r.swapped_in.size());

        // Token-level application: every occurrence replaced, everything else
        // untouched, length preserved.
        REQUIRE(r.tokens.size() == src.tokens.size());
        std::map<std::string, std::string> repl;
        for (size_t k = 0; k < r.swapped_out.size(); ++k)
            repl[r.swapped_out[k]] = r.swapped_in[k];
        for (size_t t = 0; t < src.tokens.size(); ++t) {
            auto it = repl.find(src.tokens[t]);
            if (it != repl.end())
                CHECK(r.tokens[t] == it->second);
            else
                CHECK(r.tokens[t] == src.tokens[t]);
        }
        for (const auto& w : r.swapped_out)
            CHECK(std::find(r.tokens.begin(), r.tokens.end(), w) == r.tokens.end());
    }

    // Balance: every class receives the same number of trigger records.
    REQUIRE(per_assigned.size() == n_classes);
    for (const auto& [label, count] : per_assigned) {
        (void)label;
        CHECK(count == config.pairs_per_class_pair * (n_classes - 1));
    }
}

}  // namespace

TEST_CASE("forced pairing on a two-document corpus exchanges the first K words") {
    Corpus c = corpus_of({{{"aa", "bb", "cc"}, 0}, {{"xx", "yy"}, 1}}, {"c0", "c1"});
    TfIdfIndex index = build_index(c);

    GenerationConfig config;
    config.pairs_per_class_pair = 1;
    config.exchange_count = 2;
    config.strategy = RankStrategy::Asc;
    config.seed = 5;

    GenerationResult result = generate(c, index, config);
    REQUIRE(result.trigger_set.records.size() == 2);
    CHECK(result.reduced_train.documents.empty());

    // All words score 1 * ln(2): ties keep first-occurrence order, so the
    // exchange pairs are (aa, xx) and (bb, yy).
    std::map<std::string, const TriggerRecord*> by_id;
    for (const auto& r : result.trigger_set.records) by_id[r.doc_id] = &r;
    const TriggerRecord& ra = *by_id.at("d0");
    const TriggerRecord& rb = *by_id.at("d1");

    CHECK(ra.tokens == std::vector<std::string>{"xx", "yy", "cc"});
    CHECK(ra.swapped_out == std::vector<std::string>{"aa", "bb"});
    CHECK(ra.swapped_in == std::vector<std::string>{"xx", "yy"});
    CHECK(ra.original_label == 0);
    CHECK(ra.assigned_label == 1);
    CHECK(ra.partner_id == "d1");

    CHECK(rb.tokens == std::vector<std::string>{"aa", "bb"});
    CHECK(rb.swapped_out == std::vector<std::string>{"xx", "yy"});
    CHECK(rb.swapped_in == std::vector<std::string>{"aa", "bb"});
    CHECK(rb.original_label == 1);
    CHECK(rb.assigned_label == 0);
    CHECK(rb.partner_id == "d0");
}

TEST_CASE("generation invariants hold across seeds and strategies") {
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);

    for (auto strategy : {RankStrategy::Asc, RankStrategy::Des}) {
        for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
            GenerationConfig config;
            config.pairs_per_class_pair = 3;
            config.exchange_count = 3;
            config.strategy = strategy;
            config.seed = seed;
            GenerationResult result = generate(train, index, config);
            check_invariants(train, result, config);
        }
    }
}

TEST_CASE("swap lists match an independent tf-idf re-derivation") {
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);

    for (auto strategy : {RankStrategy::Asc, RankStrategy::Des}) {
        GenerationConfig config;
        config.pairs_per_class_pair = 4;
        config.exchange_count = 3;
        config.strategy = strategy;
        config.seed = 42;
        GenerationResult result = generate(train, index, config);

        std::set<std::string> done;
        for (const auto& r : result.trigger_set.records) {
            if (!done.insert(r.doc_id).second) continue;
            done.insert(r.partner_id);
            const LabeledDocument& src = doc_by_id(train, r.doc_id);
            const LabeledDocument& partner = doc_by_id(train, r.partner_id);
            auto expected = oracle_pairs(oracle_rank(train, src, strategy),
                                         oracle_rank(train, partner, strategy),
                                         config.exchange_count);
            REQUIRE(expected.size() == r.swapped_out.size());
            for (size_t k = 0; k < expected.size(); ++k) {
                CHECK(r.swapped_out[k] == expected[k].first);
                CHECK(r.swapped_in[k] == expected[k].second);
            }
        }
    }
}

TEST_CASE("generation is deterministic in the seed") {
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);
    GenerationConfig config;
    config.pairs_per_class_pair = 3;
    config.exchange_count = 3;
    config.seed = 9;

    GenerationResult a = generate(train, index, config);
    GenerationResult b = generate(train, index, config);
    CHECK(a.trigger_set.digest() == b.trigger_set.digest());
    CHECK(a.reduced_train.digest() == b.reduced_train.digest());

    config.seed = 10;
    GenerationResult other = generate(train, index, config);
    CHECK(other.trigger_set.digest() != a.trigger_set.digest());
}

TEST_CASE("generation rejects bad configs and mismatched indexes") {
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);

    GenerationConfig config;
    config.pairs_per_class_pair = 0;
    config.exchange_count = 3;
    CHECK_THROWS_WITH_AS(generate(train, index, config), doctest::Contains("B"), Error);

    config.pairs_per_class_pair = 3;
    config.exchange_count = 0;
    CHECK_THROWS_WITH_AS(generate(train, index, config), doctest::Contains("K"), Error);

    // B larger than a class pool.
    config.exchange_count = 3;
    config.pairs_per_class_pair = 11;  // each class has 10 documents
    CHECK_THROWS_WITH_AS(generate(train, index, config), doctest::Contains("needs"), Error);

    // Index built over a different corpus.
    Corpus other = twenty_docs();
    other.documents.pop_back();
    TfIdfIndex stale = build_index(other);
    config.pairs_per_class_pair = 3;
    CHECK_THROWS_WITH_AS(generate(train, stale, config),
                         doctest::Contains("was not built over this corpus"), Error);
}

TEST_CASE("a pair with no exchangeable words is a hard error") {
    // Both documents consist of the same single word: the lockstep walk skips
    // it as a shared prefix word and finds nothing to exchange.
    Corpus c = corpus_of({{{"same"}, 0}, {{"same"}, 1}}, {"c0", "c1"});
    TfIdfIndex index = build_index(c);
    GenerationConfig config;
    config.pairs_per_class_pair = 1;
    config.exchange_count = 4;
    CHECK_THROWS_WITH_AS(generate(c, index, config), doctest::Contains("effective K = 0"), Error);
}

TEST_CASE("trigger sets survive a save/load round trip") {
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);
    GenerationConfig config;
    config.pairs_per_class_pair = 3;
    config.exchange_count = 3;
    config.seed = 77;
    config.theta_hint = 0.8;
    TriggerSet ts = generate(train, index, config).trigger_set;

    std::string path = temp_path("textmark_test_trigger.json");
    save_trigger_set(ts, path);
    TriggerSet back = load_trigger_set(path);

    CHECK(back.digest() == ts.digest());
    CHECK(back.classes == ts.classes);
    CHECK(back.corpus_digest == ts.corpus_digest);
    CHECK(back.reduced_corpus_digest == ts.reduced_corpus_digest);
    CHECK(back.config.pairs_per_class_pair == config.pairs_per_class_pair);
    CHECK(back.config.exchange_count == config.exchange_count);
    CHECK(back.config.strategy == config.strategy);
    CHECK(back.config.seed == config.seed);
    REQUIRE(back.config.theta_hint.has_value());
    CHECK(*back.config.theta_hint == 0.8);
    REQUIRE(back.records.size() == ts.records.size());
    for (size_t i = 0; i < ts.records.size(); ++i) {
        CHECK(back.records[i].doc_id == ts.records[i].doc_id);
        CHECK(back.records[i].tokens == ts.records[i].tokens);
        CHECK(back.records[i].swapped_out == ts.records[i].swapped_out);
        CHECK(back.records[i].swapped_in == ts.records[i].swapped_in);
    }

    // Timestamps are informational only and never serialized.
    CHECK(read_text_file(path).find("created_at") == std::string::npos);

    // Saving twice produces identical bytes.
    std::string path2 = temp_path("textmark_test_trigger2.json");
    save_trigger_set(ts, path2);
    CHECK(read_text_file(path) == read_text_file(path2));
}

TEST_CASE("trigger file loading validates structure") {
    std::string path = temp_path("textmark_test_trigger_bad.json");

    write_text_file(path, "{\"records\": []}");
    CHECK_THROWS_WITH_AS(load_trigger_set(path), doctest::Contains("missing version"), Error);

    write_text_file(path, "{\"version\": 2}");
    CHECK_THROWS_WITH_AS(load_trigger_set(path), doctest::Contains("unsupported trigger file"),
                         Error);

    // Truncated file: not valid JSON at all.
    Corpus train = twenty_docs();
    TfIdfIndex index = build_index(train);
    GenerationConfig config;
    config.pairs_per_class_pair = 2;
    config.exchange_count = 2;
    TriggerSet ts = generate(train, index, config).trigger_set;
    std::string good = temp_path("textmark_test_trigger_good.json");
    save_trigger_set(ts, good);
    std::string bytes = read_text_file(good);
    write_text_file(path, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_WITH_AS(load_trigger_set(path), doctest::Contains("invalid trigger file"), Error);

    // A record whose labels do not swap is rejected.
    std::string tampered = bytes;
    size_t pos = tampered.find("\"assigned_label\": 1");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 19, "\"assigned_label\": 0");
    write_text_file(path, tampered);
    CHECK_THROWS_WITH_AS(load_trigger_set(path), doctest::Contains("does not swap its label"),
                         Error);
}
