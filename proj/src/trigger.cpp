#include "textmark/trigger.hpp"

#include <algorithm>
#include <bit>
#include <ctime>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace textmark {

std::string GenerationConfig::digest() const {
    Fnv1a h;
    h.update_u64(pairs_per_class_pair);
    h.update_u64(exchange_count);
    h.update(to_string(strategy));
    h.update_u64(seed);
    h.update_u64(theta_hint ? 1 : 0);
    if (theta_hint) h.update_u64(std::bit_cast<uint64_t>(*theta_hint));
    return "gencfg-" + h.hex();
}

std::string TriggerSet::digest() const {
    Fnv1a h;
    h.update(config.digest());
    h.update(corpus_digest);
    h.update(reduced_corpus_digest);
    h.update_u64(classes.size());
    for (const auto& c : classes) {
        h.update(c);
        h.update_u64(0x1e);
    }
    h.update_u64(records.size());
    for (const auto& r : records) {
        h.update(r.doc_id);
        h.update(r.partner_id);
        h.update_u64(static_cast<uint64_t>(r.original_label));
        h.update_u64(static_cast<uint64_t>(r.assigned_label));
        h.update_u64(r.tokens.size());
        for (const auto& t : r.tokens) {
            h.update(t);
            h.update_u64(0x1f);
        }
        h.update_u64(r.swapped_out.size());
        for (size_t k = 0; k < r.swapped_out.size(); ++k) {
            h.update(r.swapped_out[k]);
            h.update_u64(0x1d);
            h.update(r.swapped_in[k]);
            h.update_u64(0x1c);
        }
    }
    return "trigger-" + h.hex();
}

namespace {

struct WordPair {
    std::string out_a;  // leaves doc A, enters doc B
    std::string out_b;  // leaves doc B, enters doc A
};

// Walk both ranked lists in lockstep and greedily pick exchange pairs whose
// words are all distinct. A word shared by both prefixes would make the swap
// a no-op (or reintroduce a swapped-out word), so it is skipped and the next
// ranked word is taken instead.
std::vector<WordPair> select_exchange_pairs(const RankedDocument& ra, const RankedDocument& rb,
                                            size_t k) {
    std::vector<WordPair> pairs;
    std::set<std::string> used;
    size_t i = 0, j = 0;
    while (pairs.size() < k && i < ra.words.size() && j < rb.words.size()) {
        const std::string& a = ra.words[i].word;
        const std::string& b = rb.words[j].word;
        if (a == b) {
            used.insert(a);
            ++i;
            ++j;
            continue;
        }
        if (used.count(a)) {
            ++i;
            continue;
        }
        if (used.count(b)) {
            ++j;
            continue;
        }
        used.insert(a);
        used.insert(b);
        pairs.push_back({a, b});
        ++i;
        ++j;
    }
    return pairs;
}

std::vector<std::string> apply_exchange(const std::vector<std::string>& tokens,
                                        const std::unordered_map<std::string, std::string>& repl) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = repl.find(t);
        out.push_back(it == repl.end() ? t : it->second);
    }
    return out;
}

}  // namespace

GenerationResult generate(const Corpus& train, const TfIdfIndex& index,
                          const GenerationConfig& config) {
    if (config.pairs_per_class_pair == 0) throw Error("pairs_per_class_pair (B) must be >= 1");
    if (config.exchange_count == 0) throw Error("exchange_count (K) must be >= 1");
    if (train.classes.size() < 2) throw Error("trigger generation needs at least 2 classes");
    if (index.source_digest != train.digest())
        throw Error("tf-idf index was not built over this corpus (digest mismatch)");

    const size_t n_classes = train.classes.size();
    std::vector<std::vector<size_t>> pools(n_classes);
    for (size_t i = 0; i < train.documents.size(); ++i)
        pools[static_cast<size_t>(train.documents[i].label)].push_back(i);

    const size_t pairings_per_class = n_classes - 1;
    for (size_t c = 0; c < n_classes; ++c) {
        size_t need = config.pairs_per_class_pair * pairings_per_class;
        if (pools[c].size() < need)
            throw Error("class '" + train.classes[c] + "' has " + std::to_string(pools[c].size()) +
                        " documents but trigger generation needs " + std::to_string(need));
    }

    Rng rng(derive_seed(config.seed, "trigger-gen"));

    TriggerSet ts;
    ts.config = config;
    ts.classes = train.classes;
    ts.corpus_digest = train.digest();
    ts.created_at = static_cast<int64_t>(std::time(nullptr));

    std::vector<bool> removed(train.documents.size(), false);
    for (size_t ca = 0; ca < n_classes; ++ca) {
        for (size_t cb = ca + 1; cb < n_classes; ++cb) {
            for (size_t p = 0; p < config.pairs_per_class_pair; ++p) {
                auto draw = [&](std::vector<size_t>& pool) {
                    size_t slot = rng.below(pool.size());
                    size_t doc_index = pool[slot];
                    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(slot));
                    return doc_index;
                };
                size_t ia = draw(pools[ca]);
                size_t ib = draw(pools[cb]);
                const LabeledDocument& da = train.documents[ia];
                const LabeledDocument& db = train.documents[ib];

                RankedDocument ra = rank_words(index, da, config.strategy);
                RankedDocument rb = rank_words(index, db, config.strategy);
                auto pairs = select_exchange_pairs(ra, rb, config.exchange_count);
                if (pairs.empty())
                    throw Error("no exchangeable words between documents '" + da.id + "' and '" +
                                db.id + "' (effective K = 0)");

                std::unordered_map<std::string, std::string> repl_a, repl_b;
                TriggerRecord rec_a, rec_b;
                for (const auto& wp : pairs) {
                    repl_a[wp.out_a] = wp.out_b;
                    repl_b[wp.out_b] = wp.out_a;
                    rec_a.swapped_out.push_back(wp.out_a);
                    rec_a.swapped_in.push_back(wp.out_b);
                    rec_b.swapped_out.push_back(wp.out_b);
                    rec_b.swapped_in.push_back(wp.out_a);
                }

                rec_a.doc_id = da.id;
                rec_a.tokens = apply_exchange(da.tokens, repl_a);
                rec_a.original_label = da.label;
                rec_a.assigned_label = db.label;
                rec_a.partner_id = db.id;

                rec_b.doc_id = db.id;
                rec_b.tokens = apply_exchange(db.tokens, repl_b);
                rec_b.original_label = db.label;
                rec_b.assigned_label = da.label;
                rec_b.partner_id = da.id;

                ts.records.push_back(std::move(rec_a));
                ts.records.push_back(std::move(rec_b));
                removed[ia] = true;
                removed[ib] = true;
            }
        }
    }

    GenerationResult result;
    result.reduced_train.classes = train.classes;
    for (size_t i = 0; i < train.documents.size(); ++i)
        if (!removed[i]) result.reduced_train.documents.push_back(train.documents[i]);
    result.reduced_train.provenance = {train.provenance.source + "#reduced",
                                       train.provenance.norm_digest, ts.corpus_digest};
    ts.reduced_corpus_digest = result.reduced_train.digest();
    result.trigger_set = std::move(ts);
    return result;
}

void save_trigger_set(const TriggerSet& ts, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["classes"] = ts.classes;
    nlohmann::ordered_json cfg;
    cfg["B"] = ts.config.pairs_per_class_pair;
    cfg["K"] = ts.config.exchange_count;
    cfg["strategy"] = to_string(ts.config.strategy);
    cfg["seed"] = ts.config.seed;
    if (ts.config.theta_hint) cfg["theta_hint"] = *ts.config.theta_hint;
    j["config"] = std::move(cfg);
    j["corpus_digest"] = ts.corpus_digest;
    j["reduced_corpus_digest"] = ts.reduced_corpus_digest;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : ts.records) {
        nlohmann::ordered_json e;
        e["doc_id"] = r.doc_id;
        e["partner_id"] = r.partner_id;
        e["tokens"] = r.tokens;
        e["original_label"] = r.original_label;
        e["assigned_label"] = r.assigned_label;
        e["swapped_out"] = r.swapped_out;
        e["swapped_in"] = r.swapped_in;
        arr.push_back(std::move(e));
    }
    j["records"] = std::move(arr);

    const std::string tmp = path + ".tmp";
    write_text_file(tmp, j.dump(2) + "\n");
    std::filesystem::rename(tmp, path);
}

TriggerSet load_trigger_set(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": invalid trigger file: " + e.what());
    }
    if (!j.is_object() || !j.contains("version"))
        throw Error(path + ": not a trigger file (missing version)");
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
        throw Error(path + ": unsupported trigger file version " + j["version"].dump());

    TriggerSet ts;
    try {
        ts.classes = j.at("classes").get<std::vector<std::string>>();
        const auto& cfg = j.at("config");
        ts.config.pairs_per_class_pair = cfg.at("B").get<size_t>();
        ts.config.exchange_count = cfg.at("K").get<size_t>();
        ts.config.strategy = rank_strategy_from_string(cfg.at("strategy").get<std::string>());
        ts.config.seed = cfg.at("seed").get<uint64_t>();
        if (cfg.contains("theta_hint")) ts.config.theta_hint = cfg["theta_hint"].get<double>();
        ts.corpus_digest = j.at("corpus_digest").get<std::string>();
        ts.reduced_corpus_digest = j.at("reduced_corpus_digest").get<std::string>();
        for (const auto& e : j.at("records")) {
            TriggerRecord r;
            r.doc_id = e.at("doc_id").get<std::string>();
            r.partner_id = e.at("partner_id").get<std::string>();
            r.tokens = e.at("tokens").get<std::vector<std::string>>();
            r.original_label = e.at("original_label").get<int>();
            r.assigned_label = e.at("assigned_label").get<int>();
            r.swapped_out = e.at("swapped_out").get<std::vector<std::string>>();
            r.swapped_in = e.at("swapped_in").get<std::vector<std::string>>();
            ts.records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed trigger file: " + e.what());
    }

    const int n_classes = static_cast<int>(ts.classes.size());
    std::set<std::string> ids;
    for (const auto& r : ts.records) {
        if (r.original_label < 0 || r.original_label >= n_classes || r.assigned_label < 0 ||
            r.assigned_label >= n_classes)
            throw Error(path + ": record '" + r.doc_id + "' has out-of-range label");
        if (r.original_label == r.assigned_label)
            throw Error(path + ": record '" + r.doc_id + "' does not swap its label");
        if (r.swapped_out.size() != r.swapped_in.size() || r.swapped_out.empty())
            throw Error(path + ": record '" + r.doc_id + "' has inconsistent swap lists");
        if (r.tokens.empty()) throw Error(path + ": record '" + r.doc_id + "' has no tokens");
        if (!ids.insert(r.doc_id).second)
            throw Error(path + ": duplicate trigger record id '" + r.doc_id + "'");
    }
    ts.created_at = static_cast<int64_t>(std::time(nullptr));
    return ts;
}

}  // namespace textmark
