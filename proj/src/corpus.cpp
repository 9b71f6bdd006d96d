#include "textmark/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "textmark/stopwords.hpp"

namespace textmark {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Decode one UTF-8 codepoint starting at i; advances i past it. Invalid
// sequences are consumed one byte at a time and returned as-is.
uint32_t next_codepoint(const std::string& s, size_t& i, size_t& len) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        len = 1;
        i += 1;
        return c;
    }
    size_t n = 0;
    uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
        n = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        n = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        n = 4;
        cp = c & 0x07;
    } else {
        len = 1;
        i += 1;
        return c;
    }
    if (i + n > s.size()) {
        len = 1;
        i += 1;
        return c;
    }
    for (size_t k = 1; k < n; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) {
            len = 1;
            i += 1;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    len = n;
    i += n;
    return cp;
}

bool is_punct_codepoint(uint32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    if (cp == 0x00A1 || cp == 0x00AB || cp == 0x00BB || cp == 0x00BF) return true;
    if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, quotes, ellipsis
    if (cp >= 0x2030 && cp <= 0x205E) return true;  // general punctuation
    return false;
}

}  // namespace

std::string NormalizationConfig::digest() const {
    Fnv1a h;
    h.update(stopword_list_id);
    h.update_u64(lowercase ? 1 : 0);
    h.update_u64(strip_punctuation ? 2 : 0);
    return "norm-" + h.hex();
}

std::vector<std::string> normalize(const std::string& text, const NormalizationConfig& norm) {
    if (!stopword_list_exists(norm.stopword_list_id))
        throw Error("unknown stop-word list id: " + norm.stopword_list_id);
    const auto& stops = stopword_list(norm.stopword_list_id);

    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty() && stops.find(cur) == stops.end()) tokens.push_back(cur);
        cur.clear();
    };

    // Tokens are maximal runs of non-punctuation characters: whitespace and
    // (when stripping) punctuation both end the current run.
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (is_ascii_space(c) || (norm.strip_punctuation && std::ispunct(c))) {
                flush();
                ++i;
                continue;
            }
            cur.push_back(norm.lowercase ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
            ++i;
        } else {
            size_t start = i, len = 0;
            uint32_t cp = next_codepoint(text, i, len);
            if (norm.strip_punctuation && is_punct_codepoint(cp)) {
                flush();
                continue;
            }
            cur.append(text, start, len);
        }
    }
    flush();
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::string Corpus::digest() const {
    Fnv1a h;
    h.update_u64(classes.size());
    for (const auto& c : classes) {
        h.update(c);
        h.update_u64(0x1e);
    }
    h.update_u64(documents.size());
    for (const auto& d : documents) {
        h.update(d.id);
        h.update_u64(static_cast<uint64_t>(d.label));
        h.update_u64(d.tokens.size());
        for (const auto& t : d.tokens) {
            h.update(t);
            h.update_u64(0x1f);
        }
    }
    return "corpus-" + h.hex();
}

std::string LoadReport::to_json() const {
    nlohmann::ordered_json j;
    j["loaded"] = loaded;
    j["dropped_empty"] = dropped_empty;
    j["classes"] = classes;
    return j.dump();
}

CorpusFormat corpus_format_from_string(const std::string& s) {
    if (s == "jsonl") return CorpusFormat::Jsonl;
    if (s == "csv") return CorpusFormat::Csv;
    throw Error("unknown corpus format: " + s + " (expected jsonl or csv)");
}

Corpus corpus_from_raw(const std::vector<RawDocument>& raw, const NormalizationConfig& norm,
                       const std::string& source, LoadReport* report) {
    std::set<std::string> seen_ids;
    for (const auto& r : raw) {
        if (!seen_ids.insert(r.id).second) throw Error("duplicate document id: " + r.id);
    }

    struct Kept {
        std::string id;
        std::vector<std::string> tokens;
        std::string label;
    };
    std::vector<Kept> kept;
    kept.reserve(raw.size());
    size_t dropped = 0;
    for (const auto& r : raw) {
        auto toks = normalize(r.text, norm);
        if (toks.empty()) {
            ++dropped;
            continue;
        }
        kept.push_back({r.id, std::move(toks), r.label});
    }

    std::set<std::string> label_set;
    for (const auto& k : kept) label_set.insert(k.label);
    if (label_set.size() < 2)
        throw Error("corpus has fewer than 2 classes after load (" +
                    std::to_string(label_set.size()) + ")");

    Corpus corpus;
    corpus.classes.assign(label_set.begin(), label_set.end());  // sorted via set
    std::map<std::string, int> class_index;
    for (size_t i = 0; i < corpus.classes.size(); ++i)
        class_index[corpus.classes[i]] = static_cast<int>(i);

    corpus.documents.reserve(kept.size());
    for (auto& k : kept)
        corpus.documents.push_back({std::move(k.id), std::move(k.tokens), class_index[k.label]});

    corpus.provenance.source = source;
    corpus.provenance.norm_digest = norm.digest();

    if (report) {
        report->loaded = corpus.documents.size();
        report->dropped_empty = dropped;
        report->classes = corpus.classes;
    }
    return corpus;
}

namespace {

std::vector<RawDocument> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    std::vector<RawDocument> raw;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("text") || !j.contains("label") ||
            !j["text"].is_string() || !j["label"].is_string())
            throw Error(path + ":" + std::to_string(lineno) +
                        ": malformed record (needs string fields text and label)");
        RawDocument d;
        if (j.contains("id")) {
            if (!j["id"].is_string())
                throw Error(path + ":" + std::to_string(lineno) + ": id must be a string");
            d.id = j["id"].get<std::string>();
        } else {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "r%06zu", lineno);
            d.id = buf;
        }
        d.text = j["text"].get<std::string>();
        d.label = j["label"].get<std::string>();
        raw.push_back(std::move(d));
    }
    return raw;
}

// Minimal RFC-4180 reader: quoted fields, doubled quotes, commas and
// newlines inside quotes.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::string content = read_text_file(path);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&]() {
        end_field();
        if (row.size() > 1 || !row[0].empty()) rows.push_back(row);
        row.clear();
    };
    for (size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw Error(path + ": unterminated quoted CSV field");
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

std::vector<RawDocument> read_csv(const std::string& path) {
    auto rows = read_csv_rows(path);
    if (rows.empty()) throw Error(path + ": empty CSV file");
    const auto& header = rows[0];
    if (header.size() != 2 || header[0] != "text" || header[1] != "label")
        throw Error(path + ": unexpected CSV header (expected text,label)");
    std::vector<RawDocument> raw;
    raw.reserve(rows.size() - 1);
    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2)
            throw Error(path + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(rows[r].size()) + " fields, expected 2");
        char buf[24];
        std::snprintf(buf, sizeof(buf), "r%06zu", r);
        raw.push_back({buf, rows[r][0], rows[r][1]});
    }
    return raw;
}

}  // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format, const NormalizationConfig& norm,
                   LoadReport* report) {
    std::vector<RawDocument> raw =
        format == CorpusFormat::Jsonl ? read_jsonl(path) : read_csv(path);
    return corpus_from_raw(raw, norm, path, report);
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    std::ostringstream out;
    for (const auto& d : corpus.documents) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["text"] = join_tokens(d.tokens);
        j["label"] = corpus.classes.at(static_cast<size_t>(d.label));
        out << j.dump() << "\n";
    }
    write_text_file(path, out.str());
}

SplitResult split(const Corpus& corpus, double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error("test_fraction must be in (0,1)");

    std::vector<std::vector<size_t>> by_class(corpus.classes.size());
    for (size_t i = 0; i < corpus.documents.size(); ++i)
        by_class[static_cast<size_t>(corpus.documents[i].label)].push_back(i);

    Rng rng(seed);
    std::vector<bool> is_test(corpus.documents.size(), false);
    for (size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw Error("class '" + corpus.classes[c] + "' has " + std::to_string(idx.size()) +
                        " documents, too small to stratify");
        rng.shuffle(idx);
        size_t want = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
        want = std::max<size_t>(1, std::min(want, idx.size() - 1));
        for (size_t k = 0; k < want; ++k) is_test[idx[k]] = true;
    }

    SplitResult out;
    out.train.classes = corpus.classes;
    out.test.classes = corpus.classes;
    for (size_t i = 0; i < corpus.documents.size(); ++i)
        (is_test[i] ? out.test : out.train).documents.push_back(corpus.documents[i]);

    const std::string parent = corpus.digest();
    out.train.provenance = {corpus.provenance.source + "#train", corpus.provenance.norm_digest, parent};
    out.test.provenance = {corpus.provenance.source + "#test", corpus.provenance.norm_digest, parent};
    return out;
}

}  // namespace textmark
