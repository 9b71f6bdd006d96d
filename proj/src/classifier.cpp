#include "textmark/classifier.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <set>

#include <json.hpp>

#include "textmark/common.hpp"

namespace textmark {

std::vector<Example> examples_from_corpus(const Corpus& corpus) {
    std::vector<Example> out;
    out.reserve(corpus.documents.size());
    for (const auto& d : corpus.documents) out.push_back({d.tokens, d.label});
    return out;
}

Vocabulary build_vocabulary(const std::vector<Example>& examples) {
    std::set<std::string> distinct;
    for (const auto& ex : examples) distinct.insert(ex.tokens.begin(), ex.tokens.end());
    Vocabulary v;
    v.words.reserve(distinct.size() + 1);
    v.words.push_back("<unk>");
    for (const auto& w : distinct) v.words.push_back(w);
    for (size_t i = 0; i < v.words.size(); ++i) v.index[v.words[i]] = static_cast<int>(i);
    return v;
}

std::string TrainConfig::digest() const {
    Fnv1a h;
    h.update_u64(embed_dim);
    h.update_u64(hidden_dim);
    h.update_u64(std::bit_cast<uint64_t>(learning_rate));
    h.update_u64(batch_size);
    h.update_u64(epochs);
    h.update_u64(std::bit_cast<uint64_t>(validation_fraction));
    h.update_u64(seed);
    return "traincfg-" + h.hex();
}

namespace {

struct KernelSet {
    void (*affine)(const Matrix&, const Matrix&, const std::vector<double>&, Matrix&);
    void (*relu)(Matrix&);
    void (*relu_backward)(const Matrix&, Matrix&);
    void (*softmax_rows)(Matrix&);
    void (*grad_weights)(const Matrix&, const Matrix&, Matrix&);
    void (*grad_bias)(const Matrix&, std::vector<double>&);
    void (*backprop_inputs)(const Matrix&, const Matrix&, Matrix&);
    void (*embed_mean)(const TokenBatch&, const Matrix&, Matrix&);
    void (*embed_mean_backward)(const Matrix&, const TokenBatch&, Matrix&);
    void (*axpy_m)(double, const Matrix&, Matrix&);
    void (*axpy_v)(double, const std::vector<double>&, std::vector<double>&);
};

const KernelSet& kernel_set(bool parallel) {
    using namespace kernels;
    static const KernelSet s = {serial::affine,        serial::relu,
                                serial::relu_backward, serial::softmax_rows,
                                serial::grad_weights,  serial::grad_bias,
                                serial::backprop_inputs, serial::embed_mean,
                                serial::embed_mean_backward, serial::axpy,
                                serial::axpy};
    static const KernelSet p = {par::affine,        par::relu,
                                par::relu_backward, par::softmax_rows,
                                par::grad_weights,  par::grad_bias,
                                par::backprop_inputs, par::embed_mean,
                                par::embed_mean_backward, par::axpy,
                                par::axpy};
    return parallel ? p : s;
}

TokenBatch batch_ids(const Model& m, const std::vector<Example>& examples, size_t begin,
                     size_t end) {
    TokenBatch batch;
    batch.ids.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
        std::vector<int> ids;
        ids.reserve(examples[i].tokens.size());
        for (const auto& t : examples[i].tokens) ids.push_back(m.vocab.lookup(t));
        batch.ids.push_back(std::move(ids));
    }
    return batch;
}

struct ForwardPass {
    Matrix x, h_pre, h, p;
};

void forward(const Model& m, const TokenBatch& batch, ForwardPass& f, const KernelSet& K) {
    K.embed_mean(batch, m.embedding, f.x);
    K.affine(f.x, m.w1, m.b1, f.h_pre);
    f.h = f.h_pre;
    K.relu(f.h);
    K.affine(f.h, m.w2, m.b2, f.p);
    K.softmax_rows(f.p);
}

double nll(const Matrix& p, const std::vector<int>& labels) {
    double loss = 0.0;
    for (size_t b = 0; b < p.rows; ++b)
        loss -= std::log(std::max(p.at(b, static_cast<size_t>(labels[b])), 1e-300));
    return loss / static_cast<double>(p.rows);
}

double batch_loss_and_grads(const Model& m, const TokenBatch& batch,
                            const std::vector<int>& labels, Gradients* g, const KernelSet& K) {
    ForwardPass f;
    forward(m, batch, f, K);
    double loss = nll(f.p, labels);
    if (!g) return loss;

    const double inv_b = 1.0 / static_cast<double>(batch.ids.size());
    Matrix dlogits = f.p;
    for (size_t b = 0; b < dlogits.rows; ++b)
        dlogits.at(b, static_cast<size_t>(labels[b])) -= 1.0;
    for (double& v : dlogits.data) v *= inv_b;

    K.grad_weights(f.h, dlogits, g->w2);
    K.grad_bias(dlogits, g->b2);
    Matrix dh;
    K.backprop_inputs(dlogits, m.w2, dh);
    K.relu_backward(f.h_pre, dh);
    K.grad_weights(f.x, dh, g->w1);
    K.grad_bias(dh, g->b1);
    Matrix dx;
    K.backprop_inputs(dh, m.w1, dx);
    g->embedding = Matrix(m.embedding.rows, m.embedding.cols);
    K.embed_mean_backward(dx, batch, g->embedding);
    return loss;
}

std::vector<int> labels_of(const std::vector<Example>& examples, size_t begin, size_t end,
                           size_t n_classes) {
    std::vector<int> labels;
    labels.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
        int y = examples[i].label;
        if (y < 0 || static_cast<size_t>(y) >= n_classes)
            throw Error("example label " + std::to_string(y) + " out of range");
        labels.push_back(y);
    }
    return labels;
}

Metrics metrics_from_confusion(const std::vector<std::vector<size_t>>& cm) {
    const size_t n = cm.size();
    size_t total = 0, correct = 0;
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
            total += cm[r][c];
            if (r == c) correct += cm[r][c];
        }
    Metrics m;
    m.confusion = cm;
    m.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    double psum = 0.0, rsum = 0.0;
    for (size_t c = 0; c < n; ++c) {
        size_t tp = cm[c][c], fp = 0, fn = 0;
        for (size_t r = 0; r < n; ++r)
            if (r != c) {
                fp += cm[r][c];
                fn += cm[c][r];
            }
        psum += tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        rsum += tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    }
    m.macro_precision = n ? psum / static_cast<double>(n) : 0.0;
    m.macro_recall = n ? rsum / static_cast<double>(n) : 0.0;
    double pr = m.macro_precision + m.macro_recall;
    m.f1 = pr > 0.0 ? 2.0 * m.macro_precision * m.macro_recall / pr : 0.0;
    return m;
}

Metrics eval_with_loss(const Model& m, const std::vector<Example>& examples, size_t batch_size,
                       double* mean_loss) {
    const KernelSet& K = kernel_set(m.parallel);
    const size_t n_classes = m.classes.size();
    std::vector<std::vector<size_t>> cm(n_classes, std::vector<size_t>(n_classes, 0));
    double loss_sum = 0.0;
    for (size_t begin = 0; begin < examples.size(); begin += batch_size) {
        size_t end = std::min(begin + batch_size, examples.size());
        TokenBatch batch = batch_ids(m, examples, begin, end);
        std::vector<int> labels = labels_of(examples, begin, end, n_classes);
        ForwardPass f;
        forward(m, batch, f, K);
        if (mean_loss) loss_sum += nll(f.p, labels) * static_cast<double>(end - begin);
        for (size_t b = 0; b < f.p.rows; ++b) {
            size_t best = 0;
            for (size_t c = 1; c < n_classes; ++c)
                if (f.p.at(b, c) > f.p.at(b, best)) best = c;
            cm[static_cast<size_t>(labels[b])][best] += 1;
        }
    }
    if (mean_loss)
        *mean_loss = examples.empty() ? 0.0 : loss_sum / static_cast<double>(examples.size());
    return metrics_from_confusion(cm);
}

void check_train_config(const TrainConfig& c) {
    if (c.embed_dim == 0 || c.hidden_dim == 0) throw Error("model dimensions must be >= 1");
    if (!(c.learning_rate > 0.0)) throw Error("learning_rate must be > 0");
    if (c.batch_size == 0) throw Error("batch_size must be >= 1");
    if (c.epochs == 0) throw Error("epochs must be >= 1");
    if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0))
        throw Error("validation_fraction must be in (0, 1)");
}

}  // namespace

int Model::predict(const std::vector<std::string>& tokens) const {
    auto p = predict_proba(tokens);
    size_t best = 0;
    for (size_t c = 1; c < p.size(); ++c)
        if (p[c] > p[best]) best = c;
    return static_cast<int>(best);
}

std::vector<double> Model::predict_proba(const std::vector<std::string>& tokens) const {
    if (tokens.empty()) throw Error("cannot predict on an empty token list");
    TokenBatch batch;
    batch.ids.emplace_back();
    batch.ids[0].reserve(tokens.size());
    for (const auto& t : tokens) batch.ids[0].push_back(vocab.lookup(t));
    ForwardPass f;
    forward(*this, batch, f, kernel_set(parallel));
    return std::vector<double>(f.p.row(0), f.p.row(0) + f.p.cols);
}

std::vector<int> Model::predict_batch(const std::vector<Example>& examples) const {
    const KernelSet& K = kernel_set(parallel);
    std::vector<int> out;
    out.reserve(examples.size());
    const size_t chunk = 256;
    for (size_t begin = 0; begin < examples.size(); begin += chunk) {
        size_t end = std::min(begin + chunk, examples.size());
        TokenBatch batch = batch_ids(*this, examples, begin, end);
        ForwardPass f;
        forward(*this, batch, f, K);
        for (size_t b = 0; b < f.p.rows; ++b) {
            size_t best = 0;
            for (size_t c = 1; c < f.p.cols; ++c)
                if (f.p.at(b, c) > f.p.at(b, best)) best = c;
            out.push_back(static_cast<int>(best));
        }
    }
    return out;
}

size_t Model::parameter_count() const {
    return embedding.size() + w1.size() + b1.size() + w2.size() + b2.size();
}

std::string Model::digest() const {
    Fnv1a h;
    h.update_u64(vocab.size());
    for (const auto& w : vocab.words) {
        h.update(w);
        h.update_u64(0x1f);
    }
    h.update_u64(classes.size());
    for (const auto& c : classes) {
        h.update(c);
        h.update_u64(0x1e);
    }
    h.update_u64(embed_dim);
    h.update_u64(hidden_dim);
    h.update(config_digest);
    auto feed = [&h](const std::vector<double>& v) {
        for (double d : v) h.update_u64(std::bit_cast<uint64_t>(d));
    };
    feed(embedding.data);
    feed(w1.data);
    feed(b1);
    feed(w2.data);
    feed(b2);
    return "model-" + h.hex();
}

double loss_on_batch(const Model& model, const std::vector<Example>& batch) {
    return loss_and_gradients(model, batch, nullptr);
}

double loss_and_gradients(const Model& model, const std::vector<Example>& batch, Gradients* grads) {
    if (batch.empty()) throw Error("loss on empty batch");
    TokenBatch tb = batch_ids(model, batch, 0, batch.size());
    std::vector<int> labels = labels_of(batch, 0, batch.size(), model.classes.size());
    return batch_loss_and_grads(model, tb, labels, grads, kernel_set(model.parallel));
}

TrainResult train(const Corpus& data, const TrainConfig& config) {
    if (data.classes.size() < 2) throw Error("training needs at least 2 classes");
    return train(examples_from_corpus(data), data.classes, config);
}

TrainResult train(const std::vector<Example>& examples, const std::vector<std::string>& classes,
                  const TrainConfig& config) {
    check_train_config(config);
    if (examples.empty()) throw Error("cannot train on an empty example set");
    if (classes.size() < 2) throw Error("training needs at least 2 classes");
    for (const auto& ex : examples)
        if (ex.label < 0 || static_cast<size_t>(ex.label) >= classes.size())
            throw Error("example label " + std::to_string(ex.label) + " out of range");

    TrainResult result;
    Model& m = result.model;
    m.vocab = build_vocabulary(examples);
    m.classes = classes;
    m.embed_dim = config.embed_dim;
    m.hidden_dim = config.hidden_dim;
    m.config_digest = config.digest();
    m.parallel = config.parallel;

    Rng init_rng(derive_seed(config.seed, "init"));
    auto fill = [&init_rng](std::vector<double>& v) {
        for (double& x : v) x = (init_rng.uniform01() * 2.0 - 1.0) * 0.05;
    };
    m.embedding = Matrix(m.vocab.size(), config.embed_dim);
    m.w1 = Matrix(config.embed_dim, config.hidden_dim);
    m.b1.assign(config.hidden_dim, 0.0);
    m.w2 = Matrix(config.hidden_dim, classes.size());
    m.b2.assign(classes.size(), 0.0);
    fill(m.embedding.data);
    fill(m.w1.data);
    fill(m.b1);
    fill(m.w2.data);
    fill(m.b2);

    // Validation split: deterministic shuffle, then both halves back in
    // original order.
    std::vector<size_t> all(examples.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<size_t> train_idx, val_idx;
    if (config.validation_fraction > 0.0 && examples.size() > 1) {
        Rng vs(derive_seed(config.seed, "val-split"));
        vs.shuffle(all);
        size_t n_val = static_cast<size_t>(
            std::llround(config.validation_fraction * static_cast<double>(examples.size())));
        n_val = std::max<size_t>(1, std::min(n_val, examples.size() - 1));
        val_idx.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_val));
        train_idx.assign(all.begin() + static_cast<std::ptrdiff_t>(n_val), all.end());
        std::sort(val_idx.begin(), val_idx.end());
        std::sort(train_idx.begin(), train_idx.end());
    } else {
        train_idx = all;
    }

    std::vector<Example> val_examples;
    for (size_t i : val_idx) val_examples.push_back(examples[i]);
    const std::vector<Example>& metric_examples = val_examples.empty() ? examples : val_examples;

    const KernelSet& K = kernel_set(config.parallel);
    Gradients g;
    for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<size_t> order = train_idx;
        Rng(derive_seed(config.seed, "epoch", epoch)).shuffle(order);

        double loss_sum = 0.0;
        for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            size_t end = std::min(begin + config.batch_size, order.size());
            TokenBatch batch;
            std::vector<int> labels;
            batch.ids.reserve(end - begin);
            labels.reserve(end - begin);
            for (size_t k = begin; k < end; ++k) {
                const Example& ex = examples[order[k]];
                std::vector<int> ids;
                ids.reserve(ex.tokens.size());
                for (const auto& t : ex.tokens) ids.push_back(m.vocab.lookup(t));
                batch.ids.push_back(std::move(ids));
                labels.push_back(ex.label);
            }
            double loss = batch_loss_and_grads(m, batch, labels, &g, K);
            if (!std::isfinite(loss))
                throw Error("training diverged: non-finite loss at epoch " +
                            std::to_string(epoch));
            loss_sum += loss * static_cast<double>(end - begin);
            K.axpy_m(-config.learning_rate, g.embedding, m.embedding);
            K.axpy_m(-config.learning_rate, g.w1, m.w1);
            K.axpy_v(-config.learning_rate, g.b1, m.b1);
            K.axpy_m(-config.learning_rate, g.w2, m.w2);
            K.axpy_v(-config.learning_rate, g.b2, m.b2);
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.training_loss = order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
        Metrics vm = eval_with_loss(m, metric_examples, config.batch_size, &em.validation_loss);
        em.accuracy = vm.accuracy;
        em.precision = vm.macro_precision;
        em.recall = vm.macro_recall;
        em.f1 = vm.f1;
        em.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.epochs.push_back(em);
    }
    return result;
}

Metrics evaluate_model(const Model& model, const std::vector<Example>& examples) {
    if (examples.empty()) throw Error("cannot evaluate on an empty example set");
    return eval_with_loss(model, examples, 256, nullptr);
}

Model prune(const Model& model, double fraction) {
    if (fraction < 0.0 || fraction >= 1.0) throw Error("prune fraction must be in [0, 1)");
    Model out = model;
    std::vector<double*> weights;
    weights.reserve(out.embedding.size() + out.w1.size() + out.w2.size());
    for (double& v : out.embedding.data) weights.push_back(&v);
    for (double& v : out.w1.data) weights.push_back(&v);
    for (double& v : out.w2.data) weights.push_back(&v);

    const size_t n = weights.size();
    const size_t k = static_cast<size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (k == 0) return out;

    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        double ma = std::fabs(*weights[a]), mb = std::fabs(*weights[b]);
        if (ma != mb) return ma < mb;
        return a < b;
    });
    for (size_t i = 0; i < k; ++i) *weights[idx[i]] = 0.0;
    return out;
}

namespace {

void put_u32(std::string& s, uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_u64(std::string& s, uint64_t v) {
    for (int k = 0; k < 8; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

uint64_t get_u64(const std::string& s, size_t off) {
    uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<uint64_t>(static_cast<unsigned char>(s[off + static_cast<size_t>(k)]))
             << (8 * k);
    return v;
}

uint32_t get_u32(const std::string& s, size_t off) {
    uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
        v |= static_cast<uint32_t>(static_cast<unsigned char>(s[off + static_cast<size_t>(k)]))
             << (8 * k);
    return v;
}

constexpr char kModelMagic[9] = "TXMKMODL";

}  // namespace

void save_model(const Model& model, const std::string& path) {
    nlohmann::ordered_json header;
    header["classes"] = model.classes;
    header["embed_dim"] = model.embed_dim;
    header["hidden_dim"] = model.hidden_dim;
    header["config_digest"] = model.config_digest;
    auto vocab = nlohmann::ordered_json::array();
    for (size_t i = 1; i < model.vocab.words.size(); ++i)  // index 0 is implicit <unk>
        vocab.push_back(model.vocab.words[i]);
    header["vocab"] = std::move(vocab);
    const std::string header_str = header.dump();

    std::string buf;
    buf.append(kModelMagic, 8);
    put_u32(buf, 1);
    put_u64(buf, header_str.size());
    buf += header_str;
    put_u64(buf, model.parameter_count());
    auto feed = [&buf](const std::vector<double>& v) {
        for (double d : v) put_u64(buf, std::bit_cast<uint64_t>(d));
    };
    feed(model.embedding.data);
    feed(model.w1.data);
    feed(model.b1);
    feed(model.w2.data);
    feed(model.b2);

    Fnv1a h;
    h.update(buf);
    put_u64(buf, h.value());

    const std::string tmp = path + ".tmp";
    write_text_file(tmp, buf);
    std::filesystem::rename(tmp, path);
}

Model load_model(const std::string& path) {
    const std::string buf = read_text_file(path);
    if (buf.size() < 8 + 4 + 8 + 8 || buf.compare(0, 8, kModelMagic, 8) != 0)
        throw Error(path + ": not a model file");
    uint32_t version = get_u32(buf, 8);
    if (version != 1)
        throw Error(path + ": unsupported model file version " + std::to_string(version));

    Fnv1a h;
    h.update(buf.data(), buf.size() - 8);
    if (h.value() != get_u64(buf, buf.size() - 8))
        throw Error(path + ": model file corrupted (digest mismatch)");

    size_t off = 12;
    uint64_t header_len = get_u64(buf, off);
    off += 8;
    if (off + header_len + 16 > buf.size()) throw Error(path + ": truncated model file");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(buf.substr(off, header_len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": bad model header: " + e.what());
    }
    off += header_len;

    Model m;
    try {
        m.classes = header.at("classes").get<std::vector<std::string>>();
        m.embed_dim = header.at("embed_dim").get<size_t>();
        m.hidden_dim = header.at("hidden_dim").get<size_t>();
        m.config_digest = header.at("config_digest").get<std::string>();
        auto vocab_words = header.at("vocab").get<std::vector<std::string>>();
        m.vocab.words.reserve(vocab_words.size() + 1);
        m.vocab.words.push_back("<unk>");
        for (auto& w : vocab_words) m.vocab.words.push_back(std::move(w));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": bad model header: " + e.what());
    }
    for (size_t i = 0; i < m.vocab.words.size(); ++i)
        m.vocab.index[m.vocab.words[i]] = static_cast<int>(i);

    m.embedding = Matrix(m.vocab.size(), m.embed_dim);
    m.w1 = Matrix(m.embed_dim, m.hidden_dim);
    m.b1.assign(m.hidden_dim, 0.0);
    m.w2 = Matrix(m.hidden_dim, m.classes.size());
    m.b2.assign(m.classes.size(), 0.0);

    uint64_t n_params = get_u64(buf, off);
    off += 8;
    if (n_params != m.parameter_count())
        throw Error(path + ": parameter count mismatch (header says " + std::to_string(n_params) +
                    ", dimensions need " + std::to_string(m.parameter_count()) + ")");
    if (off + 8 * n_params + 8 != buf.size()) throw Error(path + ": truncated model file");

    auto take = [&buf, &off](std::vector<double>& v) {
        for (double& d : v) {
            d = std::bit_cast<double>(get_u64(buf, off));
            off += 8;
        }
    };
    take(m.embedding.data);
    take(m.w1.data);
    take(m.b1);
    take(m.w2.data);
    take(m.b2);
    return m;
}

}  // namespace textmark
