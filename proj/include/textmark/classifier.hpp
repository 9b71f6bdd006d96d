#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "textmark/corpus.hpp"
#include "textmark/kernels.hpp"

namespace textmark {

struct Example {
    std::vector<std::string> tokens;
    int label = -1;
};

std::vector<Example> examples_from_corpus(const Corpus& corpus);

// Word -> embedding row. Index 0 is reserved for unknown words; known words
// are assigned 1..V-1 in lexicographic order.
struct Vocabulary {
    std::vector<std::string> words;  // words[0] == "<unk>"
    std::unordered_map<std::string, int> index;

    size_t size() const { return words.size(); }
    int lookup(const std::string& word) const {
        auto it = index.find(word);
        return it == index.end() ? 0 : it->second;
    }
};

Vocabulary build_vocabulary(const std::vector<Example>& examples);

struct TrainConfig {
    size_t embed_dim = 64;
    size_t hidden_dim = 32;
    double learning_rate = 0.05;
    size_t batch_size = 32;
    size_t epochs = 19;
    double validation_fraction = 0.1;
    uint64_t seed = 0;
    bool parallel = true;  // OpenMP kernels; bitwise-identical to serial

    std::string digest() const;
};

// One row of the per-epoch metrics table. Accuracy/precision/recall/F1 are
// measured on the validation split; precision and recall are macro-averaged.
struct EpochMetrics {
    size_t epoch = 0;  // 1-based
    double training_loss = 0.0;
    double validation_loss = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double seconds = 0.0;  // wall-clock time of the epoch, for the efficiency suite
};

// Mean of word embeddings -> one hidden ReLU layer -> softmax.
struct Model {
    Vocabulary vocab;
    std::vector<std::string> classes;
    size_t embed_dim = 0;
    size_t hidden_dim = 0;
    std::string config_digest;  // digest of the TrainConfig that produced the model
    Matrix embedding;           // V x d
    Matrix w1;                  // d x h
    std::vector<double> b1;
    Matrix w2;  // h x c
    std::vector<double> b2;
    bool parallel = true;  // runtime kernel choice; not serialized

    int predict(const std::vector<std::string>& tokens) const;
    std::vector<double> predict_proba(const std::vector<std::string>& tokens) const;
    std::vector<int> predict_batch(const std::vector<Example>& examples) const;
    size_t parameter_count() const;
    std::string digest() const;
};

struct TrainResult {
    Model model;
    std::vector<EpochMetrics> epochs;
};

TrainResult train(const Corpus& data, const TrainConfig& config);
TrainResult train(const std::vector<Example>& examples, const std::vector<std::string>& classes,
                  const TrainConfig& config);

struct Metrics {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double f1 = 0.0;
    std::vector<std::vector<size_t>> confusion;  // [true][predicted]
};

Metrics evaluate_model(const Model& model, const std::vector<Example>& examples);

struct Gradients {
    Matrix embedding, w1, w2;
    std::vector<double> b1, b2;
};

double loss_on_batch(const Model& model, const std::vector<Example>& batch);
double loss_and_gradients(const Model& model, const std::vector<Example>& batch, Gradients* grads);

// Global magnitude pruning over the weight matrices (embedding, w1, w2);
// biases are exempt. Zeroes the ceil(fraction * n_weights) smallest-magnitude
// weights, breaking ties by position. fraction must be in [0, 1). Returns a
// new model; the input is unchanged.
Model prune(const Model& model, double fraction);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace textmark
