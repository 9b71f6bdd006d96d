#pragma once

#include <memory>
#include <string>
#include <vector>

#include "textmark/classifier.hpp"
#include "textmark/trigger.hpp"

namespace textmark {

// Black-box, label-only prediction interface. Verification sees nothing else.
class ModelOracle {
public:
    virtual ~ModelOracle() = default;
    virtual int predict(const std::vector<std::string>& tokens) const = 0;
    // True when predict may be called from several threads at once.
    virtual bool concurrent_safe() const { return false; }
};

// Adapter for a locally loaded model.
class LocalModelOracle : public ModelOracle {
public:
    explicit LocalModelOracle(Model model) : model_(std::move(model)) {
        model_.parallel = false;  // verify parallelizes over records instead
    }
    int predict(const std::vector<std::string>& tokens) const override {
        return model_.predict(tokens);
    }
    bool concurrent_safe() const override { return true; }
    const Model& model() const { return model_; }

private:
    Model model_;
};

struct EmbedResult {
    Model model;
    std::vector<EpochMetrics> history;
    std::vector<std::string> warnings;  // digest mismatch, empty trigger set
    size_t training_set_size = 0;       // |reduced_train| + |trigger records|
};

// Train on reduced_train with the trigger records shuffled in (seeded by the
// train config), learning each record's assigned label.
EmbedResult embed(const Corpus& reduced_train, const TriggerSet& trigger,
                  const TrainConfig& config);

struct RecordOutcome {
    std::string doc_id;
    int predicted = -1;  // -1 when the oracle errored on this record
    int expected = -1;
    bool match = false;
    bool errored = false;
};

struct VerificationReport {
    size_t trigger_count = 0;  // records counted in the denominator
    size_t matches = 0;
    size_t errored = 0;  // oracle failures (only when skip_failed_records)
    double trigger_accuracy = 0.0;
    double theta = 0.0;
    std::string decision;  // "OWNED" | "NOT_OWNED"
    double chance_rate = 0.0;    // 1/|classes|
    double p_value = 0.0;        // binomial tail P(X >= matches) under chance
    std::vector<RecordOutcome> per_record;

    bool owned() const { return decision == "OWNED"; }
    std::string to_json() const;
};

struct VerifyOptions {
    // When true, records where the oracle fails are excluded from the
    // denominator instead of aborting verification.
    bool skip_failed_records = false;
};

VerificationReport verify(const ModelOracle& oracle, const TriggerSet& trigger, double theta,
                          const VerifyOptions& options = {});

// Tail probability P(X >= k) for X ~ Binomial(n, p), computed in log space.
double binomial_tail(size_t k, size_t n, double p);

}  // namespace textmark
