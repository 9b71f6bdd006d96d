#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textmark/classifier.hpp"
#include "textmark/corpus.hpp"
#include "textmark/trigger.hpp"
#include "textmark/watermark.hpp"

namespace textmark {

struct FidelityEntry {
    std::string strategy;
    double watermarked_accuracy = 0.0;
    double gap = 0.0;  // original - watermarked
};

struct FidelityReport {
    double original_accuracy = 0.0;
    double watermarked_accuracy = 0.0;  // primary strategy
    double gap = 0.0;
    std::vector<FidelityEntry> breakdown;  // one entry per evaluated strategy
    std::string to_json() const;
    std::string to_csv() const;
};

struct CredibilityEntry {
    std::string strategy;
    double watermarked_trigger_accuracy = 0.0;
    double original_trigger_accuracy = 0.0;
};

struct CredibilityReport {
    std::vector<CredibilityEntry> rows;
    double separation = 0.0;  // watermarked - original, primary strategy
    std::string to_json() const;
    std::string to_csv() const;
};

struct IntegrityEntry {
    uint64_t seed = 0;
    double trigger_accuracy = 0.0;
    std::string decision;
};

struct IntegrityReport {
    double theta = 0.0;
    IntegrityEntry watermarked_control;
    std::vector<IntegrityEntry> unmarked;
    size_t false_claims = 0;
    std::string to_json() const;
    std::string to_csv() const;
};

struct RobustnessPoint {
    double prune_fraction = 0.0;
    double test_accuracy = 0.0;
    double trigger_accuracy = 0.0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
    std::string model_digest;
};

struct RobustnessCurve {
    std::vector<RobustnessPoint> points;
    std::string to_json() const;
    std::string to_csv() const;
};

struct EfficiencyReport {
    std::vector<double> original_epoch_seconds;
    std::vector<double> watermarked_epoch_seconds;
    double original_mean = 0.0;
    double watermarked_mean = 0.0;
    double ratio = 0.0;             // watermarked_mean / original_mean
    double trigger_fraction = 0.0;  // |T| / |D|
    std::string to_json() const;
    std::string to_csv() const;
};

struct SecurityProbeReport {
    size_t n_probes = 0;
    std::vector<double> class_rates;  // prediction distribution on random probes
    std::vector<double> base_rates;   // prediction distribution on the reference corpus
    double max_deviation = 0.0;       // max |class_rate - base_rate|
    std::string to_json() const;
};

struct SecuritySuiteReport {
    std::vector<std::string> classes;
    SecurityProbeReport watermarked;
    SecurityProbeReport unmarked;
    double max_class_difference = 0.0;  // between the two models' probe rates
    std::string to_json() const;
    std::string to_csv() const;
};

struct KSweepRow {
    size_t k = 0;
    double effective_k_mean = 0.0;
    double test_accuracy = 0.0;
    double trigger_accuracy = 0.0;
    double final_training_loss = 0.0;
    double final_validation_loss = 0.0;
    std::string error;  // non-empty when this K failed; sweep continues
};

struct KSweepReport {
    std::vector<KSweepRow> rows;
    std::string to_json() const;
    std::string to_csv() const;
};

// Original model on the full train split, watermarked model via
// generate+embed with the same seeds; both evaluated on the held-out test
// split. When both_strategies, the non-primary strategy is added to the
// breakdown.
FidelityReport run_fidelity(const Corpus& corpus, const GenerationConfig& gen_config,
                            const TrainConfig& train_config, double test_fraction = 0.2,
                            bool both_strategies = true);

CredibilityReport run_credibility(const Corpus& corpus, const GenerationConfig& gen_config,
                                  const TrainConfig& train_config, double test_fraction = 0.2,
                                  bool both_strategies = true);

IntegrityReport run_integrity(const Corpus& corpus, const GenerationConfig& gen_config,
                              const TrainConfig& train_config, size_t n_unmarked,
                              double theta = 0.8, double test_fraction = 0.2);

// Prunes a copy of the model at each fraction. train_examples is the data the
// model was trained on (for the train-loss column); validation loss is
// measured on the test corpus.
RobustnessCurve run_robustness(const Model& model, const TriggerSet& trigger, const Corpus& test,
                               const std::vector<double>& fractions,
                               const std::vector<Example>& train_examples);

// Times both trainings serially with identical configs.
EfficiencyReport run_efficiency(const Corpus& corpus, const GenerationConfig& gen_config,
                                const TrainConfig& train_config, double test_fraction = 0.2);

// Queries the model with random documents drawn from its vocabulary, lengths
// following the trigger set's empirical length distribution. Base rates come
// from the model's predictions on the reference corpus.
SecurityProbeReport run_security_probe(const Model& model, const TriggerSet& trigger,
                                       const Corpus& reference, size_t n_probes, uint64_t seed);

// Full generate -> embed -> verify pipeline per K value. A K that fails
// produces an error row; the sweep continues.
KSweepReport run_k_sweep(const Corpus& corpus, const std::vector<size_t>& k_values,
                         const GenerationConfig& gen_config, const TrainConfig& train_config,
                         double test_fraction = 0.2);

struct EvalOptions {
    GenerationConfig generation;
    TrainConfig train;
    double test_fraction = 0.2;
    double theta = 0.8;
    std::vector<double> prune_fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<size_t> k_values = {4, 8, 16};
    size_t n_unmarked = 3;
    size_t n_probes = 1000;
    std::vector<std::string> suites;  // empty = all
};

extern const std::vector<std::string> kAllSuites;  // canonical suite names

struct SuiteStatus {
    std::string name;
    bool ok = false;
    std::string error;
    std::vector<std::string> files;
};

struct EvalManifest {
    std::vector<SuiteStatus> suites;
    size_t succeeded() const;
    std::string to_json() const;
};

// Runs the selected suites, writes <suite>.json / <suite>.csv plus
// manifest.json into output_dir. Per-suite failures are recorded and do not
// stop the others.
EvalManifest evaluate_all(const Corpus& corpus, const EvalOptions& options,
                          const std::string& output_dir);

}  // namespace textmark
