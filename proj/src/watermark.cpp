#include "textmark/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace textmark {

EmbedResult embed(const Corpus& reduced_train, const TriggerSet& trigger,
                  const TrainConfig& config) {
    if (trigger.classes != reduced_train.classes)
        throw Error("trigger set and corpus disagree on the class set");

    EmbedResult result;
    if (trigger.records.empty())
        result.warnings.push_back("trigger set is empty: embedding degenerates to plain training");
    if (trigger.reduced_corpus_digest != reduced_train.digest())
        result.warnings.push_back(
            "corpus digest mismatch: the trigger set was not generated from this corpus");

    // Insert trigger records at seeded random positions; the base order of
    // reduced_train is preserved, so an empty trigger set reproduces plain
    // training byte for byte.
    std::vector<Example> stream;
    stream.reserve(reduced_train.size() + trigger.size());
    for (const auto& d : reduced_train.documents) stream.push_back({d.tokens, d.label});
    Rng rng(derive_seed(config.seed, "embed-shuffle"));
    for (const auto& r : trigger.records) {
        size_t pos = rng.below(stream.size() + 1);
        stream.insert(stream.begin() + static_cast<std::ptrdiff_t>(pos),
                      {r.tokens, r.assigned_label});
    }

    result.training_set_size = stream.size();
    TrainResult tr = train(stream, reduced_train.classes, config);
    result.model = std::move(tr.model);
    result.history = std::move(tr.epochs);
    return result;
}

double binomial_tail(size_t k, size_t n, double p) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double logp = std::log(p), logq = std::log1p(-p);
    double sum = 0.0;
    for (size_t i = k; i <= n; ++i) {
        double logc = std::lgamma(static_cast<double>(n) + 1.0) -
                      std::lgamma(static_cast<double>(i) + 1.0) -
                      std::lgamma(static_cast<double>(n - i) + 1.0);
        sum += std::exp(logc + static_cast<double>(i) * logp +
                        static_cast<double>(n - i) * logq);
    }
    return std::min(sum, 1.0);
}

VerificationReport verify(const ModelOracle& oracle, const TriggerSet& trigger, double theta,
                          const VerifyOptions& options) {
    if (trigger.records.empty()) throw Error("cannot verify with an empty trigger set");
    if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must be in (0, 1]");
    if (trigger.classes.size() < 2) throw Error("trigger set has fewer than 2 classes");

    const size_t n = trigger.records.size();
    std::vector<int> predictions(n, -1);
    std::vector<char> record_errored(n, 0);
    std::exception_ptr first_error = nullptr;

    auto query = [&](size_t i) {
        try {
            predictions[i] = oracle.predict(trigger.records[i].tokens);
        } catch (...) {
            if (options.skip_failed_records) {
                record_errored[i] = 1;
            } else {
#ifdef _OPENMP
#pragma omp critical(textmark_verify_error)
#endif
                {
                    if (!first_error) first_error = std::current_exception();
                }
            }
        }
    };

    if (oracle.concurrent_safe()) {
        const int64_t count = static_cast<int64_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int64_t i = 0; i < count; ++i) query(static_cast<size_t>(i));
    } else {
        for (size_t i = 0; i < n; ++i) {
            query(i);
            if (first_error) break;
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    VerificationReport report;
    report.theta = theta;
    report.chance_rate = 1.0 / static_cast<double>(trigger.classes.size());
    report.per_record.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& r = trigger.records[i];
        RecordOutcome out;
        out.doc_id = r.doc_id;
        out.expected = r.assigned_label;
        out.errored = record_errored[i] != 0;
        if (!out.errored) {
            out.predicted = predictions[i];
            out.match = predictions[i] == r.assigned_label;
            if (out.match) ++report.matches;
            ++report.trigger_count;
        } else {
            ++report.errored;
        }
        report.per_record.push_back(std::move(out));
    }
    if (report.trigger_count == 0)
        throw Error("all oracle queries failed; nothing to verify");

    report.trigger_accuracy =
        static_cast<double>(report.matches) / static_cast<double>(report.trigger_count);
    report.decision = report.trigger_accuracy >= theta ? "OWNED" : "NOT_OWNED";
    report.p_value = binomial_tail(report.matches, report.trigger_count, report.chance_rate);
    return report;
}

std::string VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["trigger_count"] = trigger_count;
    j["matches"] = matches;
    j["errored"] = errored;
    j["trigger_accuracy"] = trigger_accuracy;
    j["theta"] = theta;
    j["decision"] = decision;
    j["chance_rate"] = chance_rate;
    j["p_value"] = p_value;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : per_record) {
        nlohmann::ordered_json e;
        e["doc_id"] = r.doc_id;
        e["predicted"] = r.predicted;
        e["expected"] = r.expected;
        e["match"] = r.match;
        if (r.errored) e["errored"] = true;
        arr.push_back(std::move(e));
    }
    j["per_record"] = std::move(arr);
    return j.dump(2);
}

}  // namespace textmark
