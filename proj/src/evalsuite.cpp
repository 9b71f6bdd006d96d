#include "textmark/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>

#include "json.hpp"

namespace textmark {
namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<Example> trigger_examples(const TriggerSet& ts) {
    std::vector<Example> out;
    out.reserve(ts.records.size());
    for (const auto& r : ts.records) out.push_back({r.tokens, r.assigned_label});
    return out;
}

double trigger_accuracy_of(const Model& model, const TriggerSet& ts) {
    return evaluate_model(model, trigger_examples(ts)).accuracy;
}

void check_test_fraction(double f) {
    if (!(f > 0.0 && f < 1.0)) throw Error("test_fraction must be in (0, 1)");
}

SplitResult make_split(const Corpus& corpus, const TrainConfig& tc, double test_fraction) {
    check_test_fraction(test_fraction);
    return split(corpus, test_fraction, derive_seed(tc.seed, "split"));
}

RankStrategy other_strategy(RankStrategy s) {
    return s == RankStrategy::Asc ? RankStrategy::Des : RankStrategy::Asc;
}

// Shared generate -> embed pipeline over a train split.
struct Pipeline {
    SplitResult sp;
    TrainResult original;
    GenerationResult gen;
    EmbedResult marked;
};

Pipeline build_pipeline(const Corpus& corpus, const GenerationConfig& gc, const TrainConfig& tc,
                        double test_fraction) {
    Pipeline p;
    p.sp = make_split(corpus, tc, test_fraction);
    p.original = train(p.sp.train, tc);
    auto index = build_index(p.sp.train);
    p.gen = generate(p.sp.train, index, gc);
    p.marked = embed(p.gen.reduced_train, p.gen.trigger_set, tc);
    return p;
}

}  // namespace

FidelityReport run_fidelity(const Corpus& corpus, const GenerationConfig& gen_config,
                            const TrainConfig& train_config, double test_fraction,
                            bool both_strategies) {
    auto sp = make_split(corpus, train_config, test_fraction);
    auto test_examples = examples_from_corpus(sp.test);
    TrainResult original = train(sp.train, train_config);

    FidelityReport rep;
    rep.original_accuracy = evaluate_model(original.model, test_examples).accuracy;

    auto index = build_index(sp.train);
    std::vector<RankStrategy> strategies = {gen_config.strategy};
    if (both_strategies) strategies.push_back(other_strategy(gen_config.strategy));

    for (RankStrategy s : strategies) {
        GenerationConfig gc = gen_config;
        gc.strategy = s;
        auto gen = generate(sp.train, index, gc);
        auto marked = embed(gen.reduced_train, gen.trigger_set, train_config);
        double acc = evaluate_model(marked.model, test_examples).accuracy;
        rep.breakdown.push_back({to_string(s), acc, rep.original_accuracy - acc});
    }
    rep.watermarked_accuracy = rep.breakdown.front().watermarked_accuracy;
    rep.gap = rep.breakdown.front().gap;
    return rep;
}

std::string FidelityReport::to_json() const {
    ordered_json j;
    j["original_accuracy"] = original_accuracy;
    j["watermarked_accuracy"] = watermarked_accuracy;
    j["gap"] = gap;
    j["breakdown"] = ordered_json::array();
    for (const auto& e : breakdown) {
        j["breakdown"].push_back({{"strategy", e.strategy},
                                  {"watermarked_accuracy", e.watermarked_accuracy},
                                  {"gap", e.gap}});
    }
    return j.dump(2) + "\n";
}

std::string FidelityReport::to_csv() const {
    std::string out = "strategy,original_accuracy,watermarked_accuracy,gap\n";
    for (const auto& e : breakdown) {
        out += e.strategy + "," + fmt(original_accuracy) + "," + fmt(e.watermarked_accuracy) +
               "," + fmt(e.gap) + "\n";
    }
    return out;
}

CredibilityReport run_credibility(const Corpus& corpus, const GenerationConfig& gen_config,
                                  const TrainConfig& train_config, double test_fraction,
                                  bool both_strategies) {
    auto sp = make_split(corpus, train_config, test_fraction);
    TrainResult original = train(sp.train, train_config);
    auto index = build_index(sp.train);

    std::vector<RankStrategy> strategies = {gen_config.strategy};
    if (both_strategies) strategies.push_back(other_strategy(gen_config.strategy));

    CredibilityReport rep;
    for (RankStrategy s : strategies) {
        GenerationConfig gc = gen_config;
        gc.strategy = s;
        auto gen = generate(sp.train, index, gc);
        auto marked = embed(gen.reduced_train, gen.trigger_set, train_config);
        CredibilityEntry row;
        row.strategy = to_string(s);
        row.watermarked_trigger_accuracy = trigger_accuracy_of(marked.model, gen.trigger_set);
        row.original_trigger_accuracy = trigger_accuracy_of(original.model, gen.trigger_set);
        rep.rows.push_back(row);
    }
    rep.separation =
        rep.rows.front().watermarked_trigger_accuracy - rep.rows.front().original_trigger_accuracy;
    return rep;
}

std::string CredibilityReport::to_json() const {
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"strategy", r.strategy},
                             {"watermarked_trigger_accuracy", r.watermarked_trigger_accuracy},
                             {"original_trigger_accuracy", r.original_trigger_accuracy}});
    }
    j["separation"] = separation;
    return j.dump(2) + "\n";
}

std::string CredibilityReport::to_csv() const {
    std::string out = "strategy,watermarked_trigger_accuracy,original_trigger_accuracy\n";
    for (const auto& r : rows) {
        out += r.strategy + "," + fmt(r.watermarked_trigger_accuracy) + "," +
               fmt(r.original_trigger_accuracy) + "\n";
    }
    return out;
}

IntegrityReport run_integrity(const Corpus& corpus, const GenerationConfig& gen_config,
                              const TrainConfig& train_config, size_t n_unmarked, double theta,
                              double test_fraction) {
    if (n_unmarked == 0) throw Error("n_unmarked must be at least 1");
    Pipeline p = build_pipeline(corpus, gen_config, train_config, test_fraction);

    IntegrityReport rep;
    rep.theta = theta;

    {
        LocalModelOracle oracle(p.marked.model);
        auto report = verify(oracle, p.gen.trigger_set, theta);
        rep.watermarked_control = {train_config.seed, report.trigger_accuracy, report.decision};
    }

    for (size_t i = 0; i < n_unmarked; ++i) {
        TrainConfig tc = train_config;
        tc.seed = derive_seed(train_config.seed, "integrity-unmarked", i);
        TrainResult unmarked = train(p.sp.train, tc);
        LocalModelOracle oracle(unmarked.model);
        auto report = verify(oracle, p.gen.trigger_set, theta);
        rep.unmarked.push_back({tc.seed, report.trigger_accuracy, report.decision});
        if (report.owned()) ++rep.false_claims;
    }
    return rep;
}

std::string IntegrityReport::to_json() const {
    auto entry = [](const IntegrityEntry& e) {
        return ordered_json{{"seed", e.seed},
                            {"trigger_accuracy", e.trigger_accuracy},
                            {"decision", e.decision}};
    };
    ordered_json j;
    j["theta"] = theta;
    j["watermarked_control"] = entry(watermarked_control);
    j["unmarked"] = ordered_json::array();
    for (const auto& e : unmarked) j["unmarked"].push_back(entry(e));
    j["false_claims"] = false_claims;
    return j.dump(2) + "\n";
}

std::string IntegrityReport::to_csv() const {
    std::string out = "model,seed,trigger_accuracy,decision\n";
    out += "watermarked," + std::to_string(watermarked_control.seed) + "," +
           fmt(watermarked_control.trigger_accuracy) + "," + watermarked_control.decision + "\n";
    for (size_t i = 0; i < unmarked.size(); ++i) {
        out += "unmarked-" + std::to_string(i) + "," + std::to_string(unmarked[i].seed) + "," +
               fmt(unmarked[i].trigger_accuracy) + "," + unmarked[i].decision + "\n";
    }
    return out;
}

RobustnessCurve run_robustness(const Model& model, const TriggerSet& trigger, const Corpus& test,
                               const std::vector<double>& fractions,
                               const std::vector<Example>& train_examples) {
    if (fractions.empty()) throw Error("at least one prune fraction is required");
    for (size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] >= 0.0 && fractions[i] < 1.0))
            throw Error("prune fractions must be in [0, 1)");
        if (i > 0 && !(fractions[i] > fractions[i - 1]))
            throw Error("prune fractions must be strictly increasing");
    }
    if (train_examples.empty()) throw Error("train_examples must be non-empty");

    auto test_examples = examples_from_corpus(test);
    auto trig_examples = trigger_examples(trigger);

    RobustnessCurve curve;
    for (double f : fractions) {
        Model pruned = prune(model, f);
        RobustnessPoint pt;
        pt.prune_fraction = f;
        pt.test_accuracy = evaluate_model(pruned, test_examples).accuracy;
        pt.trigger_accuracy = evaluate_model(pruned, trig_examples).accuracy;
        pt.train_loss = loss_on_batch(pruned, train_examples);
        pt.validation_loss = loss_on_batch(pruned, test_examples);
        pt.model_digest = pruned.digest();
        curve.points.push_back(pt);
    }
    return curve;
}

std::string RobustnessCurve::to_json() const {
    ordered_json j;
    j["points"] = ordered_json::array();
    for (const auto& p : points) {
        j["points"].push_back({{"prune_fraction", p.prune_fraction},
                               {"test_accuracy", p.test_accuracy},
                               {"trigger_accuracy", p.trigger_accuracy},
                               {"train_loss", p.train_loss},
                               {"validation_loss", p.validation_loss},
                               {"model_digest", p.model_digest}});
    }
    return j.dump(2) + "\n";
}

std::string RobustnessCurve::to_csv() const {
    std::string out =
        "prune_fraction,test_accuracy,trigger_accuracy,train_loss,validation_loss,model_digest\n";
    for (const auto& p : points) {
        out += fmt(p.prune_fraction) + "," + fmt(p.test_accuracy) + "," +
               fmt(p.trigger_accuracy) + "," + fmt(p.train_loss) + "," +
               fmt(p.validation_loss) + "," + p.model_digest + "\n";
    }
    return out;
}

EfficiencyReport run_efficiency(const Corpus& corpus, const GenerationConfig& gen_config,
                                const TrainConfig& train_config, double test_fraction) {
    TrainConfig serial = train_config;
    serial.parallel = false;  // timings must not depend on the thread count

    auto sp = make_split(corpus, serial, test_fraction);
    TrainResult original = train(sp.train, serial);
    auto index = build_index(sp.train);
    auto gen = generate(sp.train, index, gen_config);
    auto marked = embed(gen.reduced_train, gen.trigger_set, serial);

    EfficiencyReport rep;
    auto collect = [](const std::vector<EpochMetrics>& epochs, std::vector<double>* out) {
        double sum = 0.0;
        for (const auto& e : epochs) {
            double s = std::max(e.seconds, 1e-9);
            out->push_back(s);
            sum += s;
        }
        return sum / static_cast<double>(epochs.size());
    };
    rep.original_mean = collect(original.epochs, &rep.original_epoch_seconds);
    rep.watermarked_mean = collect(marked.history, &rep.watermarked_epoch_seconds);
    rep.ratio = rep.watermarked_mean / rep.original_mean;
    rep.trigger_fraction =
        static_cast<double>(gen.trigger_set.size()) / static_cast<double>(sp.train.size());
    return rep;
}

std::string EfficiencyReport::to_json() const {
    ordered_json j;
    j["original_epoch_seconds"] = original_epoch_seconds;
    j["watermarked_epoch_seconds"] = watermarked_epoch_seconds;
    j["original_mean"] = original_mean;
    j["watermarked_mean"] = watermarked_mean;
    j["ratio"] = ratio;
    j["trigger_fraction"] = trigger_fraction;
    return j.dump(2) + "\n";
}

std::string EfficiencyReport::to_csv() const {
    std::string out = "epoch,original_seconds,watermarked_seconds\n";
    size_t n = std::max(original_epoch_seconds.size(), watermarked_epoch_seconds.size());
    for (size_t i = 0; i < n; ++i) {
        double o = i < original_epoch_seconds.size() ? original_epoch_seconds[i] : 0.0;
        double w = i < watermarked_epoch_seconds.size() ? watermarked_epoch_seconds[i] : 0.0;
        out += std::to_string(i + 1) + "," + fmt(o) + "," + fmt(w) + "\n";
    }
    return out;
}

SecurityProbeReport run_security_probe(const Model& model, const TriggerSet& trigger,
                                       const Corpus& reference, size_t n_probes, uint64_t seed) {
    if (n_probes < 100) throw Error("n_probes must be at least 100");
    if (trigger.records.empty()) throw Error("trigger set is empty");
    if (model.vocab.size() <= 1) throw Error("model vocabulary is empty");
    if (reference.documents.empty()) throw Error("reference corpus is empty");

    std::vector<size_t> lengths;
    lengths.reserve(trigger.records.size());
    for (const auto& r : trigger.records) lengths.push_back(r.tokens.size());

    Rng rng(seed);
    size_t vocab_words = model.vocab.size() - 1;  // skip the <unk> slot
    std::vector<Example> probes;
    probes.reserve(n_probes);
    for (size_t i = 0; i < n_probes; ++i) {
        size_t len = lengths[rng.below(lengths.size())];
        Example ex;
        ex.label = 0;
        ex.tokens.reserve(len);
        for (size_t t = 0; t < len; ++t)
            ex.tokens.push_back(model.vocab.words[1 + rng.below(vocab_words)]);
        probes.push_back(std::move(ex));
    }

    size_t n_classes = model.classes.size();
    auto rates_of = [&](const std::vector<Example>& examples) {
        std::vector<double> rates(n_classes, 0.0);
        auto preds = model.predict_batch(examples);
        for (int p : preds) rates[static_cast<size_t>(p)] += 1.0;
        for (double& r : rates) r /= static_cast<double>(examples.size());
        return rates;
    };

    SecurityProbeReport rep;
    rep.n_probes = n_probes;
    rep.class_rates = rates_of(probes);
    rep.base_rates = rates_of(examples_from_corpus(reference));
    for (size_t c = 0; c < n_classes; ++c)
        rep.max_deviation = std::max(rep.max_deviation,
                                     std::abs(rep.class_rates[c] - rep.base_rates[c]));
    return rep;
}

std::string SecurityProbeReport::to_json() const {
    ordered_json j;
    j["n_probes"] = n_probes;
    j["class_rates"] = class_rates;
    j["base_rates"] = base_rates;
    j["max_deviation"] = max_deviation;
    return j.dump(2) + "\n";
}

std::string SecuritySuiteReport::to_json() const {
    ordered_json j;
    j["classes"] = classes;
    j["watermarked"] = ordered_json::parse(watermarked.to_json());
    j["unmarked"] = ordered_json::parse(unmarked.to_json());
    j["max_class_difference"] = max_class_difference;
    return j.dump(2) + "\n";
}

std::string SecuritySuiteReport::to_csv() const {
    std::string out =
        "class,watermarked_probe_rate,watermarked_base_rate,unmarked_probe_rate,"
        "unmarked_base_rate\n";
    for (size_t c = 0; c < classes.size(); ++c) {
        out += classes[c] + "," + fmt(watermarked.class_rates[c]) + "," +
               fmt(watermarked.base_rates[c]) + "," + fmt(unmarked.class_rates[c]) + "," +
               fmt(unmarked.base_rates[c]) + "\n";
    }
    return out;
}

KSweepReport run_k_sweep(const Corpus& corpus, const std::vector<size_t>& k_values,
                         const GenerationConfig& gen_config, const TrainConfig& train_config,
                         double test_fraction) {
    if (k_values.empty()) throw Error("at least one K value is required");
    {
        std::set<size_t> seen(k_values.begin(), k_values.end());
        if (seen.size() != k_values.size()) throw Error("K values must be distinct");
    }

    auto sp = make_split(corpus, train_config, test_fraction);
    auto test_examples = examples_from_corpus(sp.test);
    auto index = build_index(sp.train);

    KSweepReport rep;
    for (size_t k : k_values) {
        KSweepRow row;
        row.k = k;
        try {
            GenerationConfig gc = gen_config;
            gc.exchange_count = k;
            auto gen = generate(sp.train, index, gc);
            auto marked = embed(gen.reduced_train, gen.trigger_set, train_config);

            double eff_sum = 0.0;
            for (const auto& r : gen.trigger_set.records)
                eff_sum += static_cast<double>(r.swapped_out.size());
            row.effective_k_mean = eff_sum / static_cast<double>(gen.trigger_set.size());
            row.test_accuracy = evaluate_model(marked.model, test_examples).accuracy;
            row.trigger_accuracy = trigger_accuracy_of(marked.model, gen.trigger_set);
            row.final_training_loss = marked.history.back().training_loss;
            row.final_validation_loss = marked.history.back().validation_loss;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rep.rows.push_back(row);
    }
    return rep;
}

std::string KSweepReport::to_json() const {
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["k"] = r.k;
        if (r.error.empty()) {
            row["effective_k_mean"] = r.effective_k_mean;
            row["test_accuracy"] = r.test_accuracy;
            row["trigger_accuracy"] = r.trigger_accuracy;
            row["final_training_loss"] = r.final_training_loss;
            row["final_validation_loss"] = r.final_validation_loss;
        } else {
            row["error"] = r.error;
        }
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

std::string KSweepReport::to_csv() const {
    std::string out =
        "k,effective_k_mean,test_accuracy,trigger_accuracy,final_training_loss,"
        "final_validation_loss,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += std::to_string(r.k) + "," + fmt(r.effective_k_mean) + "," + fmt(r.test_accuracy) +
               "," + fmt(r.trigger_accuracy) + "," + fmt(r.final_training_loss) + "," +
               fmt(r.final_validation_loss) + "," + err + "\n";
    }
    return out;
}

const std::vector<std::string> kAllSuites = {"fidelity",   "credibility", "integrity",
                                             "robustness", "efficiency",  "security",
                                             "k-sweep"};

size_t EvalManifest::succeeded() const {
    size_t n = 0;
    for (const auto& s : suites)
        if (s.ok) ++n;
    return n;
}

std::string EvalManifest::to_json() const {
    ordered_json j;
    j["suites"] = ordered_json::array();
    for (const auto& s : suites) {
        ordered_json row;
        row["name"] = s.name;
        row["status"] = s.ok ? "ok" : "error";
        if (!s.error.empty()) row["error"] = s.error;
        row["files"] = s.files;
        j["suites"].push_back(row);
    }
    j["succeeded"] = succeeded();
    j["total"] = suites.size();
    return j.dump(2) + "\n";
}

namespace {

void write_suite_files(const std::string& dir, const std::string& stem, const std::string& json,
                       const std::string& csv, SuiteStatus* st) {
    std::filesystem::path base(dir);
    auto jpath = (base / (stem + ".json")).string();
    auto cpath = (base / (stem + ".csv")).string();
    write_text_file(jpath, json);
    write_text_file(cpath, csv);
    st->files.push_back(stem + ".json");
    st->files.push_back(stem + ".csv");
}

}  // namespace

EvalManifest evaluate_all(const Corpus& corpus, const EvalOptions& options,
                          const std::string& output_dir) {
    std::vector<std::string> selected = options.suites.empty() ? kAllSuites : options.suites;
    for (const auto& s : selected) {
        if (std::find(kAllSuites.begin(), kAllSuites.end(), s) == kAllSuites.end()) {
            std::string valid;
            for (const auto& name : kAllSuites) {
                if (!valid.empty()) valid += ", ";
                valid += name;
            }
            throw Error("unknown evaluation suite '" + s + "'; valid suites: " + valid);
        }
    }

    std::filesystem::create_directories(output_dir);

    // Robustness and security share one trained pipeline.
    std::optional<Pipeline> pipe;
    auto pipeline = [&]() -> Pipeline& {
        if (!pipe)
            pipe = build_pipeline(corpus, options.generation, options.train, options.test_fraction);
        return *pipe;
    };

    EvalManifest manifest;
    for (const auto& name : selected) {
        SuiteStatus st;
        st.name = name;
        try {
            if (name == "fidelity") {
                auto rep = run_fidelity(corpus, options.generation, options.train,
                                        options.test_fraction);
                write_suite_files(output_dir, "fidelity", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "credibility") {
                auto rep = run_credibility(corpus, options.generation, options.train,
                                           options.test_fraction);
                write_suite_files(output_dir, "credibility", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "integrity") {
                auto rep = run_integrity(corpus, options.generation, options.train,
                                         options.n_unmarked, options.theta, options.test_fraction);
                write_suite_files(output_dir, "integrity", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "robustness") {
                Pipeline& p = pipeline();
                auto train_examples = examples_from_corpus(p.gen.reduced_train);
                auto te = trigger_examples(p.gen.trigger_set);
                train_examples.insert(train_examples.end(), te.begin(), te.end());
                auto rep = run_robustness(p.marked.model, p.gen.trigger_set, p.sp.test,
                                          options.prune_fractions, train_examples);
                write_suite_files(output_dir, "robustness", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "efficiency") {
                auto rep = run_efficiency(corpus, options.generation, options.train,
                                          options.test_fraction);
                write_suite_files(output_dir, "efficiency", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "security") {
                Pipeline& p = pipeline();
                uint64_t probe_seed = derive_seed(options.generation.seed, "security-probe");
                SecuritySuiteReport rep;
                rep.classes = p.marked.model.classes;
                rep.watermarked = run_security_probe(p.marked.model, p.gen.trigger_set, p.sp.test,
                                                     options.n_probes, probe_seed);
                rep.unmarked = run_security_probe(p.original.model, p.gen.trigger_set, p.sp.test,
                                                  options.n_probes, probe_seed);
                for (size_t c = 0; c < rep.classes.size(); ++c) {
                    double d =
                        std::abs(rep.watermarked.class_rates[c] - rep.unmarked.class_rates[c]);
                    rep.max_class_difference = std::max(rep.max_class_difference, d);
                }
                write_suite_files(output_dir, "security", rep.to_json(), rep.to_csv(), &st);
            } else if (name == "k-sweep") {
                auto rep = run_k_sweep(corpus, options.k_values, options.generation, options.train,
                                       options.test_fraction);
                write_suite_files(output_dir, "k-sweep", rep.to_json(), rep.to_csv(), &st);
            }
            st.ok = true;
        } catch (const std::exception& e) {
            st.ok = false;
            st.error = e.what();
        }
        manifest.suites.push_back(st);
    }

    write_text_file((std::filesystem::path(output_dir) / "manifest.json").string(),
                    manifest.to_json());
    return manifest;
}

}  // namespace textmark
