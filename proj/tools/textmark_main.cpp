#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "textmark/classifier.hpp"
#include "textmark/common.hpp"
#include "textmark/corpus.hpp"
#include "textmark/demo.hpp"
#include "textmark/evalsuite.hpp"
#include "textmark/tfidf.hpp"
#include "textmark/trigger.hpp"
#include "textmark/watermark.hpp"

using namespace textmark;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            return raw;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (raw == "true" || raw == "1" || raw == "yes") return true;
            if (raw == "false" || raw == "0" || raw == "no") return false;
            throw Error("expected a boolean");
        } else if constexpr (std::is_floating_point_v<T>) {
            size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw Error("trailing characters");
            return static_cast<T>(v);
        } else {
            static_assert(std::is_unsigned_v<T>);
            if (!raw.empty() && raw[0] == '-') throw Error("expected a non-negative integer");
            size_t pos = 0;
            unsigned long long v = std::stoull(raw, &pos);
            if (pos != raw.size()) throw Error("trailing characters");
            return static_cast<T>(v);
        }
    } catch (const Error&) {
        throw Error("config key '" + key + "': invalid value '" + raw + "'");
    } catch (const std::exception&) {
        throw Error("config key '" + key + "': invalid value '" + raw + "'");
    }
}

// Flat key=value config file. Flags given on the command line win; config
// values fill in the rest.
class ConfigOverlay {
  public:
    void load(const std::string& path) {
        std::string text = read_text_file(path);
        size_t line_no = 0, start = 0;
        while (start <= text.size()) {
            size_t end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            std::string line = trim(text.substr(start, end - start));
            ++line_no;
            start = end + 1;
            if (line.empty() || line[0] == '#' || line[0] == ';') continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(path + ":" + std::to_string(line_no) + ": expected key=value");
            std::string key = trim(line.substr(0, eq));
            if (key.empty())
                throw Error(path + ":" + std::to_string(line_no) + ": empty config key");
            kv_[key] = trim(line.substr(eq + 1));
        }
    }

    // Returns true when the option has an explicit value (flag or config).
    template <typename T>
    bool resolve(const CLI::App& cmd, const std::string& key, T* target) const {
        const CLI::Option* opt = cmd.get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) return true;
        auto it = kv_.find(key);
        if (it == kv_.end()) return false;
        *target = parse_value<T>(key, it->second);
        return true;
    }

  private:
    std::map<std::string, std::string> kv_;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t end = s.find(',', start);
        if (end == std::string::npos) end = s.size();
        std::string item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(item);
        start = end + 1;
    }
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) out.push_back(parse_value<T>(key, item));
    return out;
}

std::string metrics_csv(const std::vector<EpochMetrics>& epochs) {
    auto f = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::string out = "epoch,training_loss,validation_loss,accuracy,precision,recall,f1\n";
    for (const auto& e : epochs) {
        out += std::to_string(e.epoch) + "," + f(e.training_loss) + "," + f(e.validation_loss) +
               "," + f(e.accuracy) + "," + f(e.precision) + "," + f(e.recall) + "," + f(e.f1) +
               "\n";
    }
    return out;
}

std::string under_dir(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void require_value(const std::string& value, const std::string& flag) {
    if (value.empty()) throw Error("--" + flag + " is required (flag or config file)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TF-IDF trigger-set watermarking for text classifiers"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 0;
    std::string output_dir = ".";
    bool quiet = false;
    app.add_option("--config", config_path, "flat key=value config file; flags override it");
    app.add_option("--seed", seed, "root RNG seed (default 0)");
    app.add_option("--output-dir", output_dir, "directory for default output paths (default .)");
    app.add_flag("--quiet", quiet, "suppress status output");

    // generate
    auto* cg = app.add_subcommand("generate", "build a trigger set from a training corpus");
    cg->fallthrough();
    std::string g_corpus, g_format = "jsonl", g_stopwords = "en-v1", g_strategy = "ASC";
    std::string g_trigger_out, g_reduced_out;
    size_t g_B = 0, g_K = 80;
    double g_theta_hint = 0.0;
    cg->add_option("--corpus", g_corpus, "training corpus file");
    cg->add_option("--format", g_format, "corpus format: jsonl or csv (default jsonl)");
    cg->add_option("--stopwords", g_stopwords, "stop word list: en-v1 or none (default en-v1)");
    cg->add_option("--B", g_B, "document pairs drawn per class pair");
    cg->add_option("--K", g_K, "words to exchange per pair, upper bound (default 80)");
    cg->add_option("--strategy", g_strategy, "rank order: ASC or DES (default ASC)");
    cg->add_option("--theta-hint", g_theta_hint, "verification threshold hint stored in the file");
    cg->add_option("--trigger-out", g_trigger_out, "trigger output (default <output-dir>/trigger.json)");
    cg->add_option("--reduced-out", g_reduced_out,
                   "reduced corpus output (default <output-dir>/reduced_train.jsonl)");

    // embed
    auto* ce = app.add_subcommand("embed", "train a watermarked model on reduced corpus + trigger");
    ce->fallthrough();
    std::string e_corpus, e_format = "jsonl", e_stopwords = "en-v1", e_trigger;
    std::string e_model_out, e_metrics_out;
    size_t e_embed_dim = 64, e_hidden_dim = 32, e_batch = 32, e_epochs = 19;
    double e_lr = 0.05, e_vf = 0.1;
    bool e_serial = false;
    ce->add_option("--corpus", e_corpus, "reduced training corpus file");
    ce->add_option("--format", e_format, "corpus format: jsonl or csv (default jsonl)");
    ce->add_option("--stopwords", e_stopwords, "stop word list (default en-v1)");
    ce->add_option("--trigger", e_trigger, "trigger set file");
    ce->add_option("--embed-dim", e_embed_dim, "embedding width (default 64)");
    ce->add_option("--hidden-dim", e_hidden_dim, "hidden layer width (default 32)");
    ce->add_option("--learning-rate", e_lr, "gradient step size (default 0.05)");
    ce->add_option("--batch-size", e_batch, "mini-batch size (default 32)");
    ce->add_option("--epochs", e_epochs, "training epochs (default 19)");
    ce->add_option("--validation-fraction", e_vf, "validation share in (0,1) (default 0.1)");
    ce->add_flag("--serial", e_serial, "disable OpenMP kernels");
    ce->add_option("--model-out", e_model_out, "model output (default <output-dir>/model.bin)");
    ce->add_option("--metrics-out", e_metrics_out,
                   "per-epoch metrics CSV (default <output-dir>/metrics.csv)");

    // train (unwatermarked baseline)
    auto* ct = app.add_subcommand("train", "train an unwatermarked baseline model");
    ct->fallthrough();
    std::string t_corpus, t_format = "jsonl", t_stopwords = "en-v1";
    std::string t_model_out, t_metrics_out;
    size_t t_embed_dim = 64, t_hidden_dim = 32, t_batch = 32, t_epochs = 19;
    double t_lr = 0.05, t_vf = 0.1;
    bool t_serial = false;
    ct->add_option("--corpus", t_corpus, "training corpus file");
    ct->add_option("--format", t_format, "corpus format: jsonl or csv (default jsonl)");
    ct->add_option("--stopwords", t_stopwords, "stop word list (default en-v1)");
    ct->add_option("--embed-dim", t_embed_dim, "embedding width (default 64)");
    ct->add_option("--hidden-dim", t_hidden_dim, "hidden layer width (default 32)");
    ct->add_option("--learning-rate", t_lr, "gradient step size (default 0.05)");
    ct->add_option("--batch-size", t_batch, "mini-batch size (default 32)");
    ct->add_option("--epochs", t_epochs, "training epochs (default 19)");
    ct->add_option("--validation-fraction", t_vf, "validation share in (0,1) (default 0.1)");
    ct->add_flag("--serial", t_serial, "disable OpenMP kernels");
    ct->add_option("--model-out", t_model_out, "model output (default <output-dir>/baseline.bin)");
    ct->add_option("--metrics-out", t_metrics_out,
                   "per-epoch metrics CSV (default <output-dir>/baseline_metrics.csv)");

    // verify
    auto* cv = app.add_subcommand("verify", "test ownership of a model against a trigger set");
    cv->fallthrough();
    std::string v_model, v_trigger, v_report_out;
    double v_theta = 0.8;
    bool v_skip_failed = false;
    cv->add_option("--model", v_model, "model file to query");
    cv->add_option("--trigger", v_trigger, "trigger set file");
    cv->add_option("--theta", v_theta, "ownership threshold in (0,1] (default 0.8)");
    cv->add_flag("--skip-failed", v_skip_failed,
                 "drop records the oracle fails on instead of aborting");
    cv->add_option("--report-out", v_report_out,
                   "JSON report output (default <output-dir>/verification.json)");

    // prune
    auto* cp = app.add_subcommand("prune", "zero the smallest-magnitude fraction of weights");
    cp->fallthrough();
    std::string p_model, p_model_out;
    double p_fraction = 0.0;
    cp->add_option("--model", p_model, "model file to prune");
    cp->add_option("--fraction", p_fraction, "fraction of weights to zero, in [0,1)");
    cp->add_option("--model-out", p_model_out, "pruned model output (default <output-dir>/pruned.bin)");

    // evaluate
    auto* cx = app.add_subcommand("evaluate", "run the experiment suites and write reports");
    cx->fallthrough();
    std::string x_corpus, x_format = "jsonl", x_stopwords = "en-v1", x_strategy = "ASC";
    std::string x_suite = "all", x_prune_fractions = "0,0.1,0.2,0.3,0.4,0.5", x_k_values = "4,8,16";
    size_t x_B = 25, x_K = 8, x_embed_dim = 64, x_hidden_dim = 32, x_batch = 32, x_epochs = 19;
    size_t x_n_unmarked = 3, x_n_probes = 1000;
    double x_lr = 0.05, x_vf = 0.1, x_test_fraction = 0.2, x_theta = 0.8;
    bool x_serial = false;
    cx->add_option("--corpus", x_corpus, "corpus file (split internally into train/test)");
    cx->add_option("--format", x_format, "corpus format: jsonl or csv (default jsonl)");
    cx->add_option("--stopwords", x_stopwords, "stop word list (default en-v1)");
    cx->add_option("--suite", x_suite,
                   "comma-separated suites or 'all': fidelity, credibility, integrity, "
                   "robustness, efficiency, security, k-sweep");
    cx->add_option("--B", x_B, "document pairs per class pair (default 25)");
    cx->add_option("--K", x_K, "words to exchange per pair (default 8)");
    cx->add_option("--strategy", x_strategy, "primary rank order: ASC or DES (default ASC)");
    cx->add_option("--theta", x_theta, "ownership threshold (default 0.8)");
    cx->add_option("--test-fraction", x_test_fraction, "held-out test share (default 0.2)");
    cx->add_option("--embed-dim", x_embed_dim, "embedding width (default 64)");
    cx->add_option("--hidden-dim", x_hidden_dim, "hidden layer width (default 32)");
    cx->add_option("--learning-rate", x_lr, "gradient step size (default 0.05)");
    cx->add_option("--batch-size", x_batch, "mini-batch size (default 32)");
    cx->add_option("--epochs", x_epochs, "training epochs (default 19)");
    cx->add_option("--validation-fraction", x_vf, "validation share (default 0.1)");
    cx->add_flag("--serial", x_serial, "disable OpenMP kernels");
    cx->add_option("--n-unmarked", x_n_unmarked, "independent unmarked models (default 3)");
    cx->add_option("--n-probes", x_n_probes, "random probes for the security suite (default 1000)");
    cx->add_option("--prune-fractions", x_prune_fractions,
                   "comma-separated fractions for robustness (default 0,0.1,0.2,0.3,0.4,0.5)");
    cx->add_option("--k-values", x_k_values, "comma-separated K values for the sweep (default 4,8,16)");

    // make-demo-corpus
    auto* cd = app.add_subcommand("make-demo-corpus", "synthesize a two-class demo corpus");
    cd->fallthrough();
    std::string d_out;
    size_t d_n_docs = 2500;
    cd->add_option("--n-docs", d_n_docs, "number of documents (default 2500)");
    cd->add_option("--out", d_out, "output JSONL path (default <output-dir>/demo.jsonl)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ConfigOverlay cfg;
        if (app.count("--config") > 0) cfg.load(config_path);
        cfg.resolve(app, "seed", &seed);
        cfg.resolve(app, "output-dir", &output_dir);
        cfg.resolve(app, "quiet", &quiet);

        auto note = [&](const char* fmt_str, auto... args) {
            if (!quiet) std::fprintf(stderr, fmt_str, args...);
        };

        auto load = [&](const std::string& path, const std::string& format,
                        const std::string& stopwords) {
            NormalizationConfig norm;
            norm.stopword_list_id = stopwords;
            LoadReport report;
            Corpus corpus = load_corpus(path, corpus_format_from_string(format), norm, &report);
            note("loaded %zu documents from %s (%zu dropped empty, %zu classes)\n", report.loaded,
                 path.c_str(), report.dropped_empty, corpus.classes.size());
            return corpus;
        };

        if (cg->parsed()) {
            cfg.resolve(*cg, "corpus", &g_corpus);
            cfg.resolve(*cg, "format", &g_format);
            cfg.resolve(*cg, "stopwords", &g_stopwords);
            cfg.resolve(*cg, "B", &g_B);
            cfg.resolve(*cg, "K", &g_K);
            cfg.resolve(*cg, "strategy", &g_strategy);
            bool have_hint = cfg.resolve(*cg, "theta-hint", &g_theta_hint);
            cfg.resolve(*cg, "trigger-out", &g_trigger_out);
            cfg.resolve(*cg, "reduced-out", &g_reduced_out);
            require_value(g_corpus, "corpus");
            if (g_trigger_out.empty()) g_trigger_out = under_dir(output_dir, "trigger.json");
            if (g_reduced_out.empty())
                g_reduced_out = under_dir(output_dir, "reduced_train.jsonl");

            Corpus corpus = load(g_corpus, g_format, g_stopwords);
            TfIdfIndex index = build_index(corpus);
            GenerationConfig gc;
            gc.pairs_per_class_pair = g_B;
            gc.exchange_count = g_K;
            gc.strategy = rank_strategy_from_string(g_strategy);
            gc.seed = seed;
            if (have_hint) gc.theta_hint = g_theta_hint;
            GenerationResult result = generate(corpus, index, gc);
            save_trigger_set(result.trigger_set, g_trigger_out);
            save_corpus_jsonl(result.reduced_train, g_reduced_out);
            note("wrote %zu trigger records to %s, %zu reduced documents to %s\n",
                 result.trigger_set.size(), g_trigger_out.c_str(), result.reduced_train.size(),
                 g_reduced_out.c_str());
            std::printf("trigger digest: %s\n", result.trigger_set.digest().c_str());
            return 0;
        }

        if (ce->parsed()) {
            cfg.resolve(*ce, "corpus", &e_corpus);
            cfg.resolve(*ce, "format", &e_format);
            cfg.resolve(*ce, "stopwords", &e_stopwords);
            cfg.resolve(*ce, "trigger", &e_trigger);
            cfg.resolve(*ce, "embed-dim", &e_embed_dim);
            cfg.resolve(*ce, "hidden-dim", &e_hidden_dim);
            cfg.resolve(*ce, "learning-rate", &e_lr);
            cfg.resolve(*ce, "batch-size", &e_batch);
            cfg.resolve(*ce, "epochs", &e_epochs);
            cfg.resolve(*ce, "validation-fraction", &e_vf);
            cfg.resolve(*ce, "serial", &e_serial);
            cfg.resolve(*ce, "model-out", &e_model_out);
            cfg.resolve(*ce, "metrics-out", &e_metrics_out);
            require_value(e_corpus, "corpus");
            require_value(e_trigger, "trigger");
            if (e_model_out.empty()) e_model_out = under_dir(output_dir, "model.bin");
            if (e_metrics_out.empty()) e_metrics_out = under_dir(output_dir, "metrics.csv");

            Corpus reduced = load(e_corpus, e_format, e_stopwords);
            TriggerSet trigger = load_trigger_set(e_trigger);
            TrainConfig tc;
            tc.embed_dim = e_embed_dim;
            tc.hidden_dim = e_hidden_dim;
            tc.learning_rate = e_lr;
            tc.batch_size = e_batch;
            tc.epochs = e_epochs;
            tc.validation_fraction = e_vf;
            tc.seed = seed;
            tc.parallel = !e_serial;
            EmbedResult result = embed(reduced, trigger, tc);
            for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            save_model(result.model, e_model_out);
            write_text_file(e_metrics_out, metrics_csv(result.history));
            const EpochMetrics& last = result.history.back();
            note("trained on %zu documents, final validation accuracy %.4f, f1 %.4f\n",
                 result.training_set_size, last.accuracy, last.f1);
            std::printf("model digest: %s\n", result.model.digest().c_str());
            return 0;
        }

        if (ct->parsed()) {
            cfg.resolve(*ct, "corpus", &t_corpus);
            cfg.resolve(*ct, "format", &t_format);
            cfg.resolve(*ct, "stopwords", &t_stopwords);
            cfg.resolve(*ct, "embed-dim", &t_embed_dim);
            cfg.resolve(*ct, "hidden-dim", &t_hidden_dim);
            cfg.resolve(*ct, "learning-rate", &t_lr);
            cfg.resolve(*ct, "batch-size", &t_batch);
            cfg.resolve(*ct, "epochs", &t_epochs);
            cfg.resolve(*ct, "validation-fraction", &t_vf);
            cfg.resolve(*ct, "serial", &t_serial);
            cfg.resolve(*ct, "model-out", &t_model_out);
            cfg.resolve(*ct, "metrics-out", &t_metrics_out);
            require_value(t_corpus, "corpus");
            if (t_model_out.empty()) t_model_out = under_dir(output_dir, "baseline.bin");
            if (t_metrics_out.empty())
                t_metrics_out = under_dir(output_dir, "baseline_metrics.csv");

            Corpus corpus = load(t_corpus, t_format, t_stopwords);
            TrainConfig tc;
            tc.embed_dim = t_embed_dim;
            tc.hidden_dim = t_hidden_dim;
            tc.learning_rate = t_lr;
            tc.batch_size = t_batch;
            tc.epochs = t_epochs;
            tc.validation_fraction = t_vf;
            tc.seed = seed;
            tc.parallel = !t_serial;
            TrainResult result = train(corpus, tc);
            save_model(result.model, t_model_out);
            write_text_file(t_metrics_out, metrics_csv(result.epochs));
            const EpochMetrics& last = result.epochs.back();
            note("trained on %zu documents, final validation accuracy %.4f, f1 %.4f\n",
                 corpus.size(), last.accuracy, last.f1);
            std::printf("model digest: %s\n", result.model.digest().c_str());
            return 0;
        }

        if (cv->parsed()) {
            cfg.resolve(*cv, "model", &v_model);
            cfg.resolve(*cv, "trigger", &v_trigger);
            cfg.resolve(*cv, "theta", &v_theta);
            cfg.resolve(*cv, "skip-failed", &v_skip_failed);
            cfg.resolve(*cv, "report-out", &v_report_out);
            require_value(v_model, "model");
            require_value(v_trigger, "trigger");
            if (v_report_out.empty()) v_report_out = under_dir(output_dir, "verification.json");

            Model model = load_model(v_model);
            TriggerSet trigger = load_trigger_set(v_trigger);
            VerifyOptions options;
            options.skip_failed_records = v_skip_failed;
            LocalModelOracle oracle(std::move(model));
            VerificationReport report = verify(oracle, trigger, v_theta, options);
            write_text_file(v_report_out, report.to_json());
            std::printf("%s (trigger accuracy %.4f over %zu records, theta %.4f, p-value %.3g)\n",
                        report.decision.c_str(), report.trigger_accuracy, report.trigger_count,
                        report.theta, report.p_value);
            return report.owned() ? 0 : 1;
        }

        if (cp->parsed()) {
            cfg.resolve(*cp, "model", &p_model);
            cfg.resolve(*cp, "fraction", &p_fraction);
            cfg.resolve(*cp, "model-out", &p_model_out);
            require_value(p_model, "model");
            if (p_model_out.empty()) p_model_out = under_dir(output_dir, "pruned.bin");

            Model model = load_model(p_model);
            Model pruned = prune(model, p_fraction);
            save_model(pruned, p_model_out);
            note("pruned %.2f%% of %zu weights\n", p_fraction * 100.0, model.parameter_count());
            std::printf("model digest: %s\n", pruned.digest().c_str());
            return 0;
        }

        if (cx->parsed()) {
            cfg.resolve(*cx, "corpus", &x_corpus);
            cfg.resolve(*cx, "format", &x_format);
            cfg.resolve(*cx, "stopwords", &x_stopwords);
            cfg.resolve(*cx, "suite", &x_suite);
            cfg.resolve(*cx, "B", &x_B);
            cfg.resolve(*cx, "K", &x_K);
            cfg.resolve(*cx, "strategy", &x_strategy);
            cfg.resolve(*cx, "theta", &x_theta);
            cfg.resolve(*cx, "test-fraction", &x_test_fraction);
            cfg.resolve(*cx, "embed-dim", &x_embed_dim);
            cfg.resolve(*cx, "hidden-dim", &x_hidden_dim);
            cfg.resolve(*cx, "learning-rate", &x_lr);
            cfg.resolve(*cx, "batch-size", &x_batch);
            cfg.resolve(*cx, "epochs", &x_epochs);
            cfg.resolve(*cx, "validation-fraction", &x_vf);
            cfg.resolve(*cx, "serial", &x_serial);
            cfg.resolve(*cx, "n-unmarked", &x_n_unmarked);
            cfg.resolve(*cx, "n-probes", &x_n_probes);
            cfg.resolve(*cx, "prune-fractions", &x_prune_fractions);
            cfg.resolve(*cx, "k-values", &x_k_values);
            require_value(x_corpus, "corpus");

            Corpus corpus = load(x_corpus, x_format, x_stopwords);
            EvalOptions options;
            options.generation.pairs_per_class_pair = x_B;
            options.generation.exchange_count = x_K;
            options.generation.strategy = rank_strategy_from_string(x_strategy);
            options.generation.seed = seed;
            options.train.embed_dim = x_embed_dim;
            options.train.hidden_dim = x_hidden_dim;
            options.train.learning_rate = x_lr;
            options.train.batch_size = x_batch;
            options.train.epochs = x_epochs;
            options.train.validation_fraction = x_vf;
            options.train.seed = seed;
            options.train.parallel = !x_serial;
            options.test_fraction = x_test_fraction;
            options.theta = x_theta;
            options.prune_fractions = parse_list<double>("prune-fractions", x_prune_fractions);
            options.k_values = parse_list<size_t>("k-values", x_k_values);
            options.n_unmarked = x_n_unmarked;
            options.n_probes = x_n_probes;
            if (x_suite != "all") options.suites = split_list(x_suite);

            EvalManifest manifest = evaluate_all(corpus, options, output_dir);
            for (const auto& s : manifest.suites) {
                if (s.ok) {
                    if (!quiet) std::printf("%-12s ok\n", s.name.c_str());
                } else {
                    if (!quiet) std::printf("%-12s error\n", s.name.c_str());
                    std::fprintf(stderr, "suite %s failed: %s\n", s.name.c_str(),
                                 s.error.c_str());
                }
            }
            std::printf("%zu/%zu suites succeeded; reports in %s\n", manifest.succeeded(),
                        manifest.suites.size(), output_dir.c_str());
            if (manifest.succeeded() == 0) {
                std::fprintf(stderr, "error: all evaluation suites failed\n");
                return 2;
            }
            return 0;
        }

        if (cd->parsed()) {
            cfg.resolve(*cd, "n-docs", &d_n_docs);
            cfg.resolve(*cd, "out", &d_out);
            if (d_out.empty()) d_out = under_dir(output_dir, "demo.jsonl");

            DemoCorpusConfig dc;
            dc.n_documents = d_n_docs;
            dc.seed = seed;
            write_demo_corpus(dc, d_out);
            std::printf("wrote %zu documents to %s\n", d_n_docs, d_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    std::fprintf(stderr, "error: no command selected\n");
    return 2;
}
