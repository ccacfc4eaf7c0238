#include "lexcite/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lexcite {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    if (dir.back() == '/') return dir + name;
    return dir + "/" + name;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out.empty() ? std::string("class") : out;
}

std::vector<std::string> read_label_names(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) labels.push_back(line);
    }
    if (labels.empty()) throw std::runtime_error("label file '" + path + "' is empty");
    return labels;
}

std::unordered_map<std::string, std::string> read_doc_labels(const std::string& path) {
    std::ifstream in = open_in(path);
    std::unordered_map<std::string, std::string> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed line " + std::to_string(row) + " in '" + path + "'");
        out.emplace(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

std::unordered_map<std::string, int> label_index_of(const std::vector<std::string>& labels) {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < labels.size(); ++i)
        index.emplace(labels[i], static_cast<int>(i));
    return index;
}

LabeledSet select_set(const std::vector<std::string>& ids, const TokenCache& cache,
                      const std::unordered_map<std::string, std::string>& doc_labels,
                      const std::unordered_map<std::string, int>& label_index) {
    LabeledSet set;
    set.docs.reserve(ids.size());
    set.labels.reserve(ids.size());
    for (const std::string& id : ids) {
        auto cit = cache.by_id.find(id);
        if (cit == cache.by_id.end())
            throw std::runtime_error("token cache has no entry for case id '" + id +
                                     "'; rerun prepare");
        auto lit = doc_labels.find(id);
        if (lit == doc_labels.end())
            throw std::runtime_error("no recorded label for case id '" + id + "'; rerun prepare");
        auto kit = label_index.find(lit->second);
        if (kit == label_index.end())
            throw std::runtime_error("label '" + lit->second + "' is not in the label map");
        set.docs.push_back(cache.docs[cit->second]);
        set.labels.push_back(kit->second);
    }
    return set;
}

std::vector<ModelExample> encode_labeled(const ModelParams& params, const LabeledSet& set) {
    std::vector<ModelExample> out;
    out.reserve(set.docs.size());
    for (std::size_t i = 0; i < set.docs.size(); ++i) {
        ModelExample ex;
        ex.rows = encode_tokens(params, set.docs[i].tokens);
        ex.label = set.labels[i];
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<float> resolve_class_weights(const std::string& scheme, const LabeledSet& train,
                                         const std::vector<std::string>& labels) {
    if (scheme == "none") return {};
    if (scheme != "inverse-frequency")
        throw std::runtime_error("unknown class weighting '" + scheme + "'");
    int k = static_cast<int>(labels.size());
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : train.labels) ++counts[static_cast<std::size_t>(l)];
    std::vector<float> weights(static_cast<std::size_t>(k));
    double n = static_cast<double>(train.labels.size());
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0)
            throw std::runtime_error("class '" + labels[static_cast<std::size_t>(c)] +
                                     "' is absent from the training split");
        weights[static_cast<std::size_t>(c)] = static_cast<float>(
            n / (static_cast<double>(k) * static_cast<double>(counts[static_cast<std::size_t>(c)])));
    }
    return weights;
}

// Frequency-descending, then token-ascending vocabulary over the training
// split, mirroring the embedding trainer's ordering. Lets the random-init
// model run without a trained embedding file.
EmbeddingTable vocab_only_table(const std::vector<TokenSequence>& train, const EmbedConfig& embed,
                                int dimension) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const TokenSequence& doc : train)
        for (const std::string& t : doc.tokens) ++counts[t];
    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (const auto& [token, count] : counts)
        if (count >= embed.min_frequency) kept.emplace_back(token, count);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    EmbeddingTable table;
    table.config = embed;
    table.config.dimension = dimension;
    for (const auto& [token, count] : kept) {
        table.index.emplace(token, static_cast<int>(table.vocab.size()));
        table.vocab.push_back(token);
    }
    table.word = nn::Array({0, dimension});
    table.subword = nn::Array({0, dimension});
    return table;
}

std::vector<std::vector<int>> parse_kernel_sets(const json& j, const std::string& key) {
    std::vector<std::vector<int>> sets;
    for (const json& row : j.at(key)) sets.push_back(row.get<std::vector<int>>());
    return sets;
}

}  // namespace

void RunConfig::finalize() {
    if (data_dir.empty()) {
        const char* env = std::getenv("LEXCITE_DATA_DIR");
        data_dir = (env != nullptr && env[0] != '\0') ? env : "data";
    }
    if (corpus_csv.empty()) corpus_csv = join(data_dir, "corpus.csv");
    model.dimension = embed.dimension;
    model.prep_mode = mode;
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in = open_in(path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("config '" + path + "' is not valid JSON: " + e.what());
        }
        cfg.data_dir = j.value("data_dir", cfg.data_dir);
        cfg.corpus_csv = j.value("corpus_csv", cfg.corpus_csv);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.stopwords_path = j.value("stopwords", cfg.stopwords_path);
        cfg.boilerplate_path = j.value("boilerplate", cfg.boilerplate_path);
        cfg.lemma_exceptions_path = j.value("lemma_exceptions", cfg.lemma_exceptions_path);
        if (j.contains("mode")) cfg.mode = prep_mode_from_string(j.at("mode").get<std::string>());
        cfg.min_token_length = j.value("min_token_length", cfg.min_token_length);
        cfg.prepend_title = j.value("prepend_title", cfg.prepend_title);
        if (j.contains("split")) {
            const json& s = j.at("split");
            cfg.split.train_fraction = s.value("train_fraction", cfg.split.train_fraction);
            cfg.split.validation_fraction_of_train =
                s.value("validation_fraction_of_train", cfg.split.validation_fraction_of_train);
            cfg.split.seed = s.value("seed", cfg.split.seed);
        }
        if (j.contains("embeddings")) {
            const json& e = j.at("embeddings");
            cfg.embed.dimension = e.value("dimension", cfg.embed.dimension);
            cfg.embed.window = e.value("window", cfg.embed.window);
            cfg.embed.min_frequency = e.value("min_frequency", cfg.embed.min_frequency);
            cfg.embed.ngram_min = e.value("ngram_min", cfg.embed.ngram_min);
            cfg.embed.ngram_max = e.value("ngram_max", cfg.embed.ngram_max);
            cfg.embed.buckets = e.value("buckets", cfg.embed.buckets);
            cfg.embed.negatives = e.value("negatives", cfg.embed.negatives);
            cfg.embed.epochs = e.value("epochs", cfg.embed.epochs);
            cfg.embed.step_size = e.value("step_size", cfg.embed.step_size);
            cfg.embed_seed = e.value("seed", cfg.embed_seed);
        }
        if (j.contains("model")) {
            const json& m = j.at("model");
            if (m.contains("kernels")) cfg.model.kernels = m.at("kernels").get<std::vector<int>>();
            cfg.model.filters = m.value("filters", cfg.model.filters);
            cfg.model.dropout = m.value("dropout", cfg.model.dropout);
            cfg.model.sequence_length = m.value("sequence_length", cfg.model.sequence_length);
            cfg.model.fine_tune = m.value("fine_tune", cfg.model.fine_tune);
            if (m.contains("init"))
                cfg.model.init = embedding_init_from_string(m.at("init").get<std::string>());
            cfg.model.step_size = m.value("step_size", cfg.model.step_size);
            cfg.model.batch_size = m.value("batch_size", cfg.model.batch_size);
            cfg.model.max_epochs = m.value("max_epochs", cfg.model.max_epochs);
            cfg.model.patience = m.value("patience", cfg.model.patience);
            cfg.model.seed = m.value("seed", cfg.model.seed);
        }
        cfg.class_weighting = j.value("class_weights", cfg.class_weighting);
        cfg.sigma = j.value("sigma", cfg.sigma);
        cfg.reps = j.value("reps", cfg.reps);
        cfg.warmup = j.value("warmup", cfg.warmup);
        if (j.contains("ablation")) cfg.ablation_kernels = parse_kernel_sets(j, "ablation");
    }
    cfg.finalize();
    return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
    json j;
    j["data_dir"] = cfg.data_dir;
    j["corpus_csv"] = cfg.corpus_csv;
    j["out_dir"] = cfg.out_dir;
    j["stopwords"] = cfg.stopwords_path;
    j["boilerplate"] = cfg.boilerplate_path;
    j["lemma_exceptions"] = cfg.lemma_exceptions_path;
    j["mode"] = to_string(cfg.mode);
    j["min_token_length"] = cfg.min_token_length;
    j["prepend_title"] = cfg.prepend_title;
    j["split"] = {{"train_fraction", cfg.split.train_fraction},
                  {"validation_fraction_of_train", cfg.split.validation_fraction_of_train},
                  {"seed", cfg.split.seed}};
    j["embeddings"] = {{"dimension", cfg.embed.dimension},
                       {"window", cfg.embed.window},
                       {"min_frequency", cfg.embed.min_frequency},
                       {"ngram_min", cfg.embed.ngram_min},
                       {"ngram_max", cfg.embed.ngram_max},
                       {"buckets", cfg.embed.buckets},
                       {"negatives", cfg.embed.negatives},
                       {"epochs", cfg.embed.epochs},
                       {"step_size", cfg.embed.step_size},
                       {"seed", cfg.embed_seed}};
    j["model"] = {{"kernels", cfg.model.kernels},
                  {"filters", cfg.model.filters},
                  {"dropout", cfg.model.dropout},
                  {"dimension", cfg.model.dimension},
                  {"sequence_length", cfg.model.sequence_length},
                  {"classes", cfg.model.classes},
                  {"fine_tune", cfg.model.fine_tune},
                  {"init", to_string(cfg.model.init)},
                  {"step_size", cfg.model.step_size},
                  {"batch_size", cfg.model.batch_size},
                  {"max_epochs", cfg.model.max_epochs},
                  {"patience", cfg.model.patience},
                  {"seed", cfg.model.seed}};
    j["class_weights"] = cfg.class_weighting;
    j["sigma"] = cfg.sigma;
    j["reps"] = cfg.reps;
    j["warmup"] = cfg.warmup;
    j["ablation"] = cfg.ablation_kernels;
    return j.dump(2) + "\n";
}

void write_run_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out = open_out(path);
    out << run_config_json(cfg);
}

PrepConfig make_prep_config(const RunConfig& cfg) {
    PrepConfig pc = PrepConfig::defaults();
    if (!cfg.stopwords_path.empty()) pc.stopwords = load_word_list(cfg.stopwords_path);
    if (!cfg.boilerplate_path.empty()) pc.boilerplate = load_phrase_list(cfg.boilerplate_path);
    if (!cfg.lemma_exceptions_path.empty())
        pc.lemma_exceptions = load_lemma_exceptions(cfg.lemma_exceptions_path);
    pc.min_token_length = static_cast<std::size_t>(cfg.min_token_length);
    pc.mode = cfg.mode;
    pc.prepend_title = cfg.prepend_title;
    return pc;
}

ArtifactPaths artifact_paths(const RunConfig& cfg) {
    ArtifactPaths p;
    p.prepare_dir = join(cfg.out_dir, "prepare");
    p.embeddings_dir = join(cfg.out_dir, "embeddings");
    p.train_dir = join(cfg.out_dir, "train");
    p.evaluate_dir = join(cfg.out_dir, "evaluate");
    p.ablate_dir = join(cfg.out_dir, "ablate");
    p.bench_dir = join(cfg.out_dir, "bench");
    p.train_ids = join(p.prepare_dir, "train.ids");
    p.val_ids = join(p.prepare_dir, "val.ids");
    p.test_ids = join(p.prepare_dir, "test.ids");
    p.labels = join(p.prepare_dir, "labels.txt");
    p.doc_labels = join(p.prepare_dir, "doc_labels.tsv");
    p.cache_stemmed = join(p.prepare_dir, "tokens_stemmed.tsv");
    p.cache_lemmatized = join(p.prepare_dir, "tokens_lemmatized.tsv");
    p.embeddings_bin = join(p.embeddings_dir, "embeddings.bin");
    p.model_bin = join(p.train_dir, "model.bin");
    p.history_csv = join(p.train_dir, "history.csv");
    return p;
}

void write_token_cache(const std::string& path, const std::vector<std::string>& ids,
                       const std::vector<TokenSequence>& docs) {
    if (ids.size() != docs.size()) throw std::runtime_error("id and document counts differ");
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << '\t';
        const std::vector<std::string>& tokens = docs[i].tokens;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t) out << ' ';
            out << tokens[t];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

TokenCache read_token_cache(const std::string& path, PrepMode mode) {
    std::ifstream in = open_in(path);
    TokenCache cache;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed line " + std::to_string(row) + " in '" + path + "'");
        std::string id = line.substr(0, tab);
        TokenSequence seq;
        seq.mode = mode;
        std::istringstream words(line.substr(tab + 1));
        std::string tok;
        while (words >> tok) seq.tokens.push_back(tok);
        cache.by_id.emplace(id, cache.ids.size());
        cache.ids.push_back(std::move(id));
        cache.docs.push_back(std::move(seq));
    }
    return cache;
}

namespace {

std::string cache_path_for(const ArtifactPaths& paths, PrepMode mode) {
    switch (mode) {
        case PrepMode::Stemmed:
            return paths.cache_stemmed;
        case PrepMode::Lemmatized:
            return paths.cache_lemmatized;
        default:
            throw std::runtime_error("no token cache exists for preprocessing mode '" +
                                     std::string(to_string(mode)) + "'");
    }
}

}  // namespace

void cmd_prepare(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.prepare_dir);

    DocumentSet all = load_corpus(cfg.corpus_csv);
    if (all.empty()) throw std::runtime_error("corpus '" + cfg.corpus_csv + "' has no usable rows");
    LabelMap label_map = encode_labels(all);

    auto [train_full, test] = stratified_split(all, cfg.split);
    auto [train, val] = carve_validation(train_full, cfg.split);
    write_manifest(train, paths.train_ids);
    write_manifest(val, paths.val_ids);
    write_manifest(test, paths.test_ids);

    {
        std::ofstream out = open_out(paths.labels);
        for (const std::string& label : label_map.labels) out << label << '\n';
    }
    {
        std::ofstream out = open_out(paths.doc_labels);
        for (const Document& doc : all.docs) out << doc.case_id << '\t' << doc.outcome << '\n';
    }

    std::vector<std::string> ids;
    ids.reserve(all.size());
    for (const Document& doc : all.docs) ids.push_back(doc.case_id);
    for (PrepMode mode : {PrepMode::Stemmed, PrepMode::Lemmatized}) {
        RunConfig mode_cfg = cfg;
        mode_cfg.mode = mode;
        PrepConfig pc = make_prep_config(mode_cfg);
        std::vector<TokenSequence> docs;
        docs.reserve(all.size());
        for (const Document& doc : all.docs) {
            std::string text = pc.prepend_title ? doc.title + " " + doc.body : doc.body;
            docs.push_back(preprocess_document(text, pc));
        }
        write_token_cache(cache_path_for(paths, mode), ids, docs);
    }

    write_run_config(cfg, join(paths.prepare_dir, "resolved_config.json"));
    status << "documents=" << all.size() << " dropped_rows=" << all.dropped_rows
           << " classes=" << label_map.size() << " train=" << train.size() << " val=" << val.size()
           << " test=" << test.size() << "\n";
}

void cmd_train_embeddings(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.embeddings_dir);

    TokenCache cache = read_token_cache(cache_path_for(paths, cfg.mode), cfg.mode);
    std::vector<std::string> train_ids = read_manifest(paths.train_ids);
    std::vector<TokenSequence> train_docs;
    train_docs.reserve(train_ids.size());
    for (const std::string& id : train_ids) {
        auto it = cache.by_id.find(id);
        if (it == cache.by_id.end())
            throw std::runtime_error("token cache has no entry for case id '" + id +
                                     "'; rerun prepare");
        train_docs.push_back(cache.docs[it->second]);
    }

    EmbedTrainStats stats;
    EmbeddingTable table = train_fasttext(train_docs, cfg.embed, cfg.embed_seed, &stats);
    save_embeddings(table, paths.embeddings_bin);
    write_run_config(cfg, join(paths.embeddings_dir, "resolved_config.json"));

    status << "vocab=" << table.vocab.size() << " pairs_per_epoch=" << stats.pair_count << "\n";
    for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
        status << "epoch " << (e + 1) << " loss=" << stats.epoch_loss[e] << "\n";
    status << "embeddings=" << paths.embeddings_bin << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.train_dir);

    std::vector<std::string> labels = read_label_names(paths.labels);
    std::unordered_map<std::string, std::string> doc_labels = read_doc_labels(paths.doc_labels);
    std::unordered_map<std::string, int> label_index = label_index_of(labels);
    TokenCache cache = read_token_cache(cache_path_for(paths, cfg.mode), cfg.mode);
    LabeledSet train = select_set(read_manifest(paths.train_ids), cache, doc_labels, label_index);
    LabeledSet val = select_set(read_manifest(paths.val_ids), cache, doc_labels, label_index);

    ModelConfig mc = cfg.model;
    mc.classes = static_cast<int>(labels.size());
    mc.prep_mode = cfg.mode;
    mc.dimension = cfg.embed.dimension;
    mc.class_weights = resolve_class_weights(cfg.class_weighting, train, labels);

    EmbeddingTable table;
    if (mc.init == EmbeddingInit::Pretrained) {
        table = load_embeddings(paths.embeddings_bin);
    } else {
        table = vocab_only_table(train.docs, cfg.embed, mc.dimension);
    }

    ModelParams params = build_model(mc, &table, mc.seed);
    std::vector<ModelExample> train_ex = encode_labeled(params, train);
    std::vector<ModelExample> val_ex = encode_labeled(params, val);
    auto [best, history] = train_model(std::move(params), train_ex, val_ex);

    save_model(best, labels, paths.model_bin);
    write_history_csv(history, paths.history_csv);
    write_run_config(cfg, join(paths.train_dir, "resolved_config.json"));

    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const EpochRecord& r = history.epochs[e];
        status << "epoch " << (e + 1) << " train_loss=" << r.train_loss
               << " train_acc=" << r.train_accuracy << " val_loss=" << r.val_loss
               << " val_acc=" << r.val_accuracy << "\n";
    }
    status << "best_epoch=" << (history.best_epoch + 1) << " model=" << paths.model_bin << "\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.evaluate_dir);

    LoadedModel loaded = load_model(paths.model_bin);
    std::vector<std::string> labels = read_label_names(paths.labels);
    if (labels != loaded.labels)
        throw std::runtime_error("label map mismatch between '" + paths.labels + "' and model '" +
                                 paths.model_bin + "'");

    PrepMode mode = loaded.params.config.prep_mode;
    TokenCache cache = read_token_cache(cache_path_for(paths, mode), mode);
    std::unordered_map<std::string, std::string> doc_labels = read_doc_labels(paths.doc_labels);
    std::unordered_map<std::string, int> label_index = label_index_of(labels);
    LabeledSet test = select_set(read_manifest(paths.test_ids), cache, doc_labels, label_index);

    std::vector<std::vector<float>> probs = predict_probabilities(loaded.params, test.docs);
    std::vector<int> preds;
    preds.reserve(probs.size());
    for (const std::vector<float>& p : probs) preds.push_back(argmax_class(p));

    int k = static_cast<int>(labels.size());
    ConfusionMatrix cm = confusion(preds, test.labels, k);
    MetricsReport report = metrics(cm);
    RocReport roc = roc_auc(probs, test.labels, k);
    NoiseReport noise = noise_robustness(loaded.params, test, cfg.sigma, cfg.model.seed);

    write_metrics_report(report, roc, labels, join(paths.evaluate_dir, "metrics.txt"));
    write_confusion_csv(cm, labels, join(paths.evaluate_dir, "confusion.csv"));
    for (const RocCurve& curve : roc.curves) {
        if (curve.skipped) continue;
        std::string name = sanitize_name(labels[static_cast<std::size_t>(curve.class_index)]);
        write_roc_csv(curve, join(paths.evaluate_dir, "roc_" + name + ".csv"));
    }
    {
        std::ofstream out = open_out(join(paths.evaluate_dir, "noise.txt"));
        out << std::setprecision(10) << "sigma=" << noise.sigma << "\n"
            << "clean_accuracy=" << noise.clean_accuracy << "\n"
            << "noisy_accuracy=" << noise.noisy_accuracy << "\n";
    }
    write_run_config(cfg, join(paths.evaluate_dir, "resolved_config.json"));

    status << std::fixed << std::setprecision(4);
    status << "accuracy=" << report.accuracy << "\n";
    status << "macro_f1=" << report.macro_f1 << "\n";
    status << "macro_auc=" << roc.macro_auc << "\n";
    status << "noise_sigma=" << noise.sigma << " clean=" << noise.clean_accuracy
           << " noisy=" << noise.noisy_accuracy << "\n";
    status.unsetf(std::ios::fixed);
}

void cmd_ablate(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.ablate_dir);

    std::vector<std::string> labels = read_label_names(paths.labels);
    std::unordered_map<std::string, std::string> doc_labels = read_doc_labels(paths.doc_labels);
    std::unordered_map<std::string, int> label_index = label_index_of(labels);
    TokenCache cache = read_token_cache(cache_path_for(paths, cfg.mode), cfg.mode);
    LabeledSet train = select_set(read_manifest(paths.train_ids), cache, doc_labels, label_index);
    LabeledSet val = select_set(read_manifest(paths.val_ids), cache, doc_labels, label_index);
    LabeledSet test = select_set(read_manifest(paths.test_ids), cache, doc_labels, label_index);

    ModelConfig mc = cfg.model;
    mc.classes = static_cast<int>(labels.size());
    mc.prep_mode = cfg.mode;
    mc.dimension = cfg.embed.dimension;
    mc.class_weights = resolve_class_weights(cfg.class_weighting, train, labels);

    EmbeddingTable table;
    const EmbeddingTable* table_ptr = nullptr;
    if (mc.init == EmbeddingInit::Pretrained) {
        table = load_embeddings(paths.embeddings_bin);
        table_ptr = &table;
    } else {
        table = vocab_only_table(train.docs, cfg.embed, mc.dimension);
        table_ptr = &table;
    }

    std::vector<AblationRow> rows = ablate(cfg.ablation_kernels, mc, table_ptr, train, val, test);
    write_ablation_csv(rows, join(paths.ablate_dir, "ablation.csv"));
    write_run_config(cfg, join(paths.ablate_dir, "resolved_config.json"));

    for (const AblationRow& row : rows) {
        status << "kernels=";
        for (std::size_t i = 0; i < row.kernels.size(); ++i) {
            if (i) status << ',';
            status << row.kernels[i];
        }
        if (row.ok) {
            status << " test_accuracy=" << row.test_accuracy << "\n";
        } else {
            status << " error=" << row.error << "\n";
        }
    }
}

void cmd_bench(const RunConfig& cfg, std::ostream& status) {
    ArtifactPaths paths = artifact_paths(cfg);
    ensure_dir(paths.bench_dir);

    LoadedModel loaded = load_model(paths.model_bin);
    PrepMode mode = loaded.params.config.prep_mode;
    TokenCache cache = read_token_cache(cache_path_for(paths, mode), mode);
    std::vector<std::string> ids = read_manifest(paths.test_ids);
    std::vector<TokenSequence> docs;
    docs.reserve(ids.size());
    for (const std::string& id : ids) {
        auto it = cache.by_id.find(id);
        if (it == cache.by_id.end())
            throw std::runtime_error("token cache has no entry for case id '" + id +
                                     "'; rerun prepare");
        docs.push_back(cache.docs[it->second]);
    }

    BenchReport report = latency_bench(loaded.params, docs, cfg.reps, cfg.warmup);
    write_bench_csv(report, join(paths.bench_dir, "bench.csv"));
    write_run_config(cfg, join(paths.bench_dir, "resolved_config.json"));

    status << "samples=" << report.samples << " mean_ms=" << report.mean_ms
           << " median_ms=" << report.median_ms << " p95_ms=" << report.p95_ms
           << " docs_per_second=" << report.docs_per_second << "\n";
}

void cmd_classify(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    ArtifactPaths paths = artifact_paths(cfg);
    LoadedModel loaded = load_model(paths.model_bin);

    RunConfig prep_cfg = cfg;
    prep_cfg.mode = loaded.params.config.prep_mode;
    PrepConfig pc = make_prep_config(prep_cfg);

    Rng rng(0);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TokenSequence tokens = preprocess_document(line, pc);
        SequenceMatrix sm = model_sequence_matrix(loaded.params, tokens);
        std::vector<float> probs = forward(loaded.params, sm, false, rng);
        int pred = argmax_class(probs);
        out << loaded.labels[static_cast<std::size_t>(pred)];
        for (float p : probs) out << '\t' << p;
        out << '\n';
    }
}

}  // namespace lexcite
