#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexcite/baselines.hpp"
#include "lexcite/cnnmodel.hpp"
#include "lexcite/corpus.hpp"
#include "lexcite/embeddings.hpp"
#include "lexcite/evaluation.hpp"
#include "lexcite/textprep.hpp"

namespace lexcite {

// Single run description: preprocessing, split, embedding and model settings
// plus file locations. Loadable from one JSON file; every command echoes the
// fully resolved value into its output directory.
struct RunConfig {
    std::string data_dir;    // LEXCITE_DATA_DIR or "data" when unset
    std::string corpus_csv;  // <data_dir>/corpus.csv when unset
    std::string out_dir = "out";
    std::string stopwords_path;         // empty: built-in list
    std::string boilerplate_path;       // empty: built-in list
    std::string lemma_exceptions_path;  // empty: built-in table

    PrepMode mode = PrepMode::Lemmatized;
    int min_token_length = 3;
    bool prepend_title = false;

    SplitSpec split;
    EmbedConfig embed;
    std::uint64_t embed_seed = 42;
    ModelConfig model;  // classes resolved at training time

    std::string class_weighting = "none";  // none | inverse-frequency
    double sigma = 0.05;
    int reps = 200;
    int warmup = 20;
    std::vector<std::vector<int>> ablation_kernels = {{3}, {3, 4}, {2, 3, 5}};

    // Fills data-dir-relative defaults and mirrors shared fields (embedding
    // dimension, preprocessing mode) into the model config.
    void finalize();
};

RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& cfg);
void write_run_config(const RunConfig& cfg, const std::string& path);

PrepConfig make_prep_config(const RunConfig& cfg);

struct ArtifactPaths {
    std::string prepare_dir, embeddings_dir, train_dir, evaluate_dir, ablate_dir, bench_dir;
    std::string train_ids, val_ids, test_ids;
    std::string labels, doc_labels;
    std::string cache_stemmed, cache_lemmatized;
    std::string embeddings_bin, model_bin, history_csv;
};

ArtifactPaths artifact_paths(const RunConfig& cfg);

// Preprocessed documents keyed by case id, in corpus order.
struct TokenCache {
    std::vector<std::string> ids;
    std::vector<TokenSequence> docs;
    std::unordered_map<std::string, std::size_t> by_id;
};

void write_token_cache(const std::string& path, const std::vector<std::string>& ids,
                       const std::vector<TokenSequence>& docs);
TokenCache read_token_cache(const std::string& path, PrepMode mode);

// Ingest the corpus, split it, and write manifests, label files and the
// stemmed and lemmatized token caches.
void cmd_prepare(const RunConfig& cfg, std::ostream& status);
// Train subword embeddings on the training-split token cache.
void cmd_train_embeddings(const RunConfig& cfg, std::ostream& status);
// Train the convolutional classifier; writes the model file and history CSV.
void cmd_train(const RunConfig& cfg, std::ostream& status);
// Test-set confusion/metrics/ROC plus the noise-robustness comparison.
void cmd_evaluate(const RunConfig& cfg, std::ostream& status);
// Kernel-set sweep with otherwise constant hyperparameters.
void cmd_ablate(const RunConfig& cfg, std::ostream& status);
// Single-document inference latency distribution.
void cmd_bench(const RunConfig& cfg, std::ostream& status);
// One document per input line; prints predicted label and the probability
// vector using the preprocessing mode recorded in the model file.
void cmd_classify(const RunConfig& cfg, std::istream& in, std::ostream& out);

}  // namespace lexcite
