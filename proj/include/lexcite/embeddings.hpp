#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexcite/neuralcore.hpp"
#include "lexcite/textprep.hpp"

namespace lexcite {

struct EmbedConfig {
    int dimension = 500;
    int window = 3;
    int min_frequency = 2;
    int ngram_min = 3;
    int ngram_max = 6;
    int buckets = 2000000;
    int negatives = 5;
    int epochs = 5;
    float step_size = 0.05f;

    void validate() const;  // throws on out-of-range fields
};

// Subword-composing word vectors: one row per vocabulary token plus a hashed
// bucket matrix for character n-grams. Any token, in vocabulary or not,
// composes to a finite d-vector.
struct EmbeddingTable {
    EmbedConfig config;
    std::vector<std::string> vocab;  // row order: frequency desc, then token asc
    std::unordered_map<std::string, int> index;
    nn::Array word;     // |V| x d
    nn::Array subword;  // buckets x d

    bool has(const std::string& token) const { return index.count(token) != 0; }
    int row(const std::string& token) const;  // throws when absent
};

struct EmbedTrainStats {
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
    double first_epoch_early_loss = 0.0;  // mean over the first fifth of epoch 1
    double first_epoch_late_loss = 0.0;   // mean over the last fifth of epoch 1
    std::uint64_t pair_count = 0;         // center/context pairs per epoch
};

struct SequenceMatrix {
    nn::Array x;  // L x d
    int true_length = 0;
};

// Character n-gram bucket ids for the boundary-wrapped word, first occurrence
// order, whole bracketed word included, duplicates removed. Pure function of
// (word, range, buckets).
std::vector<int> extract_subwords(const std::string& word, const EmbedConfig& cfg);

// Skipgram with negative sampling over the token sequences; center
// representation is the mean of the word vector and its subword vectors.
// Single-threaded and deterministic for a given seed.
EmbeddingTable train_fasttext(const std::vector<TokenSequence>& corpus, const EmbedConfig& cfg,
                              std::uint64_t seed, EmbedTrainStats* stats = nullptr);

// In vocabulary: mean of the word vector and its subword vectors.
// Out of vocabulary: mean of subword vectors alone.
std::vector<float> embed_token(const EmbeddingTable& table, const std::string& word);

// Arithmetic mean of embed_token over all tokens; throws on an empty sequence.
std::vector<float> mean_pool(const EmbeddingTable& table, const TokenSequence& tokens);

// First min(|tokens|, l) rows are token vectors in order; the rest stay zero.
SequenceMatrix sequence_matrix(const EmbeddingTable& table, const TokenSequence& tokens, int l);

void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace lexcite
