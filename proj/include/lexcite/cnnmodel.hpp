#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexcite/embeddings.hpp"
#include "lexcite/neuralcore.hpp"
#include "lexcite/textprep.hpp"

namespace lexcite {

enum class EmbeddingInit { Pretrained, Random };

const char* to_string(EmbeddingInit init);
EmbeddingInit embedding_init_from_string(const std::string& name);

struct ModelConfig {
    std::vector<int> kernels = {2, 3, 5};
    int filters = 128;
    float dropout = 0.4f;
    int dimension = 500;
    int sequence_length = 400;
    int classes = 0;
    bool fine_tune = true;
    EmbeddingInit init = EmbeddingInit::Pretrained;
    std::vector<float> class_weights;  // empty means all ones
    float step_size = 1e-3f;
    int batch_size = 32;
    int max_epochs = 50;
    int patience = 3;
    std::uint64_t seed = 42;
    PrepMode prep_mode = PrepMode::Lemmatized;  // echoed so a saved model can preprocess

    void validate() const;           // throws on invariant violations
    nn::Array resolved_alpha() const;  // class_weights or all ones, length classes
};

struct ModelParams {
    ModelConfig config;
    std::vector<std::string> vocab;
    std::unordered_map<std::string, int> index;
    nn::Array embedding;                        // V x d
    std::vector<std::vector<nn::Array>> conv_w;  // [kernel asc][filter], each k x d
    std::vector<std::vector<nn::Array>> conv_b;  // [kernel asc][filter], each length 1
    nn::Array cls_w;                            // K x (F * |kernels|)
    nn::Array cls_b;                            // K
};

struct EpochRecord {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;  // 0-based index into epochs
};

// One document encoded against the model vocabulary: exactly L row indices
// into the embedding matrix, -1 where a token is unknown or padding.
struct ModelExample {
    std::vector<int> rows;
    int label = 0;
};

// Tracks the epochs-without-improvement rule: stop once validation loss has
// failed to improve for `patience` consecutive epochs.
class EarlyStopper {
  public:
    explicit EarlyStopper(int patience);
    // Returns true when training should stop after this epoch.
    bool observe(double val_loss);
    int best_epoch() const { return best_epoch_; }
    bool improved_last() const { return improved_last_; }

  private:
    int patience_;
    double best_loss_;
    int best_epoch_ = -1;
    int epochs_seen_ = 0;
    int bad_streak_ = 0;
    bool improved_last_ = false;
};

// Conv and classifier weights drawn uniformly from ±sqrt(6/(fan_in+fan_out)),
// biases zero; embedding rows copied from the table, or uniform ±0.05 when
// init is Random. The table always supplies the vocabulary; with Random init
// and no table the model has an empty vocabulary.
ModelParams build_model(const ModelConfig& cfg, const EmbeddingTable* table, std::uint64_t seed);

// Token row indices against the model vocabulary, truncated/padded to L.
std::vector<int> encode_tokens(const ModelParams& params, const std::vector<std::string>& tokens);

// L x d matrix of embedding rows for the document (unknown tokens zero).
SequenceMatrix model_sequence_matrix(const ModelParams& params, const TokenSequence& tokens);

// Probability vector over classes. Train mode applies dropout via rng.
std::vector<float> forward(const ModelParams& params, const SequenceMatrix& x, bool train, Rng& rng);

struct ModelOptimizer {
    nn::AdamConfig adam;
    std::vector<nn::AdamState> states;  // aligned with trainable_arrays order
};

std::vector<nn::Array*> trainable_arrays(ModelParams& params);
ModelOptimizer make_optimizer(ModelParams& params);

struct StepResult {
    double loss = 0.0;
    int correct = 0;
};

// One forward/backward/Adam update over the batch; returns the batch loss and
// the number of batch documents whose argmax matched the label.
StepResult training_step(ModelParams& params, ModelOptimizer& opt,
                         const std::vector<const ModelExample*>& batch, Rng& rng);

// Batch loss plus per-parameter gradients in trainable_arrays order, with no
// optimizer update and dropout disabled. Parameter values are left untouched.
std::pair<double, std::vector<std::vector<float>>> batch_gradients(
    ModelParams& params, const std::vector<const ModelExample*>& batch);

// Mean weighted loss and argmax-accuracy count over a set, inference mode.
StepResult evaluate_examples(const ModelParams& params, const std::vector<ModelExample>& set);

// Mini-batch training with seeded shuffling and early stopping on validation
// loss; returns the parameters of the best-validation-loss epoch.
std::pair<ModelParams, TrainHistory> train_model(ModelParams params,
                                                 const std::vector<ModelExample>& train_set,
                                                 const std::vector<ModelExample>& val_set);

std::int64_t count_parameters(const ModelParams& params, bool include_embeddings);

void save_model(const ModelParams& params, const std::vector<std::string>& labels,
                const std::string& path);

struct LoadedModel {
    ModelParams params;
    std::vector<std::string> labels;
};

LoadedModel load_model(const std::string& path);

}  // namespace lexcite
