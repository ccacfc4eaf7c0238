#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexcite/cnnmodel.hpp"

namespace lexcite {

// Rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
    int k = 0;
    std::vector<std::int64_t> counts;  // k*k, row-major

    std::int64_t at(int truth, int pred) const {
        return counts[static_cast<std::size_t>(truth) * static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(pred)];
    }
    std::int64_t total() const;
    std::int64_t trace() const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
    bool precision_undefined = false;  // no predictions for the class
    bool recall_undefined = false;     // no true documents for the class
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::int64_t total = 0;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    int class_index = 0;
    double auc = 0.0;
    std::vector<RocPoint> points;
    bool skipped = false;  // class absent from truths (or no negatives)
};

struct RocReport {
    std::vector<RocCurve> curves;  // one per class, in class order
    double macro_auc = 0.0;        // mean over non-skipped classes
};

struct BenchReport {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double docs_per_second = 0.0;
    std::int64_t samples = 0;
    std::int64_t params_with_embeddings = 0;
    std::int64_t params_without_embeddings = 0;
    std::vector<double> epoch_seconds;  // from training history when available
};

struct LabeledSet {
    std::vector<TokenSequence> docs;
    std::vector<int> labels;
};

struct AblationRow {
    std::vector<int> kernels;
    double test_accuracy = 0.0;
    bool ok = false;
    std::string error;
};

struct NoiseReport {
    double clean_accuracy = 0.0;
    double noisy_accuracy = 0.0;
    double sigma = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& truths, int k);

MetricsReport metrics(const ConfusionMatrix& m);

// One-vs-rest ROC per class with trapezoidal AUC; ties contribute half.
RocReport roc_auc(const std::vector<std::vector<float>>& scores, const std::vector<int>& truths,
                  int k);

int argmax_class(const std::vector<float>& probs);

// Inference-mode probability vectors for each document.
std::vector<std::vector<float>> predict_probabilities(const ModelParams& params,
                                                      const std::vector<TokenSequence>& docs);

double set_accuracy(const ModelParams& params, const LabeledSet& set);

// Trains one model per kernel set with every other hyperparameter taken from
// `base`; a failing run yields a row carrying its error instead of aborting
// the sweep.
std::vector<AblationRow> ablate(const std::vector<std::vector<int>>& kernel_sets,
                                const ModelConfig& base, const EmbeddingTable* table,
                                const LabeledSet& train, const LabeledSet& val,
                                const LabeledSet& test);

// Adds zero-mean Gaussian noise (stddev sigma) to every dimension of the
// embedded rows of real tokens at inference; sigma 0 skips the noise path so
// both accuracies are computed identically.
NoiseReport noise_robustness(const ModelParams& params, const LabeledSet& test, double sigma,
                             std::uint64_t seed);

BenchReport latency_bench(const ModelParams& params, const std::vector<TokenSequence>& docs,
                          int repetitions, int warmup);

void write_metrics_report(const MetricsReport& report, const RocReport& roc,
                          const std::vector<std::string>& labels, const std::string& path);
void write_confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& labels,
                         const std::string& path);
// One file per class: fpr,tpr,threshold.
void write_roc_csv(const RocCurve& curve, const std::string& path);
void write_history_csv(const TrainHistory& history, const std::string& path);
void write_bench_csv(const BenchReport& report, const std::string& path);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace lexcite
