#include "lexcite/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lexcite {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

std::string kernels_tag(const std::vector<int>& kernels) {
    std::string tag;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        if (i) tag += '+';
        tag += std::to_string(kernels[i]);
    }
    return tag;
}

double percentile(const std::vector<double>& sorted, double pct) {
    std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

}  // namespace

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (std::int64_t c : counts) t += c;
    return t;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (int i = 0; i < k; ++i) t += at(i, i);
    return t;
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& truths, int k) {
    if (preds.size() != truths.size())
        throw std::runtime_error("prediction and truth counts differ");
    if (k < 1) throw std::runtime_error("class count must be at least 1");
    ConfusionMatrix m;
    m.k = k;
    m.counts.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (truths[i] < 0 || truths[i] >= k || preds[i] < 0 || preds[i] >= k)
            throw std::runtime_error("class index out of range in confusion input");
        ++m.counts[static_cast<std::size_t>(truths[i]) * static_cast<std::size_t>(k) +
                   static_cast<std::size_t>(preds[i])];
    }
    return m;
}

MetricsReport metrics(const ConfusionMatrix& m) {
    MetricsReport report;
    report.total = m.total();
    if (report.total == 0) throw std::runtime_error("cannot compute metrics on an empty matrix");
    report.accuracy = static_cast<double>(m.trace()) / static_cast<double>(report.total);

    for (int c = 0; c < m.k; ++c) {
        std::int64_t col = 0, row = 0;
        for (int i = 0; i < m.k; ++i) {
            col += m.at(i, c);
            row += m.at(c, i);
        }
        ClassMetrics cm;
        cm.support = row;
        std::int64_t hit = m.at(c, c);
        if (col == 0) {
            cm.precision_undefined = true;
        } else {
            cm.precision = static_cast<double>(hit) / static_cast<double>(col);
        }
        if (row == 0) {
            cm.recall_undefined = true;
        } else {
            cm.recall = static_cast<double>(hit) / static_cast<double>(row);
        }
        if (cm.precision + cm.recall > 0.0)
            cm.f1 = 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall);
        report.per_class.push_back(cm);
    }

    double n_classes = static_cast<double>(m.k);
    for (const ClassMetrics& cm : report.per_class) {
        report.macro_precision += cm.precision / n_classes;
        report.macro_recall += cm.recall / n_classes;
        report.macro_f1 += cm.f1 / n_classes;
        double share = static_cast<double>(cm.support) / static_cast<double>(report.total);
        report.weighted_precision += share * cm.precision;
        report.weighted_recall += share * cm.recall;
        report.weighted_f1 += share * cm.f1;
    }
    return report;
}

RocReport roc_auc(const std::vector<std::vector<float>>& scores, const std::vector<int>& truths,
                  int k) {
    if (scores.size() != truths.size())
        throw std::runtime_error("score and truth counts differ");
    if (scores.empty()) throw std::runtime_error("cannot compute roc on an empty set");
    for (const std::vector<float>& row : scores)
        if (static_cast<int>(row.size()) != k)
            throw std::runtime_error("score vector length does not match class count");

    RocReport report;
    double auc_sum = 0.0;
    int live = 0;
    for (int c = 0; c < k; ++c) {
        RocCurve curve;
        curve.class_index = c;
        std::int64_t pos = 0;
        for (int t : truths)
            if (t == c) ++pos;
        std::int64_t neg = static_cast<std::int64_t>(truths.size()) - pos;
        if (pos == 0 || neg == 0) {
            curve.skipped = true;
            report.curves.push_back(std::move(curve));
            continue;
        }

        std::vector<std::pair<float, int>> ranked;
        ranked.reserve(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            ranked.emplace_back(scores[i][static_cast<std::size_t>(c)], truths[i] == c ? 1 : 0);
        std::sort(ranked.begin(), ranked.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });

        curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
        std::int64_t tp = 0, fp = 0;
        double auc = 0.0;
        double prev_fpr = 0.0, prev_tpr = 0.0;
        std::size_t i = 0;
        while (i < ranked.size()) {
            float threshold = ranked[i].first;
            while (i < ranked.size() && ranked[i].first == threshold) {
                if (ranked[i].second) ++tp;
                else ++fp;
                ++i;
            }
            double fpr = static_cast<double>(fp) / static_cast<double>(neg);
            double tpr = static_cast<double>(tp) / static_cast<double>(pos);
            auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
            curve.points.push_back({fpr, tpr, static_cast<double>(threshold)});
            prev_fpr = fpr;
            prev_tpr = tpr;
        }
        curve.auc = auc;
        auc_sum += auc;
        ++live;
        report.curves.push_back(std::move(curve));
    }
    report.macro_auc = live > 0 ? auc_sum / static_cast<double>(live) : 0.0;
    return report;
}

int argmax_class(const std::vector<float>& probs) {
    if (probs.empty()) throw std::runtime_error("empty probability vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(probs.size()); ++i)
        if (probs[static_cast<std::size_t>(i)] > probs[static_cast<std::size_t>(best)]) best = i;
    return best;
}

std::vector<std::vector<float>> predict_probabilities(const ModelParams& params,
                                                      const std::vector<TokenSequence>& docs) {
    Rng rng(0);
    std::vector<std::vector<float>> out;
    out.reserve(docs.size());
    for (const TokenSequence& doc : docs)
        out.push_back(forward(params, model_sequence_matrix(params, doc), false, rng));
    return out;
}

double set_accuracy(const ModelParams& params, const LabeledSet& set) {
    if (set.docs.empty()) throw std::runtime_error("cannot score an empty set");
    if (set.docs.size() != set.labels.size())
        throw std::runtime_error("document and label counts differ");
    std::vector<std::vector<float>> probs = predict_probabilities(params, set.docs);
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (argmax_class(probs[i]) == set.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(set.docs.size());
}

namespace {

std::vector<ModelExample> encode_set(const ModelParams& params, const LabeledSet& set) {
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

}  // namespace

std::vector<AblationRow> ablate(const std::vector<std::vector<int>>& kernel_sets,
                                const ModelConfig& base, const EmbeddingTable* table,
                                const LabeledSet& train, const LabeledSet& val,
                                const LabeledSet& test) {
    if (kernel_sets.empty()) throw std::runtime_error("ablation needs at least one kernel set");
    std::vector<AblationRow> rows;
    for (const std::vector<int>& kernels : kernel_sets) {
        AblationRow row;
        row.kernels = kernels;
        try {
            ModelConfig cfg = base;
            cfg.kernels = kernels;
            ModelParams params = build_model(cfg, table, cfg.seed);
            std::vector<ModelExample> train_ex = encode_set(params, train);
            std::vector<ModelExample> val_ex = encode_set(params, val);
            auto [best, history] = train_model(std::move(params), train_ex, val_ex);
            row.test_accuracy = set_accuracy(best, test);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

NoiseReport noise_robustness(const ModelParams& params, const LabeledSet& test, double sigma,
                             std::uint64_t seed) {
    if (sigma < 0.0) throw std::runtime_error("noise level must be non-negative");
    if (test.docs.empty()) throw std::runtime_error("cannot score an empty set");
    if (test.docs.size() != test.labels.size())
        throw std::runtime_error("document and label counts differ");

    NoiseReport report;
    report.sigma = sigma;
    Rng noise_rng(seed);
    Rng fwd_rng(0);
    const int d = params.config.dimension;
    std::int64_t clean_correct = 0, noisy_correct = 0;
    for (std::size_t i = 0; i < test.docs.size(); ++i) {
        SequenceMatrix sm = model_sequence_matrix(params, test.docs[i]);
        std::vector<float> clean = forward(params, sm, false, fwd_rng);
        if (argmax_class(clean) == test.labels[i]) ++clean_correct;
        if (sigma == 0.0) {
            if (argmax_class(clean) == test.labels[i]) ++noisy_correct;
            continue;
        }
        for (int r = 0; r < sm.true_length; ++r)
            for (int c = 0; c < d; ++c)
                sm.x.v[static_cast<std::size_t>(r) * static_cast<std::size_t>(d) +
                       static_cast<std::size_t>(c)] +=
                    static_cast<float>(sigma * noise_rng.gaussian());
        std::vector<float> noisy = forward(params, sm, false, fwd_rng);
        if (argmax_class(noisy) == test.labels[i]) ++noisy_correct;
    }
    report.clean_accuracy = static_cast<double>(clean_correct) / static_cast<double>(test.docs.size());
    report.noisy_accuracy = static_cast<double>(noisy_correct) / static_cast<double>(test.docs.size());
    return report;
}

BenchReport latency_bench(const ModelParams& params, const std::vector<TokenSequence>& docs,
                          int repetitions, int warmup) {
    if (docs.empty()) throw std::runtime_error("latency benchmark needs at least one document");
    if (repetitions < 1) throw std::runtime_error("repetition count must be at least 1");
    if (warmup < 0) throw std::runtime_error("warmup count must be non-negative");

    Rng rng(0);
    auto run_one = [&](const TokenSequence& doc) {
        volatile float sink = forward(params, model_sequence_matrix(params, doc), false, rng)[0];
        (void)sink;
    };
    for (int w = 0; w < warmup; ++w) run_one(docs[static_cast<std::size_t>(w) % docs.size()]);

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(repetitions) * docs.size());
    for (int rep = 0; rep < repetitions; ++rep)
        for (const TokenSequence& doc : docs) {
            auto t0 = std::chrono::steady_clock::now();
            run_one(doc);
            auto t1 = std::chrono::steady_clock::now();
            samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }

    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    BenchReport report;
    report.samples = static_cast<std::int64_t>(samples.size());
    double sum = 0.0;
    for (double s : samples) sum += s;
    report.mean_ms = sum / static_cast<double>(samples.size());
    report.median_ms = percentile(sorted, 50.0);
    report.p95_ms = percentile(sorted, 95.0);
    report.docs_per_second = report.mean_ms > 0.0 ? 1000.0 / report.mean_ms : 0.0;
    report.params_with_embeddings = count_parameters(params, true);
    report.params_without_embeddings = count_parameters(params, false);
    return report;
}

void write_metrics_report(const MetricsReport& report, const RocReport& roc,
                          const std::vector<std::string>& labels, const std::string& path) {
    std::ofstream out = open_out(path);
    out << std::setprecision(10);
    out << "samples=" << report.total << "\n";
    out << "accuracy=" << report.accuracy << "\n";
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        std::string name = c < labels.size() ? labels[c] : "class" + std::to_string(c);
        const ClassMetrics& cm = report.per_class[c];
        out << "precision_" << name << "=" << cm.precision << "\n";
        out << "recall_" << name << "=" << cm.recall << "\n";
        out << "f1_" << name << "=" << cm.f1 << "\n";
        out << "support_" << name << "=" << cm.support << "\n";
        if (cm.precision_undefined) out << "precision_" << name << "_undefined=1\n";
        if (cm.recall_undefined) out << "recall_" << name << "_undefined=1\n";
    }
    out << "macro_precision=" << report.macro_precision << "\n";
    out << "macro_recall=" << report.macro_recall << "\n";
    out << "macro_f1=" << report.macro_f1 << "\n";
    out << "weighted_precision=" << report.weighted_precision << "\n";
    out << "weighted_recall=" << report.weighted_recall << "\n";
    out << "weighted_f1=" << report.weighted_f1 << "\n";
    for (const RocCurve& curve : roc.curves) {
        std::string name = curve.class_index < static_cast<int>(labels.size())
                               ? labels[static_cast<std::size_t>(curve.class_index)]
                               : "class" + std::to_string(curve.class_index);
        if (curve.skipped) {
            out << "auc_" << name << "_skipped=1\n";
        } else {
            out << "auc_" << name << "=" << curve.auc << "\n";
        }
    }
    out << "macro_auc=" << roc.macro_auc << "\n";
}

void write_confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& labels,
                         const std::string& path) {
    std::ofstream out = open_out(path);
    out << "true\\pred";
    for (int c = 0; c < m.k; ++c)
        out << ',' << (c < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(c)]
                                                           : "class" + std::to_string(c));
    out << "\n";
    for (int t = 0; t < m.k; ++t) {
        out << (t < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(t)]
                                                    : "class" + std::to_string(t));
        for (int p = 0; p < m.k; ++p) out << ',' << m.at(t, p);
        out << "\n";
    }
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream out = open_out(path);
    out << std::setprecision(10);
    out << "fpr,tpr,threshold\n";
    for (const RocPoint& p : curve.points)
        out << p.fpr << ',' << p.tpr << ',' << p.threshold << "\n";
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream out = open_out(path);
    out << std::setprecision(10);
    out << "epoch,train_loss,train_acc,val_loss,val_acc,seconds\n";
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const EpochRecord& r = history.epochs[i];
        out << (i + 1) << ',' << r.train_loss << ',' << r.train_accuracy << ',' << r.val_loss
            << ',' << r.val_accuracy << ',' << r.seconds << "\n";
    }
}

void write_bench_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << std::setprecision(10);
    out << "metric,value\n";
    out << "mean_ms," << report.mean_ms << "\n";
    out << "median_ms," << report.median_ms << "\n";
    out << "p95_ms," << report.p95_ms << "\n";
    out << "docs_per_second," << report.docs_per_second << "\n";
    out << "samples," << report.samples << "\n";
    out << "params_with_embeddings," << report.params_with_embeddings << "\n";
    out << "params_without_embeddings," << report.params_without_embeddings << "\n";
    for (std::size_t i = 0; i < report.epoch_seconds.size(); ++i)
        out << "epoch" << (i + 1) << "_seconds," << report.epoch_seconds[i] << "\n";
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    out << std::setprecision(10);
    out << "kernels,test_accuracy,status\n";
    for (const AblationRow& row : rows) {
        out << kernels_tag(row.kernels) << ',';
        if (row.ok) {
            out << row.test_accuracy << ",ok\n";
        } else {
            std::string msg = row.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            out << "0,error: " << msg << "\n";
        }
    }
}

}  // namespace lexcite
