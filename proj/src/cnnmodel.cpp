#include "lexcite/cnnmodel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "lexcite/serial.hpp"

namespace lexcite {

using nn::NodeId;

namespace {

constexpr char kMagic[4] = {'L', 'X', 'C', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr double kLogClamp = 1e-12;

int hidden_width(const ModelConfig& cfg) {
    return cfg.filters * static_cast<int>(cfg.kernels.size());
}

int argmax_row(const float* row, int k) {
    int best = 0;
    for (int i = 1; i < k; ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

}  // namespace

const char* to_string(EmbeddingInit init) {
    return init == EmbeddingInit::Pretrained ? "pretrained" : "random";
}

EmbeddingInit embedding_init_from_string(const std::string& name) {
    if (name == "pretrained") return EmbeddingInit::Pretrained;
    if (name == "random") return EmbeddingInit::Random;
    throw std::runtime_error("unknown embedding init '" + name + "'");
}

void ModelConfig::validate() const {
    if (kernels.empty()) throw std::runtime_error("at least one kernel size is required");
    std::set<int> distinct(kernels.begin(), kernels.end());
    if (distinct.size() != kernels.size()) throw std::runtime_error("kernel sizes must be distinct");
    for (int k : kernels) {
        if (k < 1) throw std::runtime_error("kernel sizes must be at least 1");
        if (k > sequence_length)
            throw std::runtime_error("kernel size " + std::to_string(k) +
                                     " exceeds sequence length " + std::to_string(sequence_length));
    }
    if (filters < 1) throw std::runtime_error("filter count must be at least 1");
    if (dropout < 0.0f || dropout >= 1.0f) throw std::runtime_error("dropout must be in [0,1)");
    if (dimension < 1) throw std::runtime_error("embedding dimension must be at least 1");
    if (sequence_length < 1) throw std::runtime_error("sequence length must be at least 1");
    if (classes < 2) throw std::runtime_error("at least two classes are required");
    if (!class_weights.empty()) {
        if (static_cast<int>(class_weights.size()) != classes)
            throw std::runtime_error("class weight count does not match class count");
        for (float w : class_weights)
            if (!(w > 0.0f)) throw std::runtime_error("class weights must be strictly positive");
    }
    if (!(step_size > 0.0f)) throw std::runtime_error("step size must be positive");
    if (batch_size < 1) throw std::runtime_error("batch size must be at least 1");
    if (max_epochs < 0) throw std::runtime_error("max epochs must be non-negative");
}

nn::Array ModelConfig::resolved_alpha() const {
    nn::Array alpha({classes}, 1.0f);
    if (!class_weights.empty())
        std::copy(class_weights.begin(), class_weights.end(), alpha.v.begin());
    return alpha;
}

EarlyStopper::EarlyStopper(int patience) : patience_(patience), best_loss_(0.0) {}

bool EarlyStopper::observe(double val_loss) {
    ++epochs_seen_;
    if (epochs_seen_ == 1 || val_loss < best_loss_) {
        best_loss_ = val_loss;
        best_epoch_ = epochs_seen_ - 1;
        bad_streak_ = 0;
        improved_last_ = true;
    } else {
        ++bad_streak_;
        improved_last_ = false;
    }
    return patience_ > 0 && bad_streak_ >= patience_;
}

ModelParams build_model(const ModelConfig& cfg, const EmbeddingTable* table, std::uint64_t seed) {
    ModelParams params;
    params.config = cfg;
    std::sort(params.config.kernels.begin(), params.config.kernels.end());
    params.config.validate();

    if (cfg.init == EmbeddingInit::Pretrained && table == nullptr)
        throw std::runtime_error("pretrained embedding init requires an embedding table");
    if (table != nullptr && table->config.dimension != cfg.dimension)
        throw std::runtime_error("embedding table dimension does not match model dimension");

    if (table != nullptr) {
        params.vocab = table->vocab;
        params.index = table->index;
    }
    const int v = static_cast<int>(params.vocab.size());
    const int d = params.config.dimension;
    const int f = params.config.filters;
    const int h = hidden_width(params.config);
    const int k_classes = params.config.classes;

    Rng rng(seed);
    params.conv_w.resize(params.config.kernels.size());
    params.conv_b.resize(params.config.kernels.size());
    for (std::size_t ki = 0; ki < params.config.kernels.size(); ++ki) {
        int k = params.config.kernels[ki];
        double span = std::sqrt(6.0 / static_cast<double>(k * d + f));
        params.conv_w[ki].reserve(static_cast<std::size_t>(f));
        params.conv_b[ki].reserve(static_cast<std::size_t>(f));
        for (int fi = 0; fi < f; ++fi) {
            nn::Array w({k, d});
            for (float& x : w.v) x = static_cast<float>(rng.uniform(-span, span));
            params.conv_w[ki].push_back(std::move(w));
            params.conv_b[ki].push_back(nn::Array({1}, 0.0f));
        }
    }
    {
        double span = std::sqrt(6.0 / static_cast<double>(h + k_classes));
        params.cls_w = nn::Array({k_classes, h});
        for (float& x : params.cls_w.v) x = static_cast<float>(rng.uniform(-span, span));
        params.cls_b = nn::Array({k_classes}, 0.0f);
    }

    params.embedding = nn::Array({v, d});
    if (cfg.init == EmbeddingInit::Pretrained) {
        params.embedding.v = table->word.v;
        for (int i = 0; i < v; ++i) {
            std::vector<float> composed = embed_token(*table, params.vocab[static_cast<std::size_t>(i)]);
            std::copy(composed.begin(), composed.end(),
                      params.embedding.v.begin() + static_cast<std::size_t>(i) * d);
        }
    } else {
        for (float& x : params.embedding.v) x = static_cast<float>(rng.uniform(-0.05, 0.05));
    }
    return params;
}

std::vector<int> encode_tokens(const ModelParams& params, const std::vector<std::string>& tokens) {
    const int l = params.config.sequence_length;
    std::vector<int> rows(static_cast<std::size_t>(l), -1);
    int n = static_cast<int>(std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(l)));
    for (int i = 0; i < n; ++i) {
        auto it = params.index.find(tokens[static_cast<std::size_t>(i)]);
        if (it != params.index.end()) rows[static_cast<std::size_t>(i)] = it->second;
    }
    return rows;
}

SequenceMatrix model_sequence_matrix(const ModelParams& params, const TokenSequence& tokens) {
    const int l = params.config.sequence_length;
    const int d = params.config.dimension;
    SequenceMatrix sm;
    sm.x = nn::Array({l, d});
    sm.true_length = static_cast<int>(std::min<std::size_t>(tokens.tokens.size(), static_cast<std::size_t>(l)));
    for (int i = 0; i < sm.true_length; ++i) {
        auto it = params.index.find(tokens.tokens[static_cast<std::size_t>(i)]);
        if (it == params.index.end()) continue;
        std::copy_n(params.embedding.v.begin() + static_cast<std::size_t>(it->second) * d,
                    static_cast<std::size_t>(d), sm.x.v.begin() + static_cast<std::size_t>(i) * d);
    }
    return sm;
}

namespace {

// Shared head: conv branches over x, pooled h, dropout, linear softmax.
NodeId model_head(nn::Graph& g, NodeId x, const std::vector<std::vector<NodeId>>& w_nodes,
                  const std::vector<std::vector<NodeId>>& b_nodes, NodeId cls_w, NodeId cls_b,
                  float dropout_rate, bool train, Rng& rng) {
    std::vector<NodeId> pooled;
    for (std::size_t ki = 0; ki < w_nodes.size(); ++ki)
        for (std::size_t fi = 0; fi < w_nodes[ki].size(); ++fi)
            pooled.push_back(g.global_max_pool(g.conv1d_valid(x, w_nodes[ki][fi], b_nodes[ki][fi])));
    NodeId h = g.concat(pooled);
    NodeId hd = g.dropout(h, dropout_rate, train, rng);
    return g.softmax(g.linear(hd, cls_w, cls_b));
}

void check_input(const ModelParams& params, const SequenceMatrix& x) {
    if (x.x.rank() != 2 || x.x.dim(0) != params.config.sequence_length ||
        x.x.dim(1) != params.config.dimension)
        throw std::runtime_error("input matrix dimensions do not match the model configuration");
}

}  // namespace

std::vector<float> forward(const ModelParams& params, const SequenceMatrix& x, bool train, Rng& rng) {
    check_input(params, x);
    nn::Graph g;
    NodeId xid = g.value(x.x);
    std::vector<std::vector<NodeId>> w_nodes(params.conv_w.size());
    std::vector<std::vector<NodeId>> b_nodes(params.conv_b.size());
    for (std::size_t ki = 0; ki < params.conv_w.size(); ++ki)
        for (std::size_t fi = 0; fi < params.conv_w[ki].size(); ++fi) {
            w_nodes[ki].push_back(g.value(params.conv_w[ki][fi]));
            b_nodes[ki].push_back(g.value(params.conv_b[ki][fi]));
        }
    NodeId cw = g.value(params.cls_w);
    NodeId cb = g.value(params.cls_b);
    NodeId probs = model_head(g, xid, w_nodes, b_nodes, cw, cb, params.config.dropout, train, rng);
    return g.value_of(probs).v;
}

std::vector<nn::Array*> trainable_arrays(ModelParams& params) {
    std::vector<nn::Array*> arrays;
    if (params.config.fine_tune && params.embedding.size() > 0) arrays.push_back(&params.embedding);
    for (std::size_t ki = 0; ki < params.conv_w.size(); ++ki) {
        for (nn::Array& w : params.conv_w[ki]) arrays.push_back(&w);
        for (nn::Array& b : params.conv_b[ki]) arrays.push_back(&b);
    }
    arrays.push_back(&params.cls_w);
    arrays.push_back(&params.cls_b);
    return arrays;
}

ModelOptimizer make_optimizer(ModelParams& params) {
    ModelOptimizer opt;
    opt.adam.step_size = params.config.step_size;
    for (nn::Array* a : trainable_arrays(params))
        opt.states.push_back(nn::AdamState::for_param(*a));
    return opt;
}

namespace {

struct BatchGraph {
    nn::Graph g;
    std::vector<NodeId> tracked;  // param nodes in trainable_arrays order
    NodeId stacked = -1;
    NodeId loss = -1;
};

BatchGraph build_batch_graph(ModelParams& params, const std::vector<const ModelExample*>& batch,
                             bool train, Rng& rng) {
    if (batch.empty()) throw std::runtime_error("empty training batch");
    const ModelConfig& cfg = params.config;

    BatchGraph bg;
    nn::Graph& g = bg.g;
    NodeId emb;
    if (cfg.fine_tune && params.embedding.size() > 0) {
        emb = g.param(&params.embedding);
        bg.tracked.push_back(emb);
    } else {
        emb = g.value(params.embedding);
    }
    std::vector<std::vector<NodeId>> w_nodes(params.conv_w.size());
    std::vector<std::vector<NodeId>> b_nodes(params.conv_b.size());
    for (std::size_t ki = 0; ki < params.conv_w.size(); ++ki) {
        for (nn::Array& w : params.conv_w[ki]) {
            w_nodes[ki].push_back(g.param(&w));
            bg.tracked.push_back(w_nodes[ki].back());
        }
        for (nn::Array& b : params.conv_b[ki]) {
            b_nodes[ki].push_back(g.param(&b));
            bg.tracked.push_back(b_nodes[ki].back());
        }
    }
    NodeId cw = g.param(&params.cls_w);
    NodeId cb = g.param(&params.cls_b);
    bg.tracked.push_back(cw);
    bg.tracked.push_back(cb);

    std::vector<NodeId> prob_rows;
    std::vector<int> labels;
    prob_rows.reserve(batch.size());
    for (const ModelExample* ex : batch) {
        if (static_cast<int>(ex->rows.size()) != cfg.sequence_length)
            throw std::runtime_error("example row count does not match sequence length");
        if (ex->label < 0 || ex->label >= cfg.classes)
            throw std::runtime_error("example label out of range");
        NodeId x = g.gather_rows(emb, ex->rows);
        prob_rows.push_back(model_head(g, x, w_nodes, b_nodes, cw, cb, cfg.dropout, train, rng));
        labels.push_back(ex->label);
    }
    bg.stacked = g.stack_rows(prob_rows);
    bg.loss = g.weighted_cross_entropy(bg.stacked, labels, cfg.resolved_alpha());
    return bg;
}

}  // namespace

StepResult training_step(ModelParams& params, ModelOptimizer& opt,
                         const std::vector<const ModelExample*>& batch, Rng& rng) {
    const int k_classes = params.config.classes;
    BatchGraph bg = build_batch_graph(params, batch, true, rng);

    StepResult result;
    result.loss = static_cast<double>(bg.g.item(bg.loss));
    const nn::Array& probs = bg.g.value_of(bg.stacked);
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (argmax_row(probs.v.data() + i * static_cast<std::size_t>(k_classes), k_classes) ==
            batch[i]->label)
            ++result.correct;

    bg.g.backward(bg.loss);
    std::vector<nn::Array*> arrays = trainable_arrays(params);
    if (arrays.size() != bg.tracked.size() || arrays.size() != opt.states.size())
        throw std::runtime_error("optimizer state does not match trainable parameters");
    for (std::size_t i = 0; i < arrays.size(); ++i)
        nn::adam_step(*arrays[i], bg.g.grad_of(bg.tracked[i]), opt.states[i], opt.adam);
    return result;
}

std::pair<double, std::vector<std::vector<float>>> batch_gradients(
    ModelParams& params, const std::vector<const ModelExample*>& batch) {
    Rng rng(0);
    BatchGraph bg = build_batch_graph(params, batch, false, rng);
    double loss = static_cast<double>(bg.g.item(bg.loss));
    bg.g.backward(bg.loss);
    std::vector<std::vector<float>> grads;
    grads.reserve(bg.tracked.size());
    for (NodeId id : bg.tracked) grads.push_back(bg.g.grad_of(id).v);
    return {loss, std::move(grads)};
}

StepResult evaluate_examples(const ModelParams& params, const std::vector<ModelExample>& set) {
    if (set.empty()) throw std::runtime_error("cannot evaluate an empty example set");
    const ModelConfig& cfg = params.config;
    const int d = cfg.dimension;
    const int k_classes = cfg.classes;
    nn::Array alpha = cfg.resolved_alpha();
    Rng rng(0);

    StepResult result;
    double total = 0.0;
    for (const ModelExample& ex : set) {
        SequenceMatrix sm;
        sm.x = nn::Array({cfg.sequence_length, d});
        for (int i = 0; i < cfg.sequence_length; ++i) {
            int r = ex.rows[static_cast<std::size_t>(i)];
            if (r < 0) continue;
            std::copy_n(params.embedding.v.begin() + static_cast<std::size_t>(r) * d,
                        static_cast<std::size_t>(d), sm.x.v.begin() + static_cast<std::size_t>(i) * d);
        }
        std::vector<float> probs = forward(params, sm, false, rng);
        double p = std::max(static_cast<double>(probs[static_cast<std::size_t>(ex.label)]), kLogClamp);
        total -= static_cast<double>(alpha[ex.label]) * std::log(p);
        if (argmax_row(probs.data(), k_classes) == ex.label) ++result.correct;
    }
    result.loss = total / static_cast<double>(set.size());
    return result;
}

std::pair<ModelParams, TrainHistory> train_model(ModelParams params,
                                                 const std::vector<ModelExample>& train_set,
                                                 const std::vector<ModelExample>& val_set) {
    params.config.validate();
    if (train_set.empty() || val_set.empty())
        throw std::runtime_error("training and validation sets must be non-empty");

    const ModelConfig& cfg = params.config;
    Rng rng(cfg.seed);
    ModelOptimizer opt = make_optimizer(params);
    EarlyStopper stopper(cfg.patience);
    TrainHistory history;
    ModelParams best = params;

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        shuffle(order, rng);

        double loss_sum = 0.0;
        int correct = 0;
        std::size_t seen = 0;
        int batch_index = 0;
        while (seen < order.size()) {
            std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                     order.size() - seen);
            std::vector<const ModelExample*> batch;
            batch.reserve(take);
            for (std::size_t i = 0; i < take; ++i)
                batch.push_back(&train_set[order[seen + i]]);
            StepResult step = training_step(params, opt, batch, rng);
            if (!std::isfinite(step.loss))
                throw std::runtime_error("training loss became non-finite at epoch " +
                                         std::to_string(epoch + 1) + ", batch " +
                                         std::to_string(batch_index + 1));
            loss_sum += step.loss * static_cast<double>(take);
            correct += step.correct;
            seen += take;
            ++batch_index;
        }

        StepResult val = evaluate_examples(params, val_set);
        auto t1 = std::chrono::steady_clock::now();

        EpochRecord record;
        record.train_loss = loss_sum / static_cast<double>(train_set.size());
        record.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
        record.val_loss = val.loss;
        record.val_accuracy = static_cast<double>(val.correct) / static_cast<double>(val_set.size());
        record.seconds = std::chrono::duration<double>(t1 - t0).count();
        history.epochs.push_back(record);

        bool stop = stopper.observe(val.loss);
        if (stopper.improved_last()) best = params;
        if (stop) break;
    }

    history.best_epoch = stopper.best_epoch();
    return {std::move(best), std::move(history)};
}

std::int64_t count_parameters(const ModelParams& params, bool include_embeddings) {
    std::int64_t total = 0;
    for (std::size_t ki = 0; ki < params.conv_w.size(); ++ki) {
        for (const nn::Array& w : params.conv_w[ki]) total += w.size();
        for (const nn::Array& b : params.conv_b[ki]) total += b.size();
    }
    total += params.cls_w.size();
    total += params.cls_b.size();
    if (include_embeddings) total += params.embedding.size();
    return total;
}

void save_model(const ModelParams& params, const std::vector<std::string>& labels,
                const std::string& path) {
    if (static_cast<int>(labels.size()) != params.config.classes)
        throw std::runtime_error("label count does not match the model class count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    serial::write_header(out, kMagic, kVersion);

    const ModelConfig& cfg = params.config;
    serial::write_u32(out, static_cast<std::uint32_t>(cfg.kernels.size()));
    for (int k : cfg.kernels) serial::write_i32(out, k);
    serial::write_i32(out, cfg.filters);
    serial::write_f32(out, cfg.dropout);
    serial::write_i32(out, cfg.dimension);
    serial::write_i32(out, cfg.sequence_length);
    serial::write_i32(out, cfg.classes);
    serial::write_u8(out, cfg.fine_tune ? 1 : 0);
    serial::write_u8(out, cfg.init == EmbeddingInit::Pretrained ? 0 : 1);
    serial::write_u32(out, static_cast<std::uint32_t>(cfg.class_weights.size()));
    for (float w : cfg.class_weights) serial::write_f32(out, w);
    serial::write_f32(out, cfg.step_size);
    serial::write_i32(out, cfg.batch_size);
    serial::write_i32(out, cfg.max_epochs);
    serial::write_i32(out, cfg.patience);
    serial::write_u64(out, cfg.seed);
    serial::write_u8(out, static_cast<std::uint8_t>(cfg.prep_mode));

    serial::write_u32(out, static_cast<std::uint32_t>(labels.size()));
    for (const std::string& s : labels) serial::write_string(out, s);
    serial::write_u64(out, params.vocab.size());
    for (const std::string& s : params.vocab) serial::write_string(out, s);

    serial::write_f32_array(out, params.embedding.v.data(), params.embedding.v.size());
    for (std::size_t ki = 0; ki < params.conv_w.size(); ++ki) {
        for (const nn::Array& w : params.conv_w[ki])
            serial::write_f32_array(out, w.v.data(), w.v.size());
        for (const nn::Array& b : params.conv_b[ki])
            serial::write_f32_array(out, b.v.data(), b.v.size());
    }
    serial::write_f32_array(out, params.cls_w.v.data(), params.cls_w.v.size());
    serial::write_f32_array(out, params.cls_b.v.data(), params.cls_b.v.size());
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    serial::expect_header(in, kMagic, kVersion);

    LoadedModel loaded;
    ModelConfig& cfg = loaded.params.config;
    std::uint32_t kernel_count = serial::read_u32(in);
    cfg.kernels.clear();
    for (std::uint32_t i = 0; i < kernel_count; ++i) cfg.kernels.push_back(serial::read_i32(in));
    cfg.filters = serial::read_i32(in);
    cfg.dropout = serial::read_f32(in);
    cfg.dimension = serial::read_i32(in);
    cfg.sequence_length = serial::read_i32(in);
    cfg.classes = serial::read_i32(in);
    cfg.fine_tune = serial::read_u8(in) != 0;
    cfg.init = serial::read_u8(in) == 0 ? EmbeddingInit::Pretrained : EmbeddingInit::Random;
    std::uint32_t weight_count = serial::read_u32(in);
    cfg.class_weights.clear();
    for (std::uint32_t i = 0; i < weight_count; ++i) cfg.class_weights.push_back(serial::read_f32(in));
    cfg.step_size = serial::read_f32(in);
    cfg.batch_size = serial::read_i32(in);
    cfg.max_epochs = serial::read_i32(in);
    cfg.patience = serial::read_i32(in);
    cfg.seed = serial::read_u64(in);
    std::uint8_t mode = serial::read_u8(in);
    if (mode > 2) throw std::runtime_error("bad preprocessing mode byte in model file");
    cfg.prep_mode = static_cast<PrepMode>(mode);
    cfg.validate();

    std::uint32_t label_count = serial::read_u32(in);
    for (std::uint32_t i = 0; i < label_count; ++i) loaded.labels.push_back(serial::read_string(in));
    std::uint64_t vocab_count = serial::read_u64(in);
    ModelParams& params = loaded.params;
    params.vocab.reserve(vocab_count);
    for (std::uint64_t i = 0; i < vocab_count; ++i) {
        std::string tok = serial::read_string(in);
        params.index.emplace(tok, static_cast<int>(i));
        params.vocab.push_back(std::move(tok));
    }

    params.embedding = nn::Array({static_cast<int>(vocab_count), cfg.dimension});
    serial::read_f32_array(in, params.embedding.v.data(), params.embedding.v.size());
    params.conv_w.resize(cfg.kernels.size());
    params.conv_b.resize(cfg.kernels.size());
    for (std::size_t ki = 0; ki < cfg.kernels.size(); ++ki) {
        int k = cfg.kernels[ki];
        for (int fi = 0; fi < cfg.filters; ++fi) {
            nn::Array w({k, cfg.dimension});
            serial::read_f32_array(in, w.v.data(), w.v.size());
            params.conv_w[ki].push_back(std::move(w));
        }
        for (int fi = 0; fi < cfg.filters; ++fi) {
            nn::Array b({1});
            serial::read_f32_array(in, b.v.data(), b.v.size());
            params.conv_b[ki].push_back(std::move(b));
        }
    }
    params.cls_w = nn::Array({cfg.classes, hidden_width(cfg)});
    serial::read_f32_array(in, params.cls_w.v.data(), params.cls_w.v.size());
    params.cls_b = nn::Array({cfg.classes});
    serial::read_f32_array(in, params.cls_b.v.data(), params.cls_b.v.size());
    return loaded;
}

}  // namespace lexcite
