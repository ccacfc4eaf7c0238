#include "lexcite/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "lexcite/serial.hpp"

namespace lexcite {

namespace {

constexpr char kMagic[4] = {'L', 'X', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t hash_gram(const std::string& gram) {
    std::uint64_t h = 0;
    for (unsigned char c : gram) h = h * 257u + c;
    return h;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void EmbedConfig::validate() const {
    if (dimension < 1) throw std::runtime_error("embedding dimension must be at least 1");
    if (window < 1) throw std::runtime_error("context window must be at least 1");
    if (min_frequency < 1) throw std::runtime_error("min token frequency must be at least 1");
    if (ngram_min > ngram_max) throw std::runtime_error("n-gram range is inverted");
    if (ngram_min < 1) throw std::runtime_error("n-gram sizes must be at least 1");
    if (buckets < 1) throw std::runtime_error("bucket count must be at least 1");
    if (negatives < 0) throw std::runtime_error("negative sample count must be non-negative");
    if (epochs < 1) throw std::runtime_error("epoch count must be at least 1");
    if (!(step_size > 0.0f)) throw std::runtime_error("step size must be positive");
}

int EmbeddingTable::row(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) throw std::runtime_error("token '" + token + "' is not in the vocabulary");
    return it->second;
}

std::vector<int> extract_subwords(const std::string& word, const EmbedConfig& cfg) {
    if (word.empty()) throw std::runtime_error("cannot extract subwords of an empty token");
    std::string wrapped = "<" + word + ">";
    std::vector<int> ids;
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& gram) {
        if (seen.insert(gram).second)
            ids.push_back(static_cast<int>(hash_gram(gram) % static_cast<std::uint64_t>(cfg.buckets)));
    };
    for (int n = cfg.ngram_min; n <= cfg.ngram_max; ++n) {
        if (static_cast<std::size_t>(n) > wrapped.size()) break;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= wrapped.size(); ++i)
            add(wrapped.substr(i, static_cast<std::size_t>(n)));
    }
    add(wrapped);
    return ids;
}

EmbeddingTable train_fasttext(const std::vector<TokenSequence>& corpus, const EmbedConfig& cfg,
                              std::uint64_t seed, EmbedTrainStats* stats) {
    cfg.validate();
    if (corpus.empty()) throw std::runtime_error("cannot train embeddings on an empty corpus");

    std::unordered_map<std::string, std::uint64_t> counts;
    for (const TokenSequence& seq : corpus)
        for (const std::string& tok : seq.tokens) ++counts[tok];

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [tok, c] : counts)
        if (c >= static_cast<std::uint64_t>(cfg.min_frequency)) kept.emplace_back(tok, c);
    if (kept.empty())
        throw std::runtime_error("vocabulary is empty after the frequency cutoff");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    EmbeddingTable table;
    table.config = cfg;
    table.vocab.reserve(kept.size());
    for (const auto& [tok, c] : kept) {
        table.index.emplace(tok, static_cast<int>(table.vocab.size()));
        table.vocab.push_back(tok);
    }

    const int v = static_cast<int>(table.vocab.size());
    const int d = cfg.dimension;
    Rng rng(seed);

    table.word = nn::Array({v, d});
    table.subword = nn::Array({cfg.buckets, d});
    float span = 1.0f / static_cast<float>(d);
    for (float& x : table.word.v) x = static_cast<float>(rng.uniform(-span, span));
    for (float& x : table.subword.v) x = static_cast<float>(rng.uniform(-span, span));
    nn::Array context({v, d});

    std::vector<std::vector<int>> grams(static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i)
        grams[static_cast<std::size_t>(i)] = extract_subwords(table.vocab[static_cast<std::size_t>(i)], cfg);

    // Sequences re-expressed as vocabulary rows, sub-threshold tokens dropped.
    std::vector<std::vector<int>> stream;
    stream.reserve(corpus.size());
    std::uint64_t pairs_per_epoch = 0;
    for (const TokenSequence& seq : corpus) {
        std::vector<int> row_ids;
        row_ids.reserve(seq.tokens.size());
        for (const std::string& tok : seq.tokens) {
            auto it = table.index.find(tok);
            if (it != table.index.end()) row_ids.push_back(it->second);
        }
        std::uint64_t n = row_ids.size();
        for (std::uint64_t t = 0; t < n; ++t) {
            std::uint64_t lo = t > static_cast<std::uint64_t>(cfg.window) ? t - cfg.window : 0;
            std::uint64_t hi = std::min(n, t + static_cast<std::uint64_t>(cfg.window) + 1);
            pairs_per_epoch += (hi - lo) - 1;
        }
        if (!row_ids.empty()) stream.push_back(std::move(row_ids));
    }
    if (pairs_per_epoch == 0)
        throw std::runtime_error("corpus yields no context pairs; sequences are too short");

    // Negative sampling from the unigram distribution raised to 0.75.
    std::vector<double> cumulative(static_cast<std::size_t>(v));
    double total = 0.0;
    for (int i = 0; i < v; ++i) {
        total += std::pow(static_cast<double>(kept[static_cast<std::size_t>(i)].second), 0.75);
        cumulative[static_cast<std::size_t>(i)] = total;
    }
    auto draw_negative = [&](int exclude) {
        int id = exclude;
        while (id == exclude) {
            double u = rng.uniform() * total;
            id = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                  cumulative.begin());
            if (id >= v) id = v - 1;
        }
        return id;
    };

    const std::uint64_t total_pairs = pairs_per_epoch * static_cast<std::uint64_t>(cfg.epochs);
    std::uint64_t processed = 0;
    std::vector<float> center(static_cast<std::size_t>(d));
    std::vector<float> center_grad(static_cast<std::size_t>(d));

    if (stats != nullptr) {
        stats->epoch_loss.clear();
        stats->pair_count = pairs_per_epoch;
    }
    const std::uint64_t fifth = std::max<std::uint64_t>(1, pairs_per_epoch / 5);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        double early_loss = 0.0, late_loss = 0.0;
        std::uint64_t early_n = 0, late_n = 0;
        std::uint64_t epoch_pair = 0;

        for (const std::vector<int>& row_ids : stream) {
            int n = static_cast<int>(row_ids.size());
            for (int t = 0; t < n; ++t) {
                int word_id = row_ids[static_cast<std::size_t>(t)];
                const std::vector<int>& g = grams[static_cast<std::size_t>(word_id)];
                float inv = 1.0f / static_cast<float>(1 + g.size());

                // Composed center representation.
                for (int c = 0; c < d; ++c)
                    center[static_cast<std::size_t>(c)] =
                        table.word.v[static_cast<std::size_t>(word_id) * d + static_cast<std::size_t>(c)];
                for (int gid : g) {
                    const float* z = table.subword.v.data() + static_cast<std::size_t>(gid) * d;
                    for (int c = 0; c < d; ++c) center[static_cast<std::size_t>(c)] += z[c];
                }
                for (int c = 0; c < d; ++c) center[static_cast<std::size_t>(c)] *= inv;

                int lo = std::max(0, t - cfg.window);
                int hi = std::min(n - 1, t + cfg.window);
                for (int s = lo; s <= hi; ++s) {
                    if (s == t) continue;
                    int target = row_ids[static_cast<std::size_t>(s)];

                    double progress = static_cast<double>(processed) / static_cast<double>(total_pairs);
                    float lr = cfg.step_size * static_cast<float>(std::max(1e-4, 1.0 - progress));
                    ++processed;
                    ++epoch_pair;

                    std::fill(center_grad.begin(), center_grad.end(), 0.0f);
                    double pair_loss = 0.0;
                    for (int sample = 0; sample <= cfg.negatives; ++sample) {
                        int out;
                        double label;
                        if (sample == 0) {
                            out = target;
                            label = 1.0;
                        } else {
                            if (v < 2) break;
                            out = draw_negative(target);
                            label = 0.0;
                        }
                        float* u = context.v.data() + static_cast<std::size_t>(out) * d;
                        double score = 0.0;
                        for (int c = 0; c < d; ++c)
                            score += static_cast<double>(center[static_cast<std::size_t>(c)]) *
                                     static_cast<double>(u[c]);
                        double p = sigmoid(score);
                        pair_loss -= label > 0.5 ? std::log(std::max(p, 1e-12))
                                                 : std::log(std::max(1.0 - p, 1e-12));
                        float gscale = static_cast<float>(p - label) * lr;
                        for (int c = 0; c < d; ++c) {
                            center_grad[static_cast<std::size_t>(c)] += gscale * u[c];
                            u[c] -= gscale * center[static_cast<std::size_t>(c)];
                        }
                    }

                    // Spread the center gradient over the constituents of the mean.
                    float* w = table.word.v.data() + static_cast<std::size_t>(word_id) * d;
                    for (int c = 0; c < d; ++c) w[c] -= center_grad[static_cast<std::size_t>(c)] * inv;
                    for (int gid : g) {
                        float* z = table.subword.v.data() + static_cast<std::size_t>(gid) * d;
                        for (int c = 0; c < d; ++c) z[c] -= center_grad[static_cast<std::size_t>(c)] * inv;
                    }
                    // Keep the composed center in sync with the updated rows.
                    for (int c = 0; c < d; ++c)
                        center[static_cast<std::size_t>(c)] -= center_grad[static_cast<std::size_t>(c)] * inv;

                    epoch_loss += pair_loss;
                    if (epoch == 0) {
                        if (epoch_pair <= fifth) {
                            early_loss += pair_loss;
                            ++early_n;
                        } else if (epoch_pair > pairs_per_epoch - fifth) {
                            late_loss += pair_loss;
                            ++late_n;
                        }
                    }
                }
            }
        }

        if (stats != nullptr) {
            stats->epoch_loss.push_back(epoch_loss / static_cast<double>(epoch_pair));
            if (epoch == 0) {
                stats->first_epoch_early_loss = early_loss / static_cast<double>(std::max<std::uint64_t>(1, early_n));
                stats->first_epoch_late_loss = late_loss / static_cast<double>(std::max<std::uint64_t>(1, late_n));
            }
        }
    }

    return table;
}

std::vector<float> embed_token(const EmbeddingTable& table, const std::string& word) {
    std::vector<int> g = extract_subwords(word, table.config);
    const int d = table.config.dimension;
    std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
    int parts = 0;
    auto it = table.index.find(word);
    if (it != table.index.end()) {
        const float* w = table.word.v.data() + static_cast<std::size_t>(it->second) * d;
        for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += static_cast<double>(w[c]);
        ++parts;
    }
    for (int gid : g) {
        const float* z = table.subword.v.data() + static_cast<std::size_t>(gid) * d;
        for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += static_cast<double>(z[c]);
        ++parts;
    }
    std::vector<float> out(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c)
        out[static_cast<std::size_t>(c)] = static_cast<float>(acc[static_cast<std::size_t>(c)] / parts);
    return out;
}

std::vector<float> mean_pool(const EmbeddingTable& table, const TokenSequence& tokens) {
    if (tokens.tokens.empty())
        throw std::runtime_error("cannot mean-pool an empty token sequence");
    const int d = table.config.dimension;
    std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
    for (const std::string& tok : tokens.tokens) {
        std::vector<float> vec = embed_token(table, tok);
        for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += static_cast<double>(vec[static_cast<std::size_t>(c)]);
    }
    std::vector<float> out(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c)
        out[static_cast<std::size_t>(c)] =
            static_cast<float>(acc[static_cast<std::size_t>(c)] / static_cast<double>(tokens.tokens.size()));
    return out;
}

SequenceMatrix sequence_matrix(const EmbeddingTable& table, const TokenSequence& tokens, int l) {
    if (l < 1) throw std::runtime_error("sequence length must be at least 1");
    const int d = table.config.dimension;
    SequenceMatrix sm;
    sm.x = nn::Array({l, d});
    sm.true_length = static_cast<int>(std::min<std::size_t>(tokens.tokens.size(), static_cast<std::size_t>(l)));
    for (int i = 0; i < sm.true_length; ++i) {
        std::vector<float> vec = embed_token(table, tokens.tokens[static_cast<std::size_t>(i)]);
        std::copy(vec.begin(), vec.end(), sm.x.v.begin() + static_cast<std::size_t>(i) * d);
    }
    return sm;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    serial::write_header(out, kMagic, kVersion);
    serial::write_i32(out, table.config.dimension);
    serial::write_i32(out, table.config.window);
    serial::write_i32(out, table.config.min_frequency);
    serial::write_i32(out, table.config.ngram_min);
    serial::write_i32(out, table.config.ngram_max);
    serial::write_i32(out, table.config.buckets);
    serial::write_i32(out, table.config.negatives);
    serial::write_i32(out, table.config.epochs);
    serial::write_f32(out, table.config.step_size);
    serial::write_u64(out, table.vocab.size());
    for (const std::string& tok : table.vocab) serial::write_string(out, tok);
    serial::write_f32_array(out, table.word.v.data(), table.word.v.size());
    serial::write_f32_array(out, table.subword.v.data(), table.subword.v.size());
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    serial::expect_header(in, kMagic, kVersion);
    EmbeddingTable table;
    table.config.dimension = serial::read_i32(in);
    table.config.window = serial::read_i32(in);
    table.config.min_frequency = serial::read_i32(in);
    table.config.ngram_min = serial::read_i32(in);
    table.config.ngram_max = serial::read_i32(in);
    table.config.buckets = serial::read_i32(in);
    table.config.negatives = serial::read_i32(in);
    table.config.epochs = serial::read_i32(in);
    table.config.step_size = serial::read_f32(in);
    table.config.validate();
    std::uint64_t count = serial::read_u64(in);
    table.vocab.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string tok = serial::read_string(in);
        table.index.emplace(tok, static_cast<int>(i));
        table.vocab.push_back(std::move(tok));
    }
    table.word = nn::Array({static_cast<int>(count), table.config.dimension});
    serial::read_f32_array(in, table.word.v.data(), table.word.v.size());
    table.subword = nn::Array({table.config.buckets, table.config.dimension});
    serial::read_f32_array(in, table.subword.v.data(), table.subword.v.size());
    return table;
}

}  // namespace lexcite
