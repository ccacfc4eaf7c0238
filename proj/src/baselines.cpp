#include "lexcite/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "lexcite/serial.hpp"

namespace lexcite {

namespace {

constexpr char kMagic[4] = {'L', 'X', 'T', 'K'};
constexpr std::uint32_t kVersion = 1;

int majority_class(const std::vector<int>& labels) {
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    int best = labels.front();
    int best_count = 0;
    for (const auto& [label, count] : counts)
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    return best;
}

}  // namespace

TfidfModel tfidf_fit(const std::vector<TokenSequence>& train) {
    if (train.empty()) throw std::runtime_error("cannot fit tf-idf on an empty corpus");

    std::map<std::string, std::int64_t> df;
    for (const TokenSequence& doc : train) {
        std::vector<std::string> seen(doc.tokens);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const std::string& t : seen) ++df[t];
    }

    TfidfModel model;
    model.n_docs = static_cast<std::int64_t>(train.size());
    model.vocab.reserve(df.size());
    model.idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        model.index.emplace(term, static_cast<int>(model.vocab.size()));
        model.vocab.push_back(term);
        double idf = std::log(static_cast<double>(1 + model.n_docs) / static_cast<double>(1 + count)) + 1.0;
        model.idf.push_back(static_cast<float>(idf));
    }
    return model;
}

SparseVec tfidf_transform(const TfidfModel& model, const TokenSequence& doc) {
    std::map<int, double> weights;
    for (const std::string& t : doc.tokens) {
        auto it = model.index.find(t);
        if (it == model.index.end()) continue;
        weights[it->second] += static_cast<double>(model.idf[static_cast<std::size_t>(it->second)]);
    }

    double norm_sq = 0.0;
    for (const auto& [idx, w] : weights) norm_sq += w * w;
    SparseVec out;
    if (norm_sq == 0.0) return out;
    double inv = 1.0 / std::sqrt(norm_sq);
    out.entries.reserve(weights.size());
    for (const auto& [idx, w] : weights)
        out.entries.emplace_back(idx, static_cast<float>(w * inv));
    return out;
}

KnnIndex knn_fit(const TfidfModel& model, const std::vector<TokenSequence>& train,
                 const std::vector<int>& labels, int k) {
    if (train.size() != labels.size())
        throw std::runtime_error("document and label counts differ");
    if (train.empty()) throw std::runtime_error("cannot build a knn index without documents");
    if (k < 1) throw std::runtime_error("neighbor count must be at least 1");

    KnnIndex index;
    index.k = k;
    index.labels = labels;
    index.vectors.reserve(train.size());
    for (const TokenSequence& doc : train) {
        SparseVec v = tfidf_transform(model, doc);
        if (v.zero()) ++index.zero_vector_count;
        index.vectors.push_back(std::move(v));
    }
    return index;
}

double cosine_similarity(const SparseVec& a, const SparseVec& b) {
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].first < b.entries[j].first) {
            ++i;
        } else if (a.entries[i].first > b.entries[j].first) {
            ++j;
        } else {
            dot += static_cast<double>(a.entries[i].second) * static_cast<double>(b.entries[j].second);
            ++i;
            ++j;
        }
    }
    return dot;
}

KnnDecision knn_classify(const KnnIndex& index, const SparseVec& query, int k) {
    if (index.vectors.empty()) throw std::runtime_error("knn index is empty");
    if (k < 1) throw std::runtime_error("neighbor count must be at least 1");

    KnnDecision decision;
    if (query.zero()) {
        decision.class_index = majority_class(index.labels);
        decision.zero_query = true;
        return decision;
    }

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(index.vectors.size());
    for (std::size_t i = 0; i < index.vectors.size(); ++i)
        scored.emplace_back(cosine_similarity(query, index.vectors[i]), i);
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });

    std::map<int, int> votes;
    for (std::size_t i = 0; i < take; ++i) ++votes[index.labels[scored[i].second]];
    int best = -1;
    int best_count = 0;
    for (const auto& [label, count] : votes)
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    decision.class_index = best;
    return decision;
}

void save_tfidf_knn(const TfidfModel& model, const KnnIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    serial::write_header(out, kMagic, kVersion);

    serial::write_u64(out, static_cast<std::uint64_t>(model.n_docs));
    serial::write_u64(out, model.vocab.size());
    for (const std::string& t : model.vocab) serial::write_string(out, t);
    serial::write_f32_array(out, model.idf.data(), model.idf.size());

    serial::write_i32(out, index.k);
    serial::write_u64(out, index.vectors.size());
    for (std::size_t i = 0; i < index.vectors.size(); ++i) {
        serial::write_i32(out, index.labels[i]);
        const SparseVec& v = index.vectors[i];
        serial::write_u32(out, static_cast<std::uint32_t>(v.entries.size()));
        for (const auto& [idx, w] : v.entries) {
            serial::write_u32(out, static_cast<std::uint32_t>(idx));
            serial::write_f32(out, w);
        }
    }
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

TfidfKnn load_tfidf_knn(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    serial::expect_header(in, kMagic, kVersion);

    TfidfKnn loaded;
    loaded.model.n_docs = static_cast<std::int64_t>(serial::read_u64(in));
    std::uint64_t vocab_count = serial::read_u64(in);
    loaded.model.vocab.reserve(vocab_count);
    for (std::uint64_t i = 0; i < vocab_count; ++i) {
        std::string t = serial::read_string(in);
        loaded.model.index.emplace(t, static_cast<int>(i));
        loaded.model.vocab.push_back(std::move(t));
    }
    loaded.model.idf.resize(vocab_count);
    serial::read_f32_array(in, loaded.model.idf.data(), loaded.model.idf.size());

    loaded.index.k = serial::read_i32(in);
    std::uint64_t doc_count = serial::read_u64(in);
    loaded.index.vectors.reserve(doc_count);
    loaded.index.labels.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        loaded.index.labels.push_back(serial::read_i32(in));
        std::uint32_t entry_count = serial::read_u32(in);
        SparseVec v;
        v.entries.reserve(entry_count);
        for (std::uint32_t e = 0; e < entry_count; ++e) {
            int idx = static_cast<int>(serial::read_u32(in));
            float w = serial::read_f32(in);
            v.entries.emplace_back(idx, w);
        }
        if (v.zero()) ++loaded.index.zero_vector_count;
        loaded.index.vectors.push_back(std::move(v));
    }
    return loaded;
}

}  // namespace lexcite
