#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexcite/textprep.hpp"

namespace lexcite {

// Sparse vector with entries sorted by feature index.
struct SparseVec {
    std::vector<std::pair<int, float>> entries;

    bool zero() const { return entries.empty(); }
};

struct TfidfModel {
    std::vector<std::string> vocab;  // ascending lexicographic order
    std::unordered_map<std::string, int> index;
    std::vector<float> idf;  // idf(t) = ln((1+N)/(1+df(t))) + 1
    std::int64_t n_docs = 0;
};

struct KnnIndex {
    std::vector<SparseVec> vectors;  // unit norm, or exactly zero
    std::vector<int> labels;
    int k = 5;
    int zero_vector_count = 0;
};

struct KnnDecision {
    int class_index = 0;
    bool zero_query = false;  // fell back to the global majority class
};

TfidfModel tfidf_fit(const std::vector<TokenSequence>& train);

// Raw term counts times idf, L2-normalized. Unknown terms contribute nothing;
// an all-unknown or empty document maps to the zero vector.
SparseVec tfidf_transform(const TfidfModel& model, const TokenSequence& doc);

KnnIndex knn_fit(const TfidfModel& model, const std::vector<TokenSequence>& train,
                 const std::vector<int>& labels, int k = 5);

// Majority label among the k nearest training vectors by cosine similarity.
// Similarity ties prefer the lower training ordinal; vote ties prefer the
// lower class index. A zero query falls back to the global majority class.
KnnDecision knn_classify(const KnnIndex& index, const SparseVec& query, int k);

double cosine_similarity(const SparseVec& a, const SparseVec& b);

struct TfidfKnn {
    TfidfModel model;
    KnnIndex index;
};

void save_tfidf_knn(const TfidfModel& model, const KnnIndex& index, const std::string& path);
TfidfKnn load_tfidf_knn(const std::string& path);

}  // namespace lexcite
