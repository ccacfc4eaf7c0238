#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lexcite/baselines.hpp"

using namespace lexcite;

namespace {

TokenSequence seq(std::vector<std::string> toks) {
    TokenSequence s;
    s.mode = PrepMode::Lemmatized;
    s.tokens = std::move(toks);
    return s;
}

double norm(const SparseVec& v) {
    double total = 0.0;
    for (const auto& [i, x] : v.entries) total += static_cast<double>(x) * x;
    return std::sqrt(total);
}

}  // namespace

TEST_CASE("inverse document frequencies match the closed form") {
    std::vector<TokenSequence> docs{
        seq({"every", "one"}),
        seq({"every", "two"}),
        seq({"every", "two", "two"}),  // repeats count once for df
    };
    TfidfModel model = tfidf_fit(docs);
    CHECK(model.n_docs == 3);
    REQUIRE(model.vocab == std::vector<std::string>{"every", "one", "two"});
    CHECK(model.idf[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(model.idf[1] == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-7));
    CHECK(model.idf[2] == doctest::Approx(std::log(4.0 / 3.0) + 1.0).epsilon(1e-7));
    CHECK(model.index.at("one") == 1);

    CHECK_THROWS_WITH_AS(tfidf_fit({}), doctest::Contains("empty corpus"), std::runtime_error);
}

TEST_CASE("document vectors are unit length or exactly zero") {
    std::vector<TokenSequence> docs{
        seq({"alpha", "beta"}),
        seq({"alpha", "gamma"}),
        seq({"beta", "gamma"}),
    };
    TfidfModel model = tfidf_fit(docs);

    {
        // one repeated known term collapses to a single unit weight
        SparseVec v = tfidf_transform(model, seq({"alpha", "alpha", "alpha"}));
        REQUIRE(v.entries.size() == 1);
        CHECK(v.entries[0].first == model.index.at("alpha"));
        CHECK(v.entries[0].second == doctest::Approx(1.0).epsilon(1e-7));
    }
    {
        // duplicated term doubles its raw count before normalization
        SparseVec v = tfidf_transform(model, seq({"alpha", "alpha", "beta"}));
        REQUIRE(v.entries.size() == 2);
        double idf = std::log(4.0 / 3.0) + 1.0;  // every term appears in 2 of 3 docs
        double expect_a = 2.0 * idf, expect_b = 1.0 * idf;
        double n = std::sqrt(expect_a * expect_a + expect_b * expect_b);
        CHECK(v.entries[0].second == doctest::Approx(expect_a / n).epsilon(1e-6));
        CHECK(v.entries[1].second == doctest::Approx(expect_b / n).epsilon(1e-6));
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-6));
    }
    {
        // unknown terms contribute nothing; all-unknown and empty become zero
        SparseVec mixed = tfidf_transform(model, seq({"alpha", "zeppelin"}));
        REQUIRE(mixed.entries.size() == 1);
        CHECK(norm(mixed) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(tfidf_transform(model, seq({"zeppelin", "quark"})).zero());
        CHECK(tfidf_transform(model, seq({})).zero());
    }
}

TEST_CASE("cosine similarity merges sorted sparse entries") {
    SparseVec a;
    a.entries = {{0, 0.6f}, {1, 0.8f}};
    SparseVec b;
    b.entries = {{1, 1.0f}};
    SparseVec c;
    c.entries = {{2, 1.0f}};
    CHECK(cosine_similarity(a, b) == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(cosine_similarity(a, c) == doctest::Approx(0.0));
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(cosine_similarity(a, SparseVec{}) == doctest::Approx(0.0));
}

TEST_CASE("nearest neighbor votes follow the tie conventions") {
    std::vector<TokenSequence> train{
        seq({"apple", "apple", "crisp"}),   // 0: label 0
        seq({"apple", "apple"}),            // 1: label 0
        seq({"banana", "banana", "crisp"}), // 2: label 1
        seq({"banana", "banana"}),          // 3: label 1
        seq({"cherry", "cherry"}),          // 4: label 2
    };
    std::vector<int> labels{0, 0, 1, 1, 2};
    TfidfModel model = tfidf_fit(train);
    KnnIndex index = knn_fit(model, train, labels, 3);
    CHECK(index.vectors.size() == 5);
    CHECK(index.zero_vector_count == 0);

    // the nearest neighbor of a training document is itself
    for (std::size_t i = 0; i < train.size(); ++i) {
        SparseVec q = tfidf_transform(model, train[i]);
        CHECK(knn_classify(index, q, 1).class_index == labels[i]);
    }

    // two apple documents outvote one banana at k = 3
    {
        SparseVec q = tfidf_transform(model, seq({"apple", "banana"}));
        KnnDecision d = knn_classify(index, q, 3);
        CHECK(d.class_index == 0);
        CHECK_FALSE(d.zero_query);
    }

    // a 1:1 vote split resolves to the lower class index
    {
        SparseVec q = tfidf_transform(model, seq({"apple", "banana"}));
        // equally similar apple and banana neighbors
        CHECK(knn_classify(index, q, 2).class_index == 0);
    }

    // a request for more neighbors than documents uses them all
    {
        SparseVec q = tfidf_transform(model, seq({"apple"}));
        CHECK(knn_classify(index, q, 50).class_index == 0);
    }

    CHECK_THROWS_WITH_AS(knn_classify(index, SparseVec{}, 0), doctest::Contains("at least 1"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(knn_classify(KnnIndex{}, SparseVec{}, 1), doctest::Contains("index is empty"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(knn_fit(model, train, {0, 1}, 3), doctest::Contains("counts differ"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(knn_fit(model, {}, {}, 3), doctest::Contains("without documents"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(knn_fit(model, train, labels, 0), doctest::Contains("at least 1"),
                         std::runtime_error);
}

TEST_CASE("identical similarities prefer the earlier training document") {
    std::vector<TokenSequence> train{
        seq({"zap", "zap"}),  // ordinal 0, label 1
        seq({"zap", "zap"}),  // ordinal 1, label 0: same vector, later ordinal
        seq({"pop"}),
    };
    std::vector<int> labels{1, 0, 2};
    TfidfModel model = tfidf_fit(train);
    KnnIndex index = knn_fit(model, train, labels, 1);
    SparseVec q = tfidf_transform(model, seq({"zap"}));
    CHECK(knn_classify(index, q, 1).class_index == 1);
}

TEST_CASE("zero queries fall back to the flagged global majority") {
    std::vector<TokenSequence> train{
        seq({"red"}), seq({"red"}), seq({"blue"}), seq({"blue"}), seq({"blue"})};
    std::vector<int> labels{1, 1, 0, 0, 0};
    TfidfModel model = tfidf_fit(train);
    KnnIndex index = knn_fit(model, train, labels, 3);

    KnnDecision d = knn_classify(index, tfidf_transform(model, seq({"unseen"})), 3);
    CHECK(d.zero_query);
    CHECK(d.class_index == 0);

    // an exact majority tie resolves to the lower class label
    KnnIndex tied = knn_fit(model, train, {1, 1, 0, 0, 2}, 3);
    CHECK(knn_classify(tied, SparseVec{}, 3).class_index == 0);

    // training documents that vectorize to zero are counted
    std::vector<TokenSequence> sparse_train{seq({"red"}), seq({})};
    KnnIndex with_zero = knn_fit(model, sparse_train, {0, 1}, 1);
    CHECK(with_zero.zero_vector_count == 1);
}

TEST_CASE("fitting never mutates the supplied corpus") {
    std::vector<TokenSequence> train{seq({"one", "two"}), seq({"two", "three"})};
    std::vector<TokenSequence> copy = train;
    TfidfModel model = tfidf_fit(train);
    knn_fit(model, train, {0, 1}, 1);
    REQUIRE(train.size() == copy.size());
    for (std::size_t i = 0; i < train.size(); ++i) CHECK(train[i].tokens == copy[i].tokens);
}

TEST_CASE("saved retrieval models reload bit for bit") {
    std::vector<TokenSequence> train{
        seq({"apple", "apple"}), seq({"banana"}), seq({"apple", "banana", "cherry"})};
    std::vector<int> labels{0, 1, 1};
    TfidfModel model = tfidf_fit(train);
    KnnIndex index = knn_fit(model, train, labels, 2);

    const std::string path = "tfidf_roundtrip.bin";
    save_tfidf_knn(model, index, path);
    TfidfKnn back = load_tfidf_knn(path);
    std::remove(path.c_str());

    CHECK(back.model.vocab == model.vocab);
    CHECK(back.model.idf == model.idf);
    CHECK(back.model.n_docs == model.n_docs);
    CHECK(back.model.index.at("banana") == model.index.at("banana"));
    CHECK(back.index.k == 2);
    CHECK(back.index.labels == labels);
    CHECK(back.index.zero_vector_count == index.zero_vector_count);
    REQUIRE(back.index.vectors.size() == index.vectors.size());
    for (std::size_t i = 0; i < index.vectors.size(); ++i)
        CHECK(back.index.vectors[i].entries == index.vectors[i].entries);

    SparseVec q = tfidf_transform(back.model, seq({"apple", "cherry"}));
    CHECK(knn_classify(back.index, q, 2).class_index ==
          knn_classify(index, q, 2).class_index);

    CHECK_THROWS_WITH_AS(load_tfidf_knn("no_such.bin"), doctest::Contains("no_such.bin"),
                         std::runtime_error);
}
