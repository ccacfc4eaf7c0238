#include "synthetic.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

#include "lexcite/rng.hpp"

namespace synthetic {

namespace {

const std::array<std::string, 3> kMarkers = {"kovar", "rilden", "mazot"};
const std::array<std::string, 3> kUniques = {"plurn", "grathin", "smibol"};
const std::array<std::string, 3> kOutcomes = {"affirmed", "distinguished", "overruled"};

// class -> (first, second) adjacent marker pair; the remaining marker floats.
const std::array<std::pair<int, int>, 3> kSignalPairs = {{{0, 1}, {1, 2}, {2, 0}}};

std::vector<std::string> filler_pool() {
    static const std::array<std::string, 20> prefixes = {
        "bal", "cor", "dun", "fel", "gor", "hin", "jor", "lum", "ned", "pol",
        "quin", "ros", "tam", "vol", "wur", "zel", "bro", "cle", "dra", "fro"};
    static const std::array<std::string, 2> suffixes = {"dek", "mir"};
    std::vector<std::string> pool;
    for (const std::string& p : prefixes)
        for (const std::string& s : suffixes) pool.push_back(p + s);
    return pool;
}

int signal_class(const std::string& a, const std::string& b) {
    for (int c = 0; c < 3; ++c)
        if (a == kMarkers[static_cast<std::size_t>(kSignalPairs[static_cast<std::size_t>(c)].first)] &&
            b == kMarkers[static_cast<std::size_t>(kSignalPairs[static_cast<std::size_t>(c)].second)])
            return c;
    return -1;
}

bool placement_ok(const std::vector<std::string>& tokens, int wanted_class) {
    int hits = 0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        int c = signal_class(tokens[i], tokens[i + 1]);
        if (c < 0) continue;
        if (c != wanted_class) return false;
        ++hits;
    }
    return hits == 1;
}

template <typename T>
void insert_at(std::vector<T>& v, std::size_t pos, T value) {
    v.insert(v.begin() + static_cast<std::ptrdiff_t>(pos), std::move(value));
}

std::vector<std::string> build_tokens(int cls, const std::vector<std::string>& pool,
                                      const Spec& spec, lexcite::Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int span = spec.max_fillers - spec.min_fillers + 1;
        int n = spec.min_fillers + static_cast<int>(rng.below(static_cast<std::size_t>(span)));
        std::vector<std::string> tokens;
        tokens.reserve(static_cast<std::size_t>(n) + 5);
        for (int i = 0; i < n; ++i) tokens.push_back(pool[rng.below(pool.size())]);

        int floating = 3 - kSignalPairs[static_cast<std::size_t>(cls)].first -
                       kSignalPairs[static_cast<std::size_t>(cls)].second;
        insert_at(tokens, rng.below(tokens.size() + 1),
                  kMarkers[static_cast<std::size_t>(floating)]);
        bool with_unique = rng.uniform() < spec.unique_prob;
        if (with_unique) {
            insert_at(tokens, rng.below(tokens.size() + 1),
                      kUniques[static_cast<std::size_t>(cls)]);
            insert_at(tokens, rng.below(tokens.size() + 1),
                      kUniques[static_cast<std::size_t>(cls)]);
        }
        std::size_t pair_pos = rng.below(tokens.size() + 1);
        insert_at(tokens, pair_pos,
                  kMarkers[static_cast<std::size_t>(
                      kSignalPairs[static_cast<std::size_t>(cls)].second)]);
        insert_at(tokens, pair_pos,
                  kMarkers[static_cast<std::size_t>(
                      kSignalPairs[static_cast<std::size_t>(cls)].first)]);

        if (placement_ok(tokens, cls)) return tokens;
    }
    throw std::runtime_error("could not place synthetic signal tokens");
}

// Noise that the cleaning pipeline provably removes: stopwords, digits,
// punctuation and a URL.
std::string render_raw(const std::vector<std::string>& tokens, lexcite::Rng& rng) {
    std::string text = "The ";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        text += tokens[i];
        if (rng.below(9) == 0) text += ",";
        if (rng.below(13) == 0) text += " 42";
        if (rng.below(7) == 0) text += " of the";
        text += " ";
    }
    if (rng.below(5) == 0) text += "https://example.test/ref ";
    text += "42.";
    return text;
}

std::string csv_quote(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

}  // namespace

Corpus make(const Spec& spec) {
    lexcite::Rng rng(spec.seed);
    std::vector<std::string> pool = filler_pool();
    Corpus corpus;
    int total = spec.docs_per_class * 3;
    for (int i = 0; i < total; ++i) {
        int cls = i % 3;
        std::vector<std::string> tokens = build_tokens(cls, pool, spec, rng);
        char id[32];
        std::snprintf(id, sizeof(id), "case_%04d", i + 1);
        corpus.ids.push_back(id);
        corpus.labels.push_back(kOutcomes[static_cast<std::size_t>(cls)]);
        corpus.raw_texts.push_back(render_raw(tokens, rng));
        corpus.token_views.push_back(std::move(tokens));
    }
    return corpus;
}

void write_csv(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "case_id,case_outcome,case_title,case_text\n";
    for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
        out << corpus.ids[i] << ',' << corpus.labels[i] << ','
            << csv_quote("Case " + corpus.ids[i]) << ',' << csv_quote(corpus.raw_texts[i]) << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

}  // namespace synthetic
