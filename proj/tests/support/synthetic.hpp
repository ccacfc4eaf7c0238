#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Three-class corpus where class identity is the order of three shared marker
// words: every document contains "kovar", "rilden" and "mazot" exactly once,
// and the class determines which pair of them is adjacent (kovar rilden /
// rilden mazot / mazot kovar). Bag-of-words features are therefore identical
// across classes. A fraction of documents additionally carries a class-unique
// word, giving order-blind models a partial, weaker signal.
namespace synthetic {

struct Spec {
    int docs_per_class = 200;
    std::uint64_t seed = 7;
    double unique_prob = 0.65;
    int min_fillers = 18;
    int max_fillers = 26;
};

struct Corpus {
    std::vector<std::string> ids;
    std::vector<std::string> labels;     // outcome strings
    std::vector<std::string> raw_texts;  // pre-cleaning text with noise
    std::vector<std::vector<std::string>> token_views;  // post-cleaning tokens
};

Corpus make(const Spec& spec);

// case_id,case_outcome,case_title,case_text with quoting.
void write_csv(const Corpus& corpus, const std::string& path);

}  // namespace synthetic
