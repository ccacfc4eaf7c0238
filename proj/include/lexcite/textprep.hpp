#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lexcite {

enum class PrepMode { RawFiltered, Stemmed, Lemmatized };

const char* to_string(PrepMode mode);
PrepMode prep_mode_from_string(const std::string& name);  // throws on unknown name

struct PrepConfig {
    std::unordered_set<std::string> stopwords;
    std::vector<std::string> boilerplate;  // lowercase space-separated phrases
    std::unordered_map<std::string, std::string> lemma_exceptions;
    std::size_t min_token_length = 3;
    PrepMode mode = PrepMode::Lemmatized;
    bool prepend_title = false;

    // Built-in English stopwords, standard legal boilerplate phrases and the
    // irregular-form lemma lexicon. The files under data/ mirror these lists.
    static PrepConfig defaults();
};

// Lowercase text with URLs, digits, punctuation and boilerplate phrases
// removed and whitespace collapsed. Idempotent.
struct CleanText {
    std::string value;
};

struct TokenSequence {
    std::vector<std::string> tokens;
    PrepMode mode = PrepMode::RawFiltered;
};

CleanText clean_text(const std::string& raw, const PrepConfig& cfg);

// Maximal non-space runs, in order.
std::vector<std::string> tokenize(const CleanText& cleaned);

// Order-preserving removal of stopwords and tokens shorter than
// cfg.min_token_length.
std::vector<std::string> filter_tokens(std::vector<std::string> tokens, const PrepConfig& cfg);

// Porter (1980) suffix-stripping, steps 1a-5b. Expects a lowercase
// alphabetic word.
std::string porter_stem(const std::string& word);

// Dictionary-free lemmatizer: irregular-form lookup first, then ordered
// suffix rules with verb-sense priority (ies->y, ing/ed with
// consonant-undoubling and e-restoration, es/s), else identity. Expects a
// lowercase alphabetic word.
std::string lemmatize(const std::string& word,
                      const std::unordered_map<std::string, std::string>& exceptions);

// clean -> tokenize -> filter -> per-token normalization for cfg.mode.
TokenSequence preprocess_document(const std::string& raw, const PrepConfig& cfg);

// Line-oriented UTF-8 data files, one entry per line, '#' starts a comment.
std::unordered_set<std::string> load_word_list(const std::string& path);
std::vector<std::string> load_phrase_list(const std::string& path);
// Each line: "<form> <lemma>".
std::unordered_map<std::string, std::string> load_lemma_exceptions(const std::string& path);

}  // namespace lexcite
