#include "lexcite/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "textprep_data.hpp"

namespace lexcite {

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_ascii_digit(c);
}

std::string to_lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool is_url_run(const std::string& run) {
    if (run.rfind("www.", 0) == 0) return true;
    std::size_t i = 0;
    while (i < run.size() && run[i] >= 'a' && run[i] <= 'z') ++i;
    return i > 0 && run.compare(i, 3, "://") == 0;
}

std::string drop_url_runs(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space_byte(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !is_space_byte(text[end])) ++end;
        std::string run = text.substr(i, end - i);
        if (!is_url_run(run)) out += run;
        i = end;
    }
    return out;
}

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space_byte(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

bool at_word_boundary(const std::string& text, std::size_t pos, std::size_t len) {
    bool left_ok = pos == 0 || text[pos - 1] == ' ';
    bool right_ok = pos + len == text.size() || text[pos + len] == ' ';
    return left_ok && right_ok;
}

// Removes every boundary-delimited occurrence of each phrase, re-collapsing
// after each pass, until no phrase matches.
std::string strip_boilerplate(std::string text, const std::vector<std::string>& phrases) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const std::string& phrase : phrases) {
            if (phrase.empty()) continue;
            std::size_t pos = 0;
            bool removed = false;
            while ((pos = text.find(phrase, pos)) != std::string::npos) {
                if (at_word_boundary(text, pos, phrase.size())) {
                    text.replace(pos, phrase.size(), " ");
                    removed = true;
                } else {
                    ++pos;
                }
            }
            if (removed) {
                text = collapse_whitespace(text);
                changed = true;
            }
        }
    }
    return text;
}

// ---------------------------------------------------------------------------
// Porter (1980) stemmer. Straight transcription of the published algorithm:
// b holds the word, k the index of its last letter, j the end of the stem a
// successful suffix match leaves behind.
// ---------------------------------------------------------------------------
class Porter {
  public:
    std::string stem(std::string word) {
        if (word.size() <= 2) return word;
        b = std::move(word);
        k = static_cast<int>(b.size()) - 1;
        j = 0;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        b.resize(static_cast<std::size_t>(k + 1));
        return b;
    }

  private:
    std::string b;
    int k = 0;
    int j = 0;

    char at(int i) const { return b[static_cast<std::size_t>(i)]; }

    bool cons(int i) const {
        switch (at(i)) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        bool prev_vowel = false;
        for (int i = 0; i <= j; ++i) {
            bool v = !cons(i);
            if (!v && prev_vowel) ++n;
            prev_vowel = v;
        }
        return n;
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int i) const { return i >= 1 && at(i) == at(i - 1) && cons(i); }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char c = at(i);
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        if (len > k + 1) return false;
        if (b.compare(static_cast<std::size_t>(k - len + 1), static_cast<std::size_t>(len), s) != 0)
            return false;
        j = k - len;
        return true;
    }

    void setto(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        b.replace(static_cast<std::size_t>(j + 1), b.size() - static_cast<std::size_t>(j + 1), s);
        k = j + len;
    }

    void r(const char* s) {
        if (m() > 0) setto(s);
    }

    void step1ab() {
        if (at(k) == 's') {
            if (ends("sses")) setto("ss");
            else if (ends("ies")) setto("i");
            else if (at(k - 1) != 's') --k;
        }
        if (ends("eed")) {
            if (m() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at")) setto("ate");
            else if (ends("bl")) setto("ble");
            else if (ends("iz")) setto("ize");
            else if (doublec(k)) {
                --k;
                char c = at(k);
                if (c == 'l' || c == 's' || c == 'z') ++k;
            } else if (m() == 1 && cvc(k)) {
                setto("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b[static_cast<std::size_t>(k)] = 'i';
    }

    void step2() {
        if (k < 1) return;
        switch (at(k - 1)) {
            case 'a':
                if (ends("ational")) { r("ate"); break; }
                if (ends("tional")) { r("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { r("ence"); break; }
                if (ends("anci")) { r("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { r("ize"); break; }
                break;
            case 'l':
                if (ends("abli")) { r("able"); break; }
                if (ends("alli")) { r("al"); break; }
                if (ends("entli")) { r("ent"); break; }
                if (ends("eli")) { r("e"); break; }
                if (ends("ousli")) { r("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { r("ize"); break; }
                if (ends("ation")) { r("ate"); break; }
                if (ends("ator")) { r("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { r("al"); break; }
                if (ends("iveness")) { r("ive"); break; }
                if (ends("fulness")) { r("ful"); break; }
                if (ends("ousness")) { r("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { r("al"); break; }
                if (ends("iviti")) { r("ive"); break; }
                if (ends("biliti")) { r("ble"); break; }
                break;
            default:
                break;
        }
    }

    void step3() {
        if (k < 0) return;
        switch (at(k)) {
            case 'e':
                if (ends("icate")) { r("ic"); break; }
                if (ends("ative")) { r(""); break; }
                if (ends("alize")) { r("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { r("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { r("ic"); break; }
                if (ends("ful")) { r(""); break; }
                break;
            case 's':
                if (ends("ness")) { r(""); break; }
                break;
            default:
                break;
        }
    }

    void step4() {
        if (k < 1) return;
        bool matched = false;
        switch (at(k - 1)) {
            case 'a': matched = ends("al"); break;
            case 'c': matched = ends("ance") || ends("ence"); break;
            case 'e': matched = ends("er"); break;
            case 'i': matched = ends("ic"); break;
            case 'l': matched = ends("able") || ends("ible"); break;
            case 'n': matched = ends("ant") || ends("ement") || ends("ment") || ends("ent"); break;
            case 'o': matched = (ends("ion") && j >= 0 && (at(j) == 's' || at(j) == 't')) || ends("ou"); break;
            case 's': matched = ends("ism"); break;
            case 't': matched = ends("ate") || ends("iti"); break;
            case 'u': matched = ends("ous"); break;
            case 'v': matched = ends("ive"); break;
            case 'z': matched = ends("ize"); break;
            default: break;
        }
        if (matched && m() > 1) k = j;
    }

    void step5() {
        if (k < 0) return;
        j = k;
        if (at(k) == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (at(k) == 'l' && doublec(k) && m() > 1) --k;
    }
};

// ---------------------------------------------------------------------------
// Lemmatizer suffix machinery. Vowel logic follows the Porter convention
// (y counts as a vowel after a consonant).
// ---------------------------------------------------------------------------
bool lemma_vowel_at(const std::string& w, std::size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
    if (c == 'y') return i > 0 && !lemma_vowel_at(w, i - 1);
    return false;
}

bool has_vowel(const std::string& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (lemma_vowel_at(w, i)) return true;
    return false;
}

int lemma_measure(const std::string& w) {
    int n = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        bool v = lemma_vowel_at(w, i);
        if (!v && prev_vowel) ++n;
        prev_vowel = v;
    }
    return n;
}

bool ends_cvc(const std::string& w) {
    std::size_t n = w.size();
    if (n < 3) return false;
    if (lemma_vowel_at(w, n - 1) || !lemma_vowel_at(w, n - 2) || lemma_vowel_at(w, n - 3))
        return false;
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool suffix_is(const std::string& w, const char* s) {
    std::size_t len = std::strlen(s);
    return w.size() >= len && w.compare(w.size() - len, len, s) == 0;
}

// Base form of a stem left by stripping -ing or -ed: undouble a doubled final
// consonant, or restore the 'e' that regular e-final verbs drop before those
// suffixes. Terminal c/g/s/z/u/v (g not after n, s/z not doubled) marks a
// stem no bare English verb ends with, so the 'e' comes back regardless of
// length; otherwise only short stems ending consonant-vowel-consonant take it.
std::string restore_base(std::string stem) {
    std::size_t n = stem.size();
    char last = stem[n - 1];
    if (n >= 2 && last == stem[n - 2] && !lemma_vowel_at(stem, n - 1)) {
        if (last != 'l' && last != 's' && last != 'z') stem.pop_back();
        return stem;
    }
    bool wants_e = false;
    switch (last) {
        case 'c': case 'u': case 'v':
            wants_e = true;
            break;
        case 'g':
            wants_e = !suffix_is(stem, "ng");
            break;
        case 's':
            wants_e = !suffix_is(stem, "ss");
            break;
        case 'z':
            wants_e = !suffix_is(stem, "zz");
            break;
        default:
            wants_e = ends_cvc(stem) && lemma_measure(stem) == 1;
            break;
    }
    if (wants_e) stem.push_back('e');
    return stem;
}

}  // namespace

const char* to_string(PrepMode mode) {
    switch (mode) {
        case PrepMode::RawFiltered: return "raw-filtered";
        case PrepMode::Stemmed: return "stemmed";
        case PrepMode::Lemmatized: return "lemmatized";
    }
    return "lemmatized";
}

PrepMode prep_mode_from_string(const std::string& name) {
    if (name == "raw-filtered") return PrepMode::RawFiltered;
    if (name == "stemmed") return PrepMode::Stemmed;
    if (name == "lemmatized") return PrepMode::Lemmatized;
    throw std::runtime_error("unknown preprocessing mode '" + name + "'");
}

PrepConfig PrepConfig::defaults() {
    PrepConfig cfg;
    for (const char* const* p = detail::builtin_stopwords(); *p; ++p) cfg.stopwords.insert(*p);
    for (const char* const* p = detail::builtin_boilerplate(); *p; ++p) cfg.boilerplate.push_back(*p);
    for (const char* const* p = detail::builtin_lemma_exceptions(); *p; p += 2)
        cfg.lemma_exceptions.emplace(p[0], p[1]);
    return cfg;
}

CleanText clean_text(const std::string& raw, const PrepConfig& cfg) {
    std::string text = to_lower_ascii(raw);
    text = drop_url_runs(text);

    std::string kept;
    kept.reserve(text.size());
    for (char c : text) {
        if (is_ascii_digit(c)) continue;
        if (is_ascii_alnum(c) || is_space_byte(c)) kept.push_back(c);
    }
    text = collapse_whitespace(kept);
    text = strip_boilerplate(std::move(text), cfg.boilerplate);
    return CleanText{text};
}

std::vector<std::string> tokenize(const CleanText& cleaned) {
    std::vector<std::string> tokens;
    const std::string& s = cleaned.value;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ' ') {
            ++i;
            continue;
        }
        std::size_t end = s.find(' ', i);
        if (end == std::string::npos) end = s.size();
        tokens.push_back(s.substr(i, end - i));
        i = end;
    }
    return tokens;
}

std::vector<std::string> filter_tokens(std::vector<std::string> tokens, const PrepConfig& cfg) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (std::string& tok : tokens) {
        if (tok.size() < cfg.min_token_length) continue;
        if (cfg.stopwords.count(tok)) continue;
        kept.push_back(std::move(tok));
    }
    return kept;
}

std::string porter_stem(const std::string& word) {
    Porter porter;
    return porter.stem(word);
}

std::string lemmatize(const std::string& word,
                      const std::unordered_map<std::string, std::string>& exceptions) {
    auto it = exceptions.find(word);
    if (it != exceptions.end()) return it->second;

    const std::size_t n = word.size();
    if (n <= 3) return word;

    // Each rewrite strictly shortens the word, so the re-entry below terminates.
    // Re-running the cascade keeps the map idempotent: "filings" -> "filing" -> "file".
    std::string out = word;
    if (suffix_is(word, "ies") || suffix_is(word, "ied")) {
        if (n >= 5) out = word.substr(0, n - 3) + "y";
        else out = word.substr(0, n - 1);
    } else if (suffix_is(word, "ing")) {
        std::string stem = word.substr(0, n - 3);
        if (!has_vowel(stem)) return word;
        if (stem.size() < 3) out = stem + "e";
        else out = restore_base(std::move(stem));
    } else if (suffix_is(word, "eed")) {
        return word;
    } else if (suffix_is(word, "ed")) {
        std::string stem = word.substr(0, n - 2);
        if (!has_vowel(stem)) return word;
        if (stem.size() < 3) out = word.substr(0, n - 1);
        else out = restore_base(std::move(stem));
    } else if (suffix_is(word, "es")) {
        std::string stem = word.substr(0, n - 2);
        if (suffix_is(stem, "ss") || suffix_is(stem, "x") || suffix_is(stem, "z") ||
            suffix_is(stem, "ch") || suffix_is(stem, "sh") || suffix_is(stem, "o"))
            out = std::move(stem);
        else
            out = word.substr(0, n - 1);
    } else if (word.back() == 's' && !suffix_is(word, "ss") && !suffix_is(word, "us") &&
               !suffix_is(word, "is")) {
        out = word.substr(0, n - 1);
    }
    if (out == word) return word;
    return lemmatize(out, exceptions);
}

TokenSequence preprocess_document(const std::string& raw, const PrepConfig& cfg) {
    TokenSequence seq;
    seq.mode = cfg.mode;
    seq.tokens = filter_tokens(tokenize(clean_text(raw, cfg)), cfg);
    switch (cfg.mode) {
        case PrepMode::RawFiltered:
            break;
        case PrepMode::Stemmed:
            for (std::string& tok : seq.tokens) tok = porter_stem(tok);
            break;
        case PrepMode::Lemmatized:
            for (std::string& tok : seq.tokens) tok = lemmatize(tok, cfg.lemma_exceptions);
            break;
    }
    return seq;
}

namespace {

std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t");
        lines.push_back(line.substr(begin, end - begin + 1));
    }
    return lines;
}

}  // namespace

std::unordered_set<std::string> load_word_list(const std::string& path) {
    std::unordered_set<std::string> words;
    for (std::string& line : read_data_lines(path)) words.insert(std::move(line));
    return words;
}

std::vector<std::string> load_phrase_list(const std::string& path) {
    return read_data_lines(path);
}

std::unordered_map<std::string, std::string> load_lemma_exceptions(const std::string& path) {
    std::unordered_map<std::string, std::string> table;
    for (const std::string& line : read_data_lines(path)) {
        std::istringstream row(line);
        std::string form;
        std::string lemma;
        if (!(row >> form >> lemma))
            throw std::runtime_error("bad lemma exception line '" + line + "' in " + path);
        table[form] = lemma;
    }
    return table;
}

}  // namespace lexcite
