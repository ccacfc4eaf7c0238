#include "lexcite/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lexcite/rng.hpp"

namespace lexcite {

namespace {

std::string lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

// RFC-4180 style parser: quoted fields keep embedded commas, quotes ("") and
// newlines; CRLF is normalized to LF. Returns one vector per record.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    std::size_t i = 0;
    // Skip a UTF-8 BOM if present.
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        i = 3;

    for (; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                field += '\n';
                ++i;
                ++line;
            } else {
                field += c;
                if (c == '\n') ++line;
            }
        } else {
            if (c == '"') {
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    throw std::runtime_error("malformed quote at line " + std::to_string(line));
                }
            } else if (c == ',') {
                end_field();
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                ++line;
            } else {
                field += c;
                field_started = true;
            }
        }
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted field at end of file");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

// Per-class index groups keyed by label text, classes visited in
// lexicographic order so the shuffle stream is reproducible.
std::map<std::string, std::vector<std::size_t>> group_by_label(const DocumentSet& set) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < set.docs.size(); ++i) groups[set.docs[i].outcome].push_back(i);
    return groups;
}

// Common core of stratified_split / carve_validation: moves
// floor(fraction*n) docs per class to the second output.
std::pair<DocumentSet, DocumentSet> stratified_carve(const DocumentSet& set, double fraction,
                                                     std::uint64_t seed,
                                                     std::size_t min_left_per_class) {
    auto groups = group_by_label(set);
    Rng rng(seed);
    std::vector<char> in_second(set.docs.size(), 0);
    for (auto& [label, indices] : groups) {
        std::size_t n = indices.size();
        std::size_t take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
        if (n - take < min_left_per_class)
            throw std::runtime_error("class '" + label + "' has too few documents (" +
                                     std::to_string(n) + ") for fraction " + std::to_string(fraction));
        shuffle(indices, rng);
        for (std::size_t j = 0; j < take; ++j) in_second[indices[j]] = 1;
    }
    DocumentSet first, second;
    for (std::size_t i = 0; i < set.docs.size(); ++i)
        (in_second[i] ? second : first).docs.push_back(set.docs[i]);
    return {std::move(first), std::move(second)};
}

}  // namespace

int LabelMap::at(const std::string& label) const {
    auto it = index.find(label);
    if (it == index.end()) throw std::runtime_error("unknown label '" + label + "'");
    return it->second;
}

DocumentSet load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str());
    if (rows.empty()) throw std::runtime_error("empty corpus file: " + path);

    const std::vector<std::string> wanted = {"case_id", "case_outcome", "case_title", "case_text"};
    std::vector<int> col(wanted.size(), -1);
    const auto& header = rows[0];
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string name = lower_ascii(header[c]);
        for (std::size_t w = 0; w < wanted.size(); ++w)
            if (name == wanted[w]) col[w] = static_cast<int>(c);
    }
    for (std::size_t w = 0; w < wanted.size(); ++w)
        if (col[w] < 0)
            throw std::runtime_error("corpus header is missing field '" + wanted[w] + "'");

    DocumentSet set;
    std::set<std::string> seen_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;  // blank trailing line
        if (row.size() < header.size())
            throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                                     std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        Document d;
        d.case_id = row[static_cast<std::size_t>(col[0])];
        d.outcome = row[static_cast<std::size_t>(col[1])];
        d.title = row[static_cast<std::size_t>(col[2])];
        d.body = row[static_cast<std::size_t>(col[3])];
        if (d.body.empty() || d.outcome.empty()) {
            ++set.dropped_rows;
            continue;
        }
        if (d.case_id.empty())
            throw std::runtime_error("row " + std::to_string(r + 1) + " has an empty case_id");
        if (!seen_ids.insert(d.case_id).second)
            throw std::runtime_error("duplicate case_id '" + d.case_id + "' at row " +
                                     std::to_string(r + 1));
        set.docs.push_back(std::move(d));
    }
    return set;
}

LabelMap encode_labels(const DocumentSet& set) {
    if (set.empty()) throw std::runtime_error("cannot encode labels of an empty corpus");
    std::set<std::string> distinct;
    for (const auto& d : set.docs) distinct.insert(d.outcome);
    if (distinct.size() < 2)
        throw std::runtime_error("corpus has fewer than 2 distinct labels");
    LabelMap map;
    for (const auto& label : distinct) {
        map.index.emplace(label, static_cast<int>(map.labels.size()));
        map.labels.push_back(label);
    }
    return map;
}

std::pair<DocumentSet, DocumentSet> stratified_split(const DocumentSet& set, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::runtime_error("train_fraction must be in (0,1)");
    for (auto& [label, indices] : group_by_label(set))
        if (indices.size() < 2)
            throw std::runtime_error("class '" + label + "' has fewer than 2 documents");
    return stratified_carve(set, 1.0 - spec.train_fraction, spec.seed, 1);
}

std::pair<DocumentSet, DocumentSet> carve_validation(const DocumentSet& train, const SplitSpec& spec) {
    double f = spec.validation_fraction_of_train;
    if (!(f > 0.0 && f < 1.0))
        throw std::runtime_error("validation_fraction_of_train must be in (0,1) to carve a validation set");
    return stratified_carve(train, f, ~spec.seed, 1);
}

void write_manifest(const DocumentSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    for (const auto& d : set.docs) out << d.case_id << '\n';
}

std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

DocumentSet select_by_ids(const DocumentSet& set, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> where;
    where.reserve(set.docs.size());
    for (std::size_t i = 0; i < set.docs.size(); ++i) where.emplace(set.docs[i].case_id, i);
    DocumentSet out;
    for (const auto& id : ids) {
        auto it = where.find(id);
        if (it == where.end()) throw std::runtime_error("manifest id not in corpus: " + id);
        out.docs.push_back(set.docs[it->second]);
    }
    return out;
}

}  // namespace lexcite
