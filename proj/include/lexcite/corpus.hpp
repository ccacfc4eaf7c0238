#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexcite {

// One case-law record.
struct Document {
    std::string case_id;
    std::string outcome;  // raw citation-treatment label text
    std::string title;
    std::string body;
};

struct DocumentSet {
    std::vector<Document> docs;
    std::size_t dropped_rows = 0;  // rows discarded for empty body/outcome

    std::size_t size() const { return docs.size(); }
    bool empty() const { return docs.empty(); }
};

// Distinct outcome labels in ascending lexicographic order, mapped to
// contiguous class indices [0, K). Independent of document order.
struct LabelMap {
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> index;

    int size() const { return static_cast<int>(labels.size()); }
    int at(const std::string& label) const;  // throws on unknown label
};

struct SplitSpec {
    double train_fraction = 0.75;
    double validation_fraction_of_train = 0.10;
    std::uint64_t seed = 42;
};

// Reads a UTF-8 CSV with header fields case_id, case_outcome, case_title,
// case_text (case-insensitive, any column order, extra columns ignored).
// Quoted fields may contain commas, quotes and newlines. Rows with an empty
// body or outcome are dropped and counted; structural problems throw with
// the offending row number.
DocumentSet load_corpus(const std::string& path);

LabelMap encode_labels(const DocumentSet& set);

// Seeded stratified partition. Per class, floor((1-train_fraction)*n) docs go
// to the test side; rounding leftovers stay in train. Output sets preserve
// the input document order.
std::pair<DocumentSet, DocumentSet> stratified_split(const DocumentSet& set, const SplitSpec& spec);

// Stratified carve of the validation set out of the training split, same
// rounding rule. Uses a seed stream distinct from stratified_split so the
// two shuffles are independent.
std::pair<DocumentSet, DocumentSet> carve_validation(const DocumentSet& train, const SplitSpec& spec);

// Split manifests: one case_id per line.
void write_manifest(const DocumentSet& set, const std::string& path);
std::vector<std::string> read_manifest(const std::string& path);

// Subset of `set` in manifest order; throws if an id is missing.
DocumentSet select_by_ids(const DocumentSet& set, const std::vector<std::string>& ids);

}  // namespace lexcite
