#!/usr/bin/env python3
"""Regenerates src/textprep_data.cpp from the lists under data/ so the
built-in tables and the data files stay identical."""
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent


def read_entries(path):
    out = []
    for line in (root / path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


stopwords = read_entries("data/stopwords_en.txt")
boilerplate = read_entries("data/boilerplate.txt")
lemma_pairs = []
seen = set()
for line in read_entries("data/lemma_exceptions.txt"):
    form, lemma = line.split()
    if form in seen:
        raise SystemExit(f"duplicate lemma exception form: {form}")
    seen.add(form)
    lemma_pairs.append((form, lemma))


def rows(items, per_row):
    for i in range(0, len(items), per_row):
        chunk = items[i : i + per_row]
        yield "    " + " ".join(f'"{x}",' for x in chunk)


lines = []
lines.append('#include "textprep_data.hpp"')
lines.append("")
lines.append("namespace lexcite::detail {")
lines.append("")
lines.append("namespace {")
lines.append("")
lines.append("const char* const kStopwords[] = {")
lines.extend(rows(stopwords, 8))
lines.append("    nullptr,")
lines.append("};")
lines.append("")
lines.append("const char* const kBoilerplate[] = {")
lines.extend(rows(boilerplate, 1))
lines.append("    nullptr,")
lines.append("};")
lines.append("")
lines.append("// form/lemma pairs, flattened.")
lines.append("const char* const kLemmaExceptions[] = {")
for form, lemma in lemma_pairs:
    lines.append(f'    "{form}", "{lemma}",')
lines.append("    nullptr,")
lines.append("};")
lines.append("")
lines.append("}  // namespace")
lines.append("")
lines.append("const char* const* builtin_stopwords() { return kStopwords; }")
lines.append("const char* const* builtin_boilerplate() { return kBoilerplate; }")
lines.append("const char* const* builtin_lemma_exceptions() { return kLemmaExceptions; }")
lines.append("")
lines.append("}  // namespace lexcite::detail")
lines.append("")
(root / "src/textprep_data.cpp").write_text("\n".join(lines))
print(f"stopwords={len(stopwords)} boilerplate={len(boilerplate)} lemma_pairs={len(lemma_pairs)}")
