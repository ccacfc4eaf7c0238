#pragma once

#include <cstddef>

namespace lexcite::detail {

// Null-terminated builtin tables mirroring the files under data/.
const char* const* builtin_stopwords();
const char* const* builtin_boilerplate();
// Flat (form, lemma) pairs, null-terminated at an even index.
const char* const* builtin_lemma_exceptions();

}  // namespace lexcite::detail
