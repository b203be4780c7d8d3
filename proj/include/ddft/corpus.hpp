#pragma once

#include <vector>

#include "ddft/compression.hpp"

namespace ddft {

// Built-in reference corpus: eight concepts across distinct knowledge
// domains, each a short factual text segmented on load. Used by the
// simulate pipeline when no concepts directory is given; the same texts
// ship as editable files under data/concepts/.
std::vector<ReferenceText> builtin_concepts();

}  // namespace ddft
