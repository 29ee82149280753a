#pragma once

// Signatures, canonical decompositions, the lift order and cores.

#include <cstddef>
#include <functional>
#include <set>
#include <vector>

#include "dpp/model.hpp"

namespace dpp {

struct Decomposition {
    std::vector<Action> letters;              // b_0 .. b_{k-1}
    std::vector<std::vector<Action>> blocks;  // k + 1 blocks; block i follows b_{i-1}, block 0 is empty

    std::vector<Action> recompose() const;
};

/// First occurrences of body actions; the head is kept.
ExtWord sig(const ExtWord& w);
std::vector<Action> sig(const std::vector<Action>& body);

Decomposition canonical_decomposition(const std::vector<Action>& body);

bool is_subword(const std::vector<Action>& small, const std::vector<Action>& big);

/// a precedes-or-equals b: same head, same signature, blockwise scattered subwords.
bool preceq(const ExtWord& a, const ExtWord& b);

/// The minimal elements under preceq, sorted.
std::set<ExtWord> core_of(const std::set<ExtWord>& words);

/// All beta with beta preceq w, ordered by total length and then lexicographically.
/// Throws ResourceExceeded when more than cap candidates would be produced.
std::vector<ExtWord> minimal_candidates(const ExtWord& w, std::size_t cap = 200'000);

/// All prefixes (including the bare head) of every word.
std::set<ExtWord> prefix_closure(const std::set<ExtWord>& words);

/// Head plus each distinct output paired with the head; throws Error on non-output actions.
std::set<ExtWord> out_of(const ExtWord& w);

}  // namespace dpp
