#pragma once

// Bundling-binding-bundling encoder.
//
//   clause_i = sign(LABEL_i + item_1 + ... + item_k)   (NULL class: LABEL_i + NULL)
//   object   = clause_0 * clause_1 * ... * clause_{F-1}
//   scene    = object_1 + object_2 + ...               (kept in Z^D)
//
// Clipping applies inside a clause only; objects are summed without clipping.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "factorhd/codebook.hpp"
#include "factorhd/hypervector.hpp"

namespace factorhd {

// One entry per class. assignments[i] is either ItemPath::null_item() or a
// path with class_index == i and depth in [1, L]; the clause then holds the
// item at every level along the path.
struct ObjectDescription {
  std::vector<ItemPath> assignments;

  friend bool operator==(const ObjectDescription&, const ObjectDescription&) = default;
};

std::string to_string(const ObjectDescription& obj);

// Throws Error(path_not_found) if obj does not fit h.
void validate(const Hierarchy& h, const ObjectDescription& obj);

// sign(LABEL_c + items along the path), or sign(LABEL_c + NULL).
Hypervector encode_clause(const Hierarchy& h, std::size_t class_index, const ItemPath& assignment);

Hypervector encode_object(const Hierarchy& h, const ObjectDescription& obj);

struct EncodedTarget {
  Hypervector hv;
  std::optional<std::size_t> num_objects_hint;
  Seed hierarchy_seed{};
};

// Unclipped sum of encode_object over objs. The object count is attached as
// a hint only when requested; the factorizer never needs it.
EncodedTarget encode_scene(const Hierarchy& h, std::span<const ObjectDescription> objs,
                           bool attach_hint = false);

}  // namespace factorhd
