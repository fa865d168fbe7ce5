#include "factorhd/encoder.hpp"

#include "factorhd/error.hpp"

namespace factorhd {

std::string to_string(const ObjectDescription& obj) {
  std::string s = "{";
  for (std::size_t i = 0; i < obj.assignments.size(); ++i) {
    if (i > 0) {
      s += ", ";
    }
    s += to_string(obj.assignments[i]);
  }
  return s + "}";
}

void validate(const Hierarchy& h, const ObjectDescription& obj) {
  if (obj.assignments.size() != h.num_classes()) {
    throw Error(ErrorCode::path_not_found,
                "object has " + std::to_string(obj.assignments.size()) + " assignments for " +
                    std::to_string(h.num_classes()) + " classes");
  }
  for (std::size_t c = 0; c < obj.assignments.size(); ++c) {
    const auto& a = obj.assignments[c];
    if (a.is_null) {
      continue;
    }
    if (a.class_index != c || a.depth() == 0) {
      throw Error(ErrorCode::path_not_found, "assignment " + to_string(a) + " for class " +
                                                 std::to_string(c));
    }
    (void)h.lookup(a);
  }
}

Hypervector encode_clause(const Hierarchy& h, std::size_t class_index,
                          const ItemPath& assignment) {
  const std::size_t dim = h.dim();
  std::vector<std::int32_t> acc(dim, 0);
  auto add = [&](const Hypervector& v) {
    auto s = v.narrow();
    for (std::size_t i = 0; i < dim; ++i) {
      acc[i] += s[i];
    }
  };
  add(h.label(class_index));
  if (assignment.is_null) {
    add(h.null_hv());
  } else {
    if (assignment.class_index != class_index || assignment.depth() == 0) {
      throw Error(ErrorCode::path_not_found, to_string(assignment));
    }
    ItemPath prefix{class_index, {}, false};
    for (auto idx : assignment.levels) {
      prefix.levels.push_back(idx);
      add(h.lookup(prefix));
    }
  }
  std::vector<std::int8_t> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = static_cast<std::int8_t>((acc[i] > 0) - (acc[i] < 0));
  }
  return Hypervector::ternary(std::move(out));
}

Hypervector encode_object(const Hierarchy& h, const ObjectDescription& obj) {
  validate(h, obj);
  Hypervector out = encode_clause(h, 0, obj.assignments[0]);
  for (std::size_t c = 1; c < h.num_classes(); ++c) {
    out = bind(out, encode_clause(h, c, obj.assignments[c]));
  }
  return out;
}

EncodedTarget encode_scene(const Hierarchy& h, std::span<const ObjectDescription> objs,
                           bool attach_hint) {
  if (objs.empty()) {
    throw Error(ErrorCode::empty_input, "scene without objects");
  }
  EncodedTarget target;
  target.hierarchy_seed = h.seed();
  if (attach_hint) {
    target.num_objects_hint = objs.size();
  }
  if (objs.size() == 1) {
    target.hv = encode_object(h, objs.front());
    return target;
  }
  std::vector<std::int32_t> acc(h.dim(), 0);
  for (const auto& obj : objs) {
    const Hypervector v = encode_object(h, obj);
    auto s = v.narrow();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += s[i];
    }
  }
  target.hv = Hypervector::integer(std::move(acc));
  return target;
}

}  // namespace factorhd
