#include "factorhd/codebook.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "factorhd/error.hpp"

namespace factorhd {

namespace {

// Stream ids for seed derivation. Classes use 1..F; NULL uses its own id.
constexpr std::uint64_t kNullStream = 0xFFFF'FFFF'0000'0001ULL;
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 28;

void put_le(std::ostream& out, std::uint64_t x, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    out.put(static_cast<char>((x >> (8 * i)) & 0xFFU));
  }
}

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t x = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw Error(ErrorCode::corrupt_codebook, "truncated header");
    }
    x |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return x;
}

}  // namespace

std::string to_string(const ItemPath& path) {
  if (path.is_null) {
    return "NULL";
  }
  std::string s = std::to_string(path.class_index);
  for (auto i : path.levels) {
    s += '.';
    s += std::to_string(i);
  }
  return s;
}

Hierarchy Hierarchy::generate(std::size_t dim, std::size_t num_classes,
                              std::vector<std::size_t> branching, Seed seed) {
  if (dim == 0) {
    throw Error(ErrorCode::invalid_dimension, "dimension must be at least 1");
  }
  if (num_classes == 0) {
    throw Error(ErrorCode::invalid_shape, "at least one class is required");
  }
  for (auto m : branching) {
    if (m == 0) {
      throw Error(ErrorCode::invalid_shape, "every branching entry must be at least 1");
    }
  }

  Hierarchy h;
  h.dim_ = dim;
  h.branching_ = std::move(branching);
  h.seed_ = seed;
  h.labels_.reserve(num_classes);
  h.items_.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const Seed class_seed = derive(seed, c + 1);
    RandomStream label_stream(derive(class_seed, 0));
    h.labels_.push_back(random_hv(dim, label_stream));
    h.items_[c].resize(h.levels());
    for (std::size_t depth = 1; depth <= h.levels(); ++depth) {
      RandomStream stream(derive(class_seed, depth));
      auto& level = h.items_[c][depth - 1];
      const std::size_t n = h.nodes_at(depth);
      level.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        level.push_back(random_hv(dim, stream));
      }
    }
  }
  RandomStream null_stream(derive(seed, kNullStream));
  h.null_ = random_hv(dim, null_stream);
  return h;
}

const Hypervector& Hierarchy::label(std::size_t class_index) const {
  if (class_index >= labels_.size()) {
    throw Error(ErrorCode::path_not_found, "class " + std::to_string(class_index));
  }
  return labels_[class_index];
}

std::size_t Hierarchy::nodes_at(std::size_t depth) const {
  if (depth > levels()) {
    throw Error(ErrorCode::path_not_found, "level " + std::to_string(depth));
  }
  std::size_t n = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    n *= branching_[k];
  }
  return n;
}

std::span<const Hypervector> Hierarchy::level_items(std::size_t class_index,
                                                    std::size_t depth) const {
  if (class_index >= labels_.size() || depth == 0 || depth > levels()) {
    throw Error(ErrorCode::path_not_found,
                "class " + std::to_string(class_index) + " level " + std::to_string(depth));
  }
  return items_[class_index][depth - 1];
}

std::size_t Hierarchy::first_child_index(std::span<const std::size_t> parent) const {
  if (parent.size() >= levels()) {
    throw Error(ErrorCode::path_not_found, "node at the deepest level has no children");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < parent.size(); ++k) {
    if (parent[k] >= branching_[k]) {
      throw Error(ErrorCode::path_not_found, "index " + std::to_string(parent[k]) +
                                                 " at level " + std::to_string(k + 1));
    }
    flat = flat * branching_[k] + parent[k];
  }
  return flat * branching_[parent.size()];
}

std::span<const Hypervector> Hierarchy::children(std::size_t class_index,
                                                 std::span<const std::size_t> parent) const {
  const std::size_t first = first_child_index(parent);
  return level_items(class_index, parent.size() + 1).subspan(first, branching_[parent.size()]);
}

const Hypervector& Hierarchy::lookup(const ItemPath& path) const {
  if (path.is_null) {
    return null_;
  }
  if (path.levels.empty()) {
    return label(path.class_index);
  }
  if (path.class_index >= labels_.size() || path.levels.size() > levels()) {
    throw Error(ErrorCode::path_not_found, to_string(path));
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < path.levels.size(); ++k) {
    if (path.levels[k] >= branching_[k]) {
      throw Error(ErrorCode::path_not_found, to_string(path));
    }
    flat = flat * branching_[k] + path.levels[k];
  }
  return items_[path.class_index][path.levels.size() - 1][flat];
}

std::size_t Hierarchy::total_vectors() const noexcept {
  std::size_t per_class = 1;
  std::size_t n = 1;
  for (auto m : branching_) {
    n *= m;
    per_class += n;
  }
  return per_class * labels_.size() + 1;
}

void Hierarchy::save(std::ostream& out) const {
  out.write(kMagic, 4);
  out.put(static_cast<char>(kFormatVersion));
  put_le(out, dim_, 4);
  put_le(out, labels_.size(), 4);
  put_le(out, branching_.size(), 4);
  for (auto m : branching_) {
    put_le(out, m, 4);
  }
  put_le(out, seed_.value, 8);

  // Depth-first pre-order per class: label, then each item followed by its subtree.
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    write_hv(out, labels_[c]);
    auto visit = [&](auto&& self, std::size_t depth, std::size_t first) -> void {
      for (std::size_t k = 0; k < branching_[depth - 1]; ++k) {
        const std::size_t flat = first + k;
        write_hv(out, items_[c][depth - 1][flat]);
        if (depth < levels()) {
          self(self, depth + 1, flat * branching_[depth]);
        }
      }
    };
    if (levels() > 0) {
      visit(visit, 1, 0);
    }
  }
  write_hv(out, null_);
}

Hierarchy Hierarchy::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::corrupt_codebook, "bad magic");
  }
  const auto version = get_le(in, 1);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::corrupt_codebook, "unsupported format version " + std::to_string(version));
  }
  Hierarchy h;
  h.dim_ = get_le(in, 4);
  const std::size_t num_classes = get_le(in, 4);
  const std::size_t levels = get_le(in, 4);
  if (h.dim_ == 0 || h.dim_ > kMaxDim || num_classes == 0 || levels > 64) {
    throw Error(ErrorCode::corrupt_codebook, "implausible header");
  }
  std::uint64_t per_class = 1;
  std::uint64_t width = 1;
  for (std::size_t k = 0; k < levels; ++k) {
    const std::size_t m = get_le(in, 4);
    if (m == 0) {
      throw Error(ErrorCode::corrupt_codebook, "zero branching");
    }
    h.branching_.push_back(m);
    width *= m;
    per_class += width;
    if (per_class * num_classes * h.dim_ > (std::uint64_t{1} << 34)) {
      throw Error(ErrorCode::corrupt_codebook, "implausible hierarchy size");
    }
  }
  h.seed_ = Seed{get_le(in, 8)};

  auto read_item = [&]() {
    Hypervector v = read_hv(in);
    if (v.dim() != h.dim_ || v.domain() != Domain::bipolar) {
      throw Error(ErrorCode::corrupt_codebook, "stored vector is not bipolar of the header dimension");
    }
    return v;
  };

  h.items_.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    h.labels_.push_back(read_item());
    h.items_[c].resize(levels);
    for (std::size_t depth = 1; depth <= levels; ++depth) {
      h.items_[c][depth - 1].resize(h.nodes_at(depth));
    }
    auto visit = [&](auto&& self, std::size_t depth, std::size_t first) -> void {
      for (std::size_t k = 0; k < h.branching_[depth - 1]; ++k) {
        const std::size_t flat = first + k;
        h.items_[c][depth - 1][flat] = read_item();
        if (depth < levels) {
          self(self, depth + 1, flat * h.branching_[depth]);
        }
      }
    };
    if (levels > 0) {
      visit(visit, 1, 0);
    }
  }
  h.null_ = read_item();
  return h;
}

void Hierarchy::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::invalid_argument, "cannot open " + path + " for writing");
  }
  save(out);
}

Hierarchy Hierarchy::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::invalid_argument, "cannot open " + path);
  }
  return load(in);
}

bool operator==(const Hierarchy& a, const Hierarchy& b) {
  return a.dim_ == b.dim_ && a.branching_ == b.branching_ && a.seed_ == b.seed_ &&
         a.labels_ == b.labels_ && a.items_ == b.items_ && a.null_ == b.null_;
}

}  // namespace factorhd
