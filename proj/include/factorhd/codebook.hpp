#pragma once

// Class-subclass hierarchy: F class labels, a tree of item vectors under each
// class (uniform branching per level) and one NULL vector shared by all
// classes. Everything is drawn independently from seed-derived streams.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "factorhd/hypervector.hpp"
#include "factorhd/rng.hpp"

namespace factorhd {

// Addresses a node of one class tree. An empty `levels` addresses the class
// label; levels[k] is the child index chosen at subclass level k + 1.
struct ItemPath {
  std::size_t class_index = 0;
  std::vector<std::size_t> levels;
  bool is_null = false;

  static ItemPath null_item() { return ItemPath{0, {}, true}; }

  [[nodiscard]] std::size_t depth() const noexcept { return levels.size(); }

  friend bool operator==(const ItemPath& a, const ItemPath& b) {
    if (a.is_null || b.is_null) {
      return a.is_null == b.is_null;
    }
    return a.class_index == b.class_index && a.levels == b.levels;
  }
};

std::string to_string(const ItemPath& path);

class Hierarchy {
 public:
  static constexpr char kMagic[4] = {'F', 'H', 'D', '1'};
  static constexpr std::uint8_t kFormatVersion = 1;

  // An empty branching produces a label-only hierarchy.
  static Hierarchy generate(std::size_t dim, std::size_t num_classes,
                            std::vector<std::size_t> branching, Seed seed);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t levels() const noexcept { return branching_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& branching() const noexcept { return branching_; }
  [[nodiscard]] Seed seed() const noexcept { return seed_; }

  [[nodiscard]] const Hypervector& label(std::size_t class_index) const;
  [[nodiscard]] std::span<const Hypervector> labels() const noexcept { return labels_; }
  [[nodiscard]] const Hypervector& null_hv() const noexcept { return null_; }

  // Number of nodes per class at subclass level `depth` (1-based).
  [[nodiscard]] std::size_t nodes_at(std::size_t depth) const;

  // All nodes of one class at one level, laid out so that the children of
  // the node with flat index p occupy [p * M, (p + 1) * M).
  [[nodiscard]] std::span<const Hypervector> level_items(std::size_t class_index,
                                                         std::size_t depth) const;

  // Flat index at depth parent.size() + 1 of the first child of `parent`
  // (the empty parent denotes the class root).
  [[nodiscard]] std::size_t first_child_index(std::span<const std::size_t> parent) const;

  // Children of a node; the class root's children are the level-1 items.
  [[nodiscard]] std::span<const Hypervector> children(std::size_t class_index,
                                                      std::span<const std::size_t> parent) const;

  // NULL -> null_hv, empty path -> label, otherwise the addressed item.
  // Throws Error(path_not_found) on any out-of-range index.
  [[nodiscard]] const Hypervector& lookup(const ItemPath& path) const;

  [[nodiscard]] std::size_t total_vectors() const noexcept;

  void save(std::ostream& out) const;
  static Hierarchy load(std::istream& in);
  void save_file(const std::string& path) const;
  static Hierarchy load_file(const std::string& path);

  friend bool operator==(const Hierarchy& a, const Hierarchy& b);

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> branching_;
  Seed seed_{};
  std::vector<Hypervector> labels_;
  // items_[class][depth - 1] holds nodes_at(depth) vectors in flat order.
  std::vector<std::vector<std::vector<Hypervector>>> items_;
  Hypervector null_;
};

}  // namespace factorhd
