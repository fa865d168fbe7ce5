#pragma once

// Factorization of encoded targets back into per-class item paths.
//
// Label elimination: binding the target with every label except LABEL_i
// cancels the other clauses up to a mask, leaving a vector that is similar
// to the items of class i only. Single-object targets are then decoded by
// argmax per level (descending from level 1); multi-object targets keep every
// item above a threshold, verify cross-class combinations against the
// residual, and subtract each fully decoded object before scanning again.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "factorhd/codebook.hpp"
#include "factorhd/encoder.hpp"
#include "factorhd/hypervector.hpp"

namespace factorhd {

// 0.001 * (104 + 2N - 15F - 0.001D - log10(M)), clamped below at 0.005.
double auto_threshold(std::size_t num_objects, std::size_t num_classes, std::size_t dim,
                      std::size_t items_per_class);

inline constexpr double kMinAutoThreshold = 0.005;
inline constexpr std::size_t kDefaultAssumedObjects = 2;

struct ThresholdConfig {
  enum class Mode { fixed, automatic };

  Mode mode = Mode::automatic;
  double value = 0.0;
  std::size_t assumed_objects = kDefaultAssumedObjects;

  static ThresholdConfig fixed(double th);
  static ThresholdConfig automatic(std::size_t assumed_objects = kDefaultAssumedObjects);

  // Fixed mode returns the value. Automatic mode evaluates auto_threshold
  // with the hint (when present) or assumed_objects as N, and with the
  // hierarchy's F, D and largest branching factor as M.
  [[nodiscard]] double resolve(const Hierarchy& h,
                               std::optional<std::size_t> num_objects_hint = std::nullopt) const;
  [[nodiscard]] double resolve(std::size_t num_classes, std::size_t dim, std::size_t max_branching,
                               std::optional<std::size_t> num_objects_hint = std::nullopt) const;
};

struct Counters {
  std::uint64_t similarity_measurements = 0;
  std::uint64_t combinations_tested = 0;
  std::uint64_t loop_iterations = 0;

  Counters& operator+=(const Counters& o) {
    similarity_measurements += o.similarity_measurements;
    combinations_tested += o.combinations_tested;
    loop_iterations += o.loop_iterations;
    return *this;
  }
  friend bool operator==(const Counters&, const Counters&) = default;
};

struct Candidate {
  ItemPath path;
  double score = 0.0;
};

// bind(target, LABEL_j for every j != selected_class).
Hypervector unbind_labels(const Hypervector& target, const Hierarchy& h,
                          std::size_t selected_class);

// Scores `unbound` against every child of `parent` (plus NULL when parent is
// the class root) and returns those scoring above th, best first. Ties go to
// the lower item index; NULL ranks after items. One similarity measurement is
// tallied per scored vector.
std::vector<Candidate> candidate_items(const Hypervector& unbound, const Hierarchy& h,
                                       std::size_t class_index,
                                       std::span<const std::size_t> parent, double th,
                                       Counters& counters);

// Full scored list (no threshold), same ordering rules as candidate_items.
std::vector<Candidate> score_children(const Hypervector& unbound, const Hierarchy& h,
                                      std::size_t class_index,
                                      std::span<const std::size_t> parent, Counters& counters);

struct ClassDecode {
  std::size_t class_index = 0;
  ItemPath path;
};

struct SingleResult {
  std::vector<ClassDecode> classes;
  Counters counters;
};

// Single-object decode of the selected classes only. NULL competes at level 1;
// a NULL winner ends the descent for that class.
SingleResult factorize_single(const Hypervector& target, const Hierarchy& h,
                              std::span<const std::size_t> selected_classes);
SingleResult factorize_single(const Hypervector& target, const Hierarchy& h);

struct DecodedObject {
  ObjectDescription object;
  double confidence = 0.0;
  std::size_t iteration = 0;
};

struct FactorizationResult {
  std::vector<DecodedObject> objects;
  double residual_norm = 0.0;
  Counters counters;
  bool truncated = false;
  double threshold = 0.0;
};

// How combinations that clear th within one scan are turned into objects.
//   rescan:     only the best full-depth combination is excluded, then the
//               residual is scanned again.
//   best_first: all of them, highest residual similarity first; after each
//               exclusion the rest are re-checked against the new residual.
//   in_order:   enumeration order (classes lexicographic, candidates by
//               descending item score); every accepted one is excluded.
enum class Acceptance { rescan, best_first, in_order };

const char* to_string(Acceptance acceptance) noexcept;

struct FactorizerOptions {
  ThresholdConfig threshold;
  Acceptance acceptance = Acceptance::rescan;
  std::size_t max_objects = 16;
  // Candidate lists are trimmed (largest list first, weakest entry first)
  // until the number of cross-class combinations fits this bound.
  std::size_t max_combinations = 1U << 16;
};

FactorizationResult factorize_multi(const EncodedTarget& target, const Hierarchy& h,
                                    const FactorizerOptions& options);
FactorizationResult factorize_multi(const EncodedTarget& target, const Hierarchy& h,
                                    const ThresholdConfig& threshold, std::size_t max_objects = 16);

// residual - encode_object(h, obj), over the integers.
Hypervector reconstruct_and_exclude(const Hypervector& residual, const Hierarchy& h,
                                    const ObjectDescription& obj);

}  // namespace factorhd
