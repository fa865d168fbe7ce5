#include "factorhd/factorizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "factorhd/error.hpp"

namespace factorhd {

double auto_threshold(std::size_t num_objects, std::size_t num_classes, std::size_t dim,
                      std::size_t items_per_class) {
  if (num_objects == 0 || num_classes == 0 || dim == 0 || items_per_class == 0) {
    throw Error(ErrorCode::invalid_argument, "auto_threshold arguments must be >= 1");
  }
  const double th = 0.001 * (104.0 + 2.0 * static_cast<double>(num_objects) -
                             15.0 * static_cast<double>(num_classes) -
                             0.001 * static_cast<double>(dim) -
                             std::log10(static_cast<double>(items_per_class)));
  return std::max(th, kMinAutoThreshold);
}

ThresholdConfig ThresholdConfig::fixed(double th) {
  if (!(th > 0.0 && th < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fixed threshold must lie in (0, 1)");
  }
  ThresholdConfig cfg;
  cfg.mode = Mode::fixed;
  cfg.value = th;
  return cfg;
}

ThresholdConfig ThresholdConfig::automatic(std::size_t assumed_objects) {
  if (assumed_objects == 0) {
    throw Error(ErrorCode::invalid_argument, "assumed object count must be >= 1");
  }
  ThresholdConfig cfg;
  cfg.mode = Mode::automatic;
  cfg.assumed_objects = assumed_objects;
  return cfg;
}

double ThresholdConfig::resolve(const Hierarchy& h,
                                std::optional<std::size_t> num_objects_hint) const {
  std::size_t m = 1;
  for (auto b : h.branching()) {
    m = std::max(m, b);
  }
  return resolve(h.num_classes(), h.dim(), m, num_objects_hint);
}

double ThresholdConfig::resolve(std::size_t num_classes, std::size_t dim,
                                std::size_t max_branching,
                                std::optional<std::size_t> num_objects_hint) const {
  if (mode == Mode::fixed) {
    return value;
  }
  return auto_threshold(num_objects_hint.value_or(assumed_objects), num_classes, dim,
                        std::max<std::size_t>(max_branching, 1));
}

Hypervector unbind_labels(const Hypervector& target, const Hierarchy& h,
                          std::size_t selected_class) {
  if (selected_class >= h.num_classes()) {
    throw Error(ErrorCode::invalid_argument,
                "selected class " + std::to_string(selected_class) + " out of range");
  }
  if (target.dim() != h.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "target does not match hierarchy dimension");
  }
  if (h.num_classes() == 1) {
    return target;
  }
  // Product of the other labels first, so the target is touched once.
  std::vector<std::int8_t> key(h.dim(), 1);
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    if (c == selected_class) {
      continue;
    }
    auto s = h.label(c).narrow();
    for (std::size_t i = 0; i < key.size(); ++i) {
      key[i] = static_cast<std::int8_t>(key[i] * s[i]);
    }
  }
  return bind(target, Hypervector::bipolar(std::move(key)));
}

std::vector<Candidate> score_children(const Hypervector& unbound, const Hierarchy& h,
                                      std::size_t class_index,
                                      std::span<const std::size_t> parent, Counters& counters) {
  const auto items = h.children(class_index, parent);
  std::vector<Candidate> out;
  out.reserve(items.size() + 1);
  const double inv_dim = 1.0 / static_cast<double>(h.dim());
  for (std::size_t k = 0; k < items.size(); ++k) {
    ItemPath path{class_index, std::vector<std::size_t>(parent.begin(), parent.end()), false};
    path.levels.push_back(k);
    out.push_back({std::move(path), static_cast<double>(dot(unbound, items[k])) * inv_dim});
  }
  counters.similarity_measurements += items.size();
  if (parent.empty()) {
    out.push_back({ItemPath::null_item(),
                   static_cast<double>(dot(unbound, h.null_hv())) * inv_dim});
    counters.similarity_measurements += 1;
  }
  // Stable sort keeps index order (NULL last) among equal scores.
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  return out;
}

std::vector<Candidate> candidate_items(const Hypervector& unbound, const Hierarchy& h,
                                       std::size_t class_index,
                                       std::span<const std::size_t> parent, double th,
                                       Counters& counters) {
  auto scored = score_children(unbound, h, class_index, parent, counters);
  auto cut = std::find_if(scored.begin(), scored.end(),
                          [th](const Candidate& c) { return !(c.score > th); });
  scored.erase(cut, scored.end());
  return scored;
}

SingleResult factorize_single(const Hypervector& target, const Hierarchy& h,
                              std::span<const std::size_t> selected_classes) {
  SingleResult result;
  for (auto c : selected_classes) {
    const Hypervector unbound = unbind_labels(target, h, c);
    ItemPath path{c, {}, false};
    for (std::size_t depth = 1; depth <= h.levels(); ++depth) {
      auto scored = score_children(unbound, h, c, path.levels, result.counters);
      const ItemPath& best = scored.front().path;
      if (best.is_null) {
        path = best;
        break;
      }
      path.levels.push_back(best.levels.back());
    }
    result.classes.push_back({c, std::move(path)});
  }
  return result;
}

SingleResult factorize_single(const Hypervector& target, const Hierarchy& h) {
  std::vector<std::size_t> all(h.num_classes());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return factorize_single(target, h, all);
}

Hypervector reconstruct_and_exclude(const Hypervector& residual, const Hierarchy& h,
                                    const ObjectDescription& obj) {
  return subtract(residual, encode_object(h, obj));
}

const char* to_string(Acceptance acceptance) noexcept {
  switch (acceptance) {
    case Acceptance::rescan: return "rescan";
    case Acceptance::best_first: return "best-first";
    case Acceptance::in_order: return "in-order";
  }
  return "unknown";
}

namespace {

struct Option {
  ItemPath path;
  double score = 0.0;
  Hypervector clause;
};

struct Combination {
  std::vector<ItemPath> paths;
  Hypervector product;
  double score = 0.0;
  // Residual generation the score was measured against.
  std::uint64_t generation = 0;
};

// One factorize_multi call: owns the residual and the counters.
class MultiFactorizer {
 public:
  MultiFactorizer(const Hierarchy& h, const Hypervector& target, double th,
                  const FactorizerOptions& options)
      : h_(h), residual_(target), th_(th), options_(options) {}

  FactorizationResult run() {
    FactorizationResult result;
    result.threshold = th_;
    while (result.objects.size() < options_.max_objects) {
      ++counters_.loop_iterations;
      auto accepted = scan();
      if (accepted.empty()) {
        break;
      }
      const std::size_t before = result.objects.size();
      for (auto& combo : accepted) {
        if (result.objects.size() >= options_.max_objects) {
          break;
        }
        if (best_first() && stale(combo) && !reverify(combo)) {
          continue;
        }
        auto leaves = descend(std::move(combo), 1);
        for (auto& leaf : leaves) {
          if (result.objects.size() >= options_.max_objects) {
            break;
          }
          if (best_first() && stale(leaf) && !reverify(leaf)) {
            continue;
          }
          ObjectDescription obj{leaf.paths};
          residual_ = subtract(residual_, encode_object(h_, obj));
          ++generation_;
          result.objects.push_back(
              {std::move(obj), leaf.score, static_cast<std::size_t>(counters_.loop_iterations)});
          if (options_.acceptance == Acceptance::rescan) {
            break;
          }
        }
        if (options_.acceptance == Acceptance::rescan && result.objects.size() > before) {
          break;
        }
      }
      if (result.objects.size() == before) {
        break;
      }
    }
    if (result.objects.size() >= options_.max_objects) {
      ++counters_.loop_iterations;
      result.truncated = !scan().empty();
    }
    result.residual_norm = l2_norm(residual_);
    result.counters = counters_;
    return result;
  }

 private:
  // Level-1 pass over the current residual; returns combinations scoring
  // above th, best first.
  std::vector<Combination> scan() {
    std::vector<std::vector<Option>> options(h_.num_classes());
    for (std::size_t c = 0; c < h_.num_classes(); ++c) {
      const Hypervector unbound = unbind_labels(residual_, h_, c);
      options[c] = select(unbound, c, {});
    }
    return enumerate(options);
  }

  // Items above th for one class below `parent`; when none clears th the
  // single best entry is kept, since every object has exactly one entry per
  // class and the combination check still rejects it if nothing is there.
  std::vector<Option> select(const Hypervector& unbound, std::size_t c,
                             std::span<const std::size_t> parent) {
    auto scored = score_children(unbound, h_, c, parent, counters_);
    std::size_t keep = 0;
    while (keep < scored.size() && scored[keep].score > th_) {
      ++keep;
    }
    keep = std::max<std::size_t>(keep, 1);
    std::vector<Option> out;
    out.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      Hypervector clause = encode_clause(h_, c, scored[k].path);
      out.push_back({std::move(scored[k].path), scored[k].score, std::move(clause)});
    }
    return out;
  }

  void trim(std::vector<std::vector<Option>>& options) const {
    auto count = [&] {
      std::size_t n = 1;
      for (const auto& o : options) {
        n *= o.size();
        if (n > options_.max_combinations) {
          return n;
        }
      }
      return n;
    };
    while (count() > options_.max_combinations) {
      auto largest = std::max_element(options.begin(), options.end(),
                                      [](const auto& a, const auto& b) { return a.size() < b.size(); });
      if (largest->size() <= 1) {
        break;
      }
      largest->pop_back();
    }
  }

  // Depth-first over classes in index order, each class's options in
  // descending score; partial products are shared along the recursion.
  std::vector<Combination> enumerate(std::vector<std::vector<Option>>& options) {
    trim(options);
    std::vector<Combination> accepted;
    std::vector<ItemPath> paths(options.size());
    auto rec = [&](auto&& self, std::size_t c, const Hypervector* partial) -> void {
      if (c == options.size()) {
        ++counters_.combinations_tested;
        const double s = similarity(residual_, *partial);
        if (s > th_) {
          accepted.push_back({paths, *partial, s, generation_});
        }
        return;
      }
      for (const auto& opt : options[c]) {
        paths[c] = opt.path;
        if (partial == nullptr) {
          self(self, c + 1, &opt.clause);
        } else {
          const Hypervector next = bind(*partial, opt.clause);
          self(self, c + 1, &next);
        }
      }
    };
    rec(rec, 0, nullptr);
    if (best_first()) {
      std::stable_sort(accepted.begin(), accepted.end(),
                       [](const Combination& a, const Combination& b) { return a.score > b.score; });
    }
    return accepted;
  }

  bool best_first() const { return options_.acceptance != Acceptance::in_order; }

  bool stale(const Combination& combo) const { return combo.generation != generation_; }

  bool reverify(Combination& combo) {
    ++counters_.combinations_tested;
    combo.score = similarity(residual_, combo.product);
    combo.generation = generation_;
    return combo.score > th_;
  }

  // Extends a verified combination level by level; returns every full-depth
  // combination that clears th, best first.
  std::vector<Combination> descend(Combination combo, std::size_t depth) {
    const bool any_item = std::any_of(combo.paths.begin(), combo.paths.end(),
                                      [](const ItemPath& p) { return !p.is_null; });
    if (depth >= h_.levels() || !any_item) {
      std::vector<Combination> out;
      out.push_back(std::move(combo));
      return out;
    }
    std::vector<std::vector<Option>> options(h_.num_classes());
    for (std::size_t c = 0; c < h_.num_classes(); ++c) {
      const ItemPath& p = combo.paths[c];
      if (p.is_null) {
        options[c].push_back({p, 0.0, encode_clause(h_, c, p)});
        continue;
      }
      const Hypervector unbound = unbind_labels(residual_, h_, c);
      options[c] = select(unbound, c, p.levels);
    }
    std::vector<Combination> out;
    for (auto& next : enumerate(options)) {
      auto deeper = descend(std::move(next), depth + 1);
      for (auto& d : deeper) {
        out.push_back(std::move(d));
      }
    }
    if (best_first()) {
      std::stable_sort(out.begin(), out.end(),
                       [](const Combination& a, const Combination& b) { return a.score > b.score; });
    }
    return out;
  }

  const Hierarchy& h_;
  Hypervector residual_;
  double th_;
  const FactorizerOptions& options_;
  Counters counters_;
  std::uint64_t generation_ = 0;
};

}  // namespace

FactorizationResult factorize_multi(const EncodedTarget& target, const Hierarchy& h,
                                    const FactorizerOptions& options) {
  if (target.hv.dim() != h.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "target does not match hierarchy dimension");
  }
  if (options.max_objects == 0) {
    throw Error(ErrorCode::invalid_argument, "max_objects must be >= 1");
  }
  const double th = options.threshold.resolve(h, target.num_objects_hint);
  MultiFactorizer f(h, target.hv, th, options);
  return f.run();
}

FactorizationResult factorize_multi(const EncodedTarget& target, const Hierarchy& h,
                                    const ThresholdConfig& threshold, std::size_t max_objects) {
  FactorizerOptions options;
  options.threshold = threshold;
  options.max_objects = max_objects;
  return factorize_multi(target, h, options);
}

}  // namespace factorhd
