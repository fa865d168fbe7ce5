#include "factorhd/baselines.hpp"

#include <algorithm>
#include <cstdlib>

#include "factorhd/error.hpp"

namespace factorhd {

CIEncoded ci_encode(const Hierarchy& h, std::span<const std::size_t> assignments) {
  if (assignments.size() != h.num_classes()) {
    throw Error(ErrorCode::invalid_argument, "one item index per class is required");
  }
  if (h.levels() == 0) {
    throw Error(ErrorCode::invalid_shape, "class-instance encoding needs a subclass level");
  }
  CIEncoded enc;
  std::vector<std::int32_t> acc(h.dim(), 0);
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    const auto items = h.level_items(c, 1);
    if (assignments[c] >= items.size()) {
      throw Error(ErrorCode::path_not_found, "item " + std::to_string(assignments[c]) +
                                                 " of class " + std::to_string(c));
    }
    auto label = h.label(c).narrow();
    auto item = items[assignments[c]].narrow();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += label[i] * item[i];
    }
    enc.class_labels.push_back(h.label(c));
  }
  enc.hv = Hypervector::integer(std::move(acc));
  return enc;
}

CIEncoded ci_superpose(std::span<const CIEncoded> objects) {
  if (objects.empty()) {
    throw Error(ErrorCode::empty_input, "no objects to superpose");
  }
  CIEncoded out;
  out.class_labels = objects.front().class_labels;
  std::vector<Hypervector> hvs;
  hvs.reserve(objects.size());
  for (const auto& o : objects) {
    hvs.push_back(o.hv);
  }
  out.hv = objects.size() == 1 ? hvs.front() : bundle(hvs, false);
  return out;
}

std::size_t ci_factorize(const CIEncoded& enc, const Hierarchy& h, std::size_t class_index) {
  const Hypervector query = bind(enc.hv, h.label(class_index));
  const auto items = h.level_items(class_index, 1);
  std::size_t best = 0;
  std::int64_t best_dot = dot(query, items[0]);
  for (std::size_t k = 1; k < items.size(); ++k) {
    const std::int64_t d = dot(query, items[k]);
    if (d > best_dot) {
      best = k;
      best_dot = d;
    }
  }
  return best;
}

namespace {

std::vector<std::int8_t> superposition_sign(Codebook book, std::size_t dim) {
  std::vector<std::int32_t> acc(dim, 0);
  for (const auto& v : book) {
    auto s = v.narrow();
    for (std::size_t i = 0; i < dim; ++i) {
      acc[i] += s[i];
    }
  }
  std::vector<std::int8_t> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = acc[i] >= 0 ? 1 : -1;
  }
  return out;
}

std::int32_t dot8(const std::int8_t* a, const std::int8_t* b, std::size_t n) noexcept {
  std::int32_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<std::int32_t>(a[i]) * static_cast<std::int32_t>(b[i]);
  }
  return acc;
}

}  // namespace

ResonatorResult resonator_factorize(const Hypervector& target, std::span<const Codebook> codebooks,
                                    std::size_t max_iterations,
                                    std::span<const Hypervector> initial) {
  const std::size_t num_factors = codebooks.size();
  if (num_factors == 0) {
    throw Error(ErrorCode::empty_input, "no codebooks");
  }
  if (target.domain() != Domain::bipolar) {
    throw Error(ErrorCode::invalid_argument, "resonator target must be bipolar");
  }
  const std::size_t dim = target.dim();
  for (const auto& book : codebooks) {
    if (book.empty()) {
      throw Error(ErrorCode::empty_input, "empty codebook");
    }
    for (const auto& v : book) {
      if (v.dim() != dim || v.domain() != Domain::bipolar) {
        throw Error(ErrorCode::dimension_mismatch, "codebook vectors must be bipolar of target dimension");
      }
    }
  }
  if (!initial.empty() && initial.size() != num_factors) {
    throw Error(ErrorCode::invalid_argument, "one initial estimate per factor is required");
  }

  std::vector<std::vector<std::int8_t>> estimates(num_factors);
  for (std::size_t f = 0; f < num_factors; ++f) {
    if (initial.empty()) {
      estimates[f] = superposition_sign(codebooks[f], dim);
    } else {
      auto s = initial[f].narrow();
      estimates[f].assign(s.begin(), s.end());
    }
  }

  ResonatorResult result;
  auto t = target.narrow();
  std::vector<std::vector<std::int8_t>> next(num_factors, std::vector<std::int8_t>(dim));
  std::vector<std::int8_t> u(dim);
  std::vector<std::int32_t> proj(dim);
  std::vector<std::int32_t> coeff;

  while (result.iterations < max_iterations) {
    ++result.iterations;
    for (std::size_t f = 0; f < num_factors; ++f) {
      std::copy(t.begin(), t.end(), u.begin());
      for (std::size_t g = 0; g < num_factors; ++g) {
        if (g == f) {
          continue;
        }
        const auto& e = estimates[g];
        for (std::size_t i = 0; i < dim; ++i) {
          u[i] = static_cast<std::int8_t>(u[i] * e[i]);
        }
      }
      const Codebook book = codebooks[f];
      coeff.resize(book.size());
      for (std::size_t k = 0; k < book.size(); ++k) {
        coeff[k] = dot8(u.data(), book[k].narrow().data(), dim);
      }
      result.similarity_measurements += book.size();
      std::fill(proj.begin(), proj.end(), 0);
      for (std::size_t k = 0; k < book.size(); ++k) {
        const std::int32_t w = coeff[k];
        const std::int8_t* c = book[k].narrow().data();
        for (std::size_t i = 0; i < dim; ++i) {
          proj[i] += w * c[i];
        }
      }
      auto& out = next[f];
      for (std::size_t i = 0; i < dim; ++i) {
        out[i] = proj[i] >= 0 ? 1 : -1;
      }
    }
    const bool stable = next == estimates;
    estimates.swap(next);
    if (stable) {
      result.converged = true;
      break;
    }
  }

  result.indices.resize(num_factors);
  for (std::size_t f = 0; f < num_factors; ++f) {
    const Codebook book = codebooks[f];
    std::size_t best = 0;
    std::int32_t best_dot = std::abs(dot8(estimates[f].data(), book[0].narrow().data(), dim));
    for (std::size_t k = 1; k < book.size(); ++k) {
      const std::int32_t d = std::abs(dot8(estimates[f].data(), book[k].narrow().data(), dim));
      if (d > best_dot) {
        best = k;
        best_dot = d;
      }
    }
    result.indices[f] = best;
  }
  for (const auto& book : codebooks) {
    result.similarity_measurements += book.size();
  }
  return result;
}

}  // namespace factorhd
