#pragma once

// Reference models used for comparison: the class-instance (C-I) encoding,
// object = sum_i LABEL_i * item_i, and the resonator network that factorizes
// pure products item_1 * item_2 * ... * item_F (class-class model).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "factorhd/codebook.hpp"
#include "factorhd/hypervector.hpp"

namespace factorhd {

struct CIEncoded {
  Hypervector hv;
  std::vector<Hypervector> class_labels;
};

// assignments[i] is the level-1 item index of class i.
CIEncoded ci_encode(const Hierarchy& h, std::span<const std::size_t> assignments);

// Unclipped sum of several C-I objects.
CIEncoded ci_superpose(std::span<const CIEncoded> objects);

// argmax_k sim(enc.hv * LABEL_class, item_k); ties go to the lower index.
std::size_t ci_factorize(const CIEncoded& enc, const Hierarchy& h, std::size_t class_index);

struct ResonatorResult {
  std::vector<std::size_t> indices;
  std::size_t iterations = 0;
  bool converged = false;
  // Item dot products computed (F * M per sweep).
  std::uint64_t similarity_measurements = 0;
};

using Codebook = std::span<const Hypervector>;

// Synchronous resonator iteration. Every estimate starts at the sign of its
// codebook superposition unless `initial` supplies one estimate per factor.
// A sweep updates all factors from the previous sweep's estimates:
//   u_i = target * prod_{j != i} x_j,  x_i <- sign(sum_k <u_i, c_k> c_k)
// with sign(0) = +1. Stops when a sweep leaves every estimate unchanged or
// after max_iterations sweeps; indices are the final per-factor argmax.
ResonatorResult resonator_factorize(const Hypervector& target, std::span<const Codebook> codebooks,
                                    std::size_t max_iterations,
                                    std::span<const Hypervector> initial = {});

}  // namespace factorhd
