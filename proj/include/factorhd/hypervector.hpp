#pragma once

// Hypervector type and the component-wise algebra used by every other module:
// bundling (+), binding (*), unbinding, cyclic permutation and dot similarity.
//
// Bipolar and ternary vectors keep one signed byte per component. Integer
// vectors (sums over several objects) are widened to 32 bits.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

#include "factorhd/rng.hpp"

namespace factorhd {

enum class Domain : std::uint8_t { bipolar = 0, ternary = 1, integer = 2 };

const char* to_string(Domain domain) noexcept;

class Hypervector {
 public:
  Hypervector() = default;

  // Validating constructors. Throw Error(invalid_argument) when a component
  // falls outside the value set of the requested domain.
  static Hypervector bipolar(std::vector<std::int8_t> components);
  static Hypervector ternary(std::vector<std::int8_t> components);
  static Hypervector integer(std::vector<std::int32_t> components);

  // Picks the narrowest domain that holds every value.
  static Hypervector from_values(std::span<const std::int32_t> values);
  static Hypervector from_values(std::initializer_list<std::int32_t> values);

  static Hypervector ones(std::size_t dim);
  static Hypervector zeros(std::size_t dim);

  [[nodiscard]] std::size_t dim() const noexcept {
    return domain_ == Domain::integer ? wide_.size() : narrow_.size();
  }
  [[nodiscard]] Domain domain() const noexcept { return domain_; }
  [[nodiscard]] bool empty() const noexcept { return dim() == 0; }

  [[nodiscard]] std::int32_t operator[](std::size_t i) const noexcept {
    return domain_ == Domain::integer ? wide_[i] : narrow_[i];
  }

  // Raw storage; narrow() is only meaningful for bipolar/ternary vectors and
  // wide() only for integer ones.
  [[nodiscard]] std::span<const std::int8_t> narrow() const noexcept { return narrow_; }
  [[nodiscard]] std::span<const std::int32_t> wide() const noexcept { return wide_; }

  [[nodiscard]] std::vector<std::int32_t> to_vector() const;

  // Calls fn with a span over the stored components, whatever their width.
  template <typename Fn>
  decltype(auto) visit(Fn&& fn) const {
    if (domain_ == Domain::integer) {
      return fn(std::span<const std::int32_t>(wide_));
    }
    return fn(std::span<const std::int8_t>(narrow_));
  }

  // Component equality; the domain tag is not compared.
  friend bool operator==(const Hypervector& a, const Hypervector& b) noexcept;

 private:
  Domain domain_ = Domain::bipolar;
  std::vector<std::int8_t> narrow_;
  std::vector<std::int32_t> wide_;
};

// Each component independently +1 or -1 with probability 1/2.
Hypervector random_hv(std::size_t dim, RandomStream& stream);

// Component-wise sum. With clip the result is the component sign (ternary);
// without it the sum is kept in Z^D. A singleton bundle returns its input.
Hypervector bundle(std::span<const Hypervector> vs, bool clip);
Hypervector bundle(std::initializer_list<Hypervector> vs, bool clip);

// Component-wise product.
Hypervector bind(std::span<const Hypervector> vs);
Hypervector bind(std::initializer_list<Hypervector> vs);
Hypervector bind(const Hypervector& a, const Hypervector& b);

// Same arithmetic as bind; the unbinder must be bipolar so that k * k = 1.
Hypervector unbind(const Hypervector& a, const Hypervector& key);

// Cyclic rotation: result[(i + shift) mod D] = v[i].
Hypervector permute(const Hypervector& v, std::int64_t shift);

Hypervector negate(const Hypervector& v);

// Integer difference a - b.
Hypervector subtract(const Hypervector& a, const Hypervector& b);

std::int64_t dot(const Hypervector& a, const Hypervector& b);

// Dot product divided by D.
double similarity(const Hypervector& a, const Hypervector& b);

double l2_norm(const Hypervector& v);

// Little-endian: dim (u32), domain tag (u8), then one byte per component for
// bipolar/ternary or four bytes per component for integer vectors.
void write_hv(std::ostream& out, const Hypervector& v);
Hypervector read_hv(std::istream& in);

}  // namespace factorhd
