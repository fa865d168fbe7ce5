#include "factorhd/hypervector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "factorhd/error.hpp"

namespace factorhd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::non_invertible_unbinder: return "non-invertible-unbinder";
    case ErrorCode::invalid_shape: return "invalid-shape";
    case ErrorCode::path_not_found: return "path-not-found";
    case ErrorCode::corrupt_codebook: return "corrupt-codebook";
    case ErrorCode::unsupported_configuration: return "unsupported-configuration";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

const char* to_string(Domain domain) noexcept {
  switch (domain) {
    case Domain::bipolar: return "bipolar";
    case Domain::ternary: return "ternary";
    case Domain::integer: return "integer";
  }
  return "unknown";
}

namespace {

template <typename T>
std::int32_t sign_of(T x) noexcept {
  return static_cast<std::int32_t>((x > 0) - (x < 0));
}

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

template <typename A, typename B>
std::int64_t dot_span(std::span<const A> a, std::span<const B> b) noexcept {
  if constexpr (sizeof(A) == 1 && sizeof(B) == 1) {
    // Products of {-1,0,1} values; 32-bit accumulation cannot overflow for
    // any dimension that fits in memory as int8.
    std::int32_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc += static_cast<std::int32_t>(a[i]) * static_cast<std::int32_t>(b[i]);
    }
    return acc;
  } else {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc += static_cast<std::int64_t>(a[i]) * static_cast<std::int64_t>(b[i]);
    }
    return acc;
  }
}

// Tags 32-bit components with the tightest domain that holds them.
Hypervector narrowest(std::vector<std::int32_t> values) {
  bool fits_ternary = true;
  bool has_zero = false;
  for (auto x : values) {
    if (x < -1 || x > 1) {
      fits_ternary = false;
      break;
    }
    has_zero = has_zero || x == 0;
  }
  if (!fits_ternary) {
    return Hypervector::integer(std::move(values));
  }
  std::vector<std::int8_t> narrow(values.begin(), values.end());
  return has_zero ? Hypervector::ternary(std::move(narrow))
                  : Hypervector::bipolar(std::move(narrow));
}

}  // namespace

Hypervector Hypervector::bipolar(std::vector<std::int8_t> components) {
  for (auto x : components) {
    if (x != 1 && x != -1) {
      throw Error(ErrorCode::invalid_argument, "bipolar component outside {-1,+1}");
    }
  }
  Hypervector hv;
  hv.domain_ = Domain::bipolar;
  hv.narrow_ = std::move(components);
  return hv;
}

Hypervector Hypervector::ternary(std::vector<std::int8_t> components) {
  for (auto x : components) {
    if (x < -1 || x > 1) {
      throw Error(ErrorCode::invalid_argument, "ternary component outside {-1,0,+1}");
    }
  }
  Hypervector hv;
  hv.domain_ = Domain::ternary;
  hv.narrow_ = std::move(components);
  return hv;
}

Hypervector Hypervector::integer(std::vector<std::int32_t> components) {
  Hypervector hv;
  hv.domain_ = Domain::integer;
  hv.wide_ = std::move(components);
  return hv;
}

Hypervector Hypervector::from_values(std::span<const std::int32_t> values) {
  return narrowest(std::vector<std::int32_t>(values.begin(), values.end()));
}

Hypervector Hypervector::from_values(std::initializer_list<std::int32_t> values) {
  return from_values(std::span<const std::int32_t>(values.begin(), values.size()));
}

Hypervector Hypervector::ones(std::size_t dim) {
  return bipolar(std::vector<std::int8_t>(dim, 1));
}

Hypervector Hypervector::zeros(std::size_t dim) {
  return ternary(std::vector<std::int8_t>(dim, 0));
}

std::vector<std::int32_t> Hypervector::to_vector() const {
  return visit([](auto s) { return std::vector<std::int32_t>(s.begin(), s.end()); });
}

bool operator==(const Hypervector& a, const Hypervector& b) noexcept {
  if (a.dim() != b.dim()) {
    return false;
  }
  if (a.domain_ != Domain::integer && b.domain_ != Domain::integer) {
    return a.narrow_ == b.narrow_;
  }
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] != b[i]) {
      return false;
    }
  }
  return true;
}

Hypervector random_hv(std::size_t dim, RandomStream& stream) {
  if (dim == 0) {
    throw Error(ErrorCode::invalid_dimension, "dimension must be at least 1");
  }
  std::vector<std::int8_t> out(dim);
  std::size_t i = 0;
  while (i < dim) {
    std::uint64_t bits = stream.next();
    for (int b = 0; b < 64 && i < dim; ++b, ++i) {
      out[i] = (bits >> b) & 1U ? std::int8_t{1} : std::int8_t{-1};
    }
  }
  return Hypervector::bipolar(std::move(out));
}

Hypervector bundle(std::span<const Hypervector> vs, bool clip) {
  if (vs.empty()) {
    throw Error(ErrorCode::empty_input, "bundle of an empty list");
  }
  const std::size_t dim = vs.front().dim();
  for (const auto& v : vs) {
    check_same_dim(dim, v.dim());
  }
  if (vs.size() == 1 && !clip) {
    return vs.front();
  }
  std::vector<std::int32_t> acc(dim, 0);
  for (const auto& v : vs) {
    v.visit([&](auto s) {
      for (std::size_t i = 0; i < dim; ++i) {
        acc[i] += s[i];
      }
    });
  }
  if (clip) {
    std::vector<std::int8_t> out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = static_cast<std::int8_t>(sign_of(acc[i]));
    }
    return Hypervector::ternary(std::move(out));
  }
  return Hypervector::integer(std::move(acc));
}

Hypervector bundle(std::initializer_list<Hypervector> vs, bool clip) {
  return bundle(std::span<const Hypervector>(vs.begin(), vs.size()), clip);
}

Hypervector bind(std::span<const Hypervector> vs) {
  if (vs.empty()) {
    throw Error(ErrorCode::empty_input, "bind of an empty list");
  }
  Hypervector out = vs.front();
  for (std::size_t k = 1; k < vs.size(); ++k) {
    out = bind(out, vs[k]);
  }
  return out;
}

Hypervector bind(std::initializer_list<Hypervector> vs) {
  return bind(std::span<const Hypervector>(vs.begin(), vs.size()));
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a.dim(), b.dim());
  const std::size_t dim = a.dim();
  if (a.domain() != Domain::integer && b.domain() != Domain::integer) {
    auto x = a.narrow();
    auto y = b.narrow();
    std::vector<std::int8_t> out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = static_cast<std::int8_t>(x[i] * y[i]);
    }
    if (a.domain() == Domain::bipolar && b.domain() == Domain::bipolar) {
      return Hypervector::bipolar(std::move(out));
    }
    return Hypervector::ternary(std::move(out));
  }
  std::vector<std::int32_t> out(dim);
  a.visit([&](auto x) {
    b.visit([&](auto y) {
      for (std::size_t i = 0; i < dim; ++i) {
        out[i] = static_cast<std::int32_t>(x[i]) * static_cast<std::int32_t>(y[i]);
      }
    });
  });
  return Hypervector::integer(std::move(out));
}

Hypervector unbind(const Hypervector& a, const Hypervector& key) {
  check_same_dim(a.dim(), key.dim());
  if (key.domain() != Domain::bipolar) {
    bool invertible = key.visit([](auto s) {
      return std::all_of(s.begin(), s.end(), [](auto x) { return x == 1 || x == -1; });
    });
    if (!invertible) {
      throw Error(ErrorCode::non_invertible_unbinder, "unbinder has non-bipolar components");
    }
  }
  return bind(a, key);
}

Hypervector permute(const Hypervector& v, std::int64_t shift) {
  const auto dim = static_cast<std::int64_t>(v.dim());
  if (dim == 0) {
    return v;
  }
  const auto k = static_cast<std::size_t>(((shift % dim) + dim) % dim);
  return v.visit([&](auto s) {
    using T = typename decltype(s)::value_type;
    std::vector<std::remove_const_t<T>> out(s.size());
    std::rotate_copy(s.begin(), s.end() - static_cast<std::ptrdiff_t>(k), s.end(), out.begin());
    if constexpr (sizeof(T) == 1) {
      return v.domain() == Domain::bipolar ? Hypervector::bipolar(std::move(out))
                                           : Hypervector::ternary(std::move(out));
    } else {
      return Hypervector::integer(std::move(out));
    }
  });
}

Hypervector negate(const Hypervector& v) {
  return v.visit([&](auto s) {
    using T = std::remove_const_t<typename decltype(s)::value_type>;
    std::vector<T> out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [](T x) { return static_cast<T>(-x); });
    if constexpr (sizeof(T) == 1) {
      return v.domain() == Domain::bipolar ? Hypervector::bipolar(std::move(out))
                                           : Hypervector::ternary(std::move(out));
    } else {
      return Hypervector::integer(std::move(out));
    }
  });
}

Hypervector subtract(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a.dim(), b.dim());
  std::vector<std::int32_t> out = a.to_vector();
  b.visit([&](auto s) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] -= s[i];
    }
  });
  return Hypervector::integer(std::move(out));
}

std::int64_t dot(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a.dim(), b.dim());
  return a.visit([&](auto x) { return b.visit([&](auto y) { return dot_span(x, y); }); });
}

double similarity(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a.dim(), b.dim());
  if (a.dim() == 0) {
    throw Error(ErrorCode::invalid_dimension, "similarity of empty vectors");
  }
  return static_cast<double>(dot(a, b)) / static_cast<double>(a.dim());
}

double l2_norm(const Hypervector& v) {
  return std::sqrt(static_cast<double>(dot(v, v)));
}

namespace {

void put_u32(std::ostream& out, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) {
    b[i] = static_cast<char>((x >> (8 * i)) & 0xFFU);
  }
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorCode::corrupt_codebook, "truncated hypervector header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_hv(std::ostream& out, const Hypervector& v) {
  put_u32(out, static_cast<std::uint32_t>(v.dim()));
  out.put(static_cast<char>(v.domain()));
  if (v.domain() == Domain::integer) {
    for (auto x : v.wide()) {
      put_u32(out, static_cast<std::uint32_t>(x));
    }
  } else {
    out.write(reinterpret_cast<const char*>(v.narrow().data()),
              static_cast<std::streamsize>(v.dim()));
  }
}

Hypervector read_hv(std::istream& in) {
  const std::uint32_t dim = get_u32(in);
  if (dim > (1U << 28)) {
    throw Error(ErrorCode::corrupt_codebook, "implausible hypervector dimension");
  }
  const int tag = in.get();
  if (tag == std::char_traits<char>::eof() || tag > static_cast<int>(Domain::integer)) {
    throw Error(ErrorCode::corrupt_codebook, "bad hypervector domain tag");
  }
  const auto domain = static_cast<Domain>(tag);
  if (domain == Domain::integer) {
    std::vector<std::int32_t> values(dim);
    for (auto& x : values) {
      x = static_cast<std::int32_t>(get_u32(in));
    }
    return Hypervector::integer(std::move(values));
  }
  std::vector<std::int8_t> values(dim);
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(dim))) {
    throw Error(ErrorCode::corrupt_codebook, "truncated hypervector body");
  }
  try {
    return domain == Domain::bipolar ? Hypervector::bipolar(std::move(values))
                                     : Hypervector::ternary(std::move(values));
  } catch (const Error&) {
    throw Error(ErrorCode::corrupt_codebook, "component outside the tagged domain");
  }
}

std::uint64_t RandomStream::uniform(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t floor = (0 - bound) % bound;
    while (low < floor) {
      x = next();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace factorhd
