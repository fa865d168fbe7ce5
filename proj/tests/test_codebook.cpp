#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "factorhd/codebook.hpp"
#include "factorhd/error.hpp"

using namespace factorhd;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

std::string saved(const Hierarchy& h) {
  std::ostringstream out;
  h.save(out);
  return out.str();
}

}  // namespace

TEST(Hierarchy, ThreeClassesOneLevel) {
  const auto h = Hierarchy::generate(1500, 3, {256}, Seed{1});
  EXPECT_EQ(h.num_classes(), 3U);
  EXPECT_EQ(h.levels(), 1U);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(h.level_items(c, 1).size(), 256U);
  }
  EXPECT_EQ(h.total_vectors(), 3U + 768U + 1U);
  EXPECT_EQ(h.null_hv().dim(), 1500U);
}

TEST(Hierarchy, TwoLevelTree) {
  const auto h = Hierarchy::generate(1000, 1, {256, 10}, Seed{2});
  EXPECT_EQ(h.nodes_at(1), 256U);
  EXPECT_EQ(h.nodes_at(2), 2560U);
  EXPECT_EQ(h.level_items(0, 2).size(), 2560U);
  EXPECT_EQ(h.total_vectors(), 1U + 256U + 2560U + 1U);
  const std::vector<std::size_t> parent{7};
  const auto kids = h.children(0, parent);
  ASSERT_EQ(kids.size(), 10U);
  EXPECT_EQ(h.first_child_index(parent), 70U);
  EXPECT_EQ(&kids[3], &h.level_items(0, 2)[73]);
}

TEST(Hierarchy, Deterministic) {
  EXPECT_TRUE(Hierarchy::generate(300, 2, {5, 3}, Seed{8}) == Hierarchy::generate(300, 2, {5, 3}, Seed{8}));
  EXPECT_FALSE(Hierarchy::generate(300, 2, {5}, Seed{8}) == Hierarchy::generate(300, 2, {5}, Seed{9}));
}

TEST(Hierarchy, LabelOnlyAllowed) {
  const auto h = Hierarchy::generate(64, 2, {}, Seed{0});
  EXPECT_EQ(h.levels(), 0U);
  EXPECT_EQ(h.total_vectors(), 3U);
}

TEST(Hierarchy, GenerateErrors) {
  EXPECT_EQ(code_of([] { (void)Hierarchy::generate(0, 3, {4}, Seed{0}); }), ErrorCode::invalid_dimension);
  EXPECT_EQ(code_of([] { (void)Hierarchy::generate(64, 0, {4}, Seed{0}); }), ErrorCode::invalid_shape);
  EXPECT_EQ(code_of([] { (void)Hierarchy::generate(64, 2, {4, 0}, Seed{0}); }), ErrorCode::invalid_shape);
}

TEST(Lookup, SpecialPaths) {
  const auto h = Hierarchy::generate(200, 3, {8}, Seed{3});
  EXPECT_EQ(&h.lookup(ItemPath::null_item()), &h.null_hv());
  EXPECT_EQ(h.lookup(ItemPath{0, {}, false}), h.label(0));
  const ItemPath p{2, {5}, false};
  EXPECT_EQ(&h.lookup(p), &h.level_items(2, 1)[5]);
  EXPECT_EQ(h.lookup(p), h.lookup(p));
}

TEST(Lookup, NullIsShared) {
  const auto h = Hierarchy::generate(200, 3, {8}, Seed{3});
  const ItemPath a = ItemPath::null_item();
  ItemPath b = ItemPath::null_item();
  b.class_index = 2;
  EXPECT_EQ(&h.lookup(a), &h.lookup(b));
}

TEST(Lookup, OutOfRange) {
  const auto h = Hierarchy::generate(200, 3, {8, 2}, Seed{3});
  EXPECT_EQ(code_of([&] { (void)h.lookup(ItemPath{3, {0}, false}); }), ErrorCode::path_not_found);
  EXPECT_EQ(code_of([&] { (void)h.lookup(ItemPath{0, {8}, false}); }), ErrorCode::path_not_found);
  EXPECT_EQ(code_of([&] { (void)h.lookup(ItemPath{0, {1, 2}, false}); }), ErrorCode::path_not_found);
  EXPECT_EQ(code_of([&] { (void)h.lookup(ItemPath{0, {1, 1, 0}, false}); }), ErrorCode::path_not_found);
  EXPECT_NO_THROW((void)h.lookup(ItemPath{0, {7, 1}, false}));
}

TEST(Persistence, RoundTrip) {
  const auto h = Hierarchy::generate(1500, 3, {256}, Seed{4});
  std::istringstream in(saved(h));
  const auto back = Hierarchy::load(in);
  EXPECT_TRUE(back == h);
  EXPECT_EQ(back.seed(), h.seed());
  EXPECT_EQ(back.branching(), h.branching());
}

TEST(Persistence, RoundTripMultiLevelFile) {
  const auto h = Hierarchy::generate(128, 2, {4, 3, 2}, Seed{5});
  const auto path = (std::filesystem::temp_directory_path() / "factorhd_test_codebook.bin").string();
  h.save_file(path);
  const auto back = Hierarchy::load_file(path);
  std::remove(path.c_str());
  EXPECT_TRUE(back == h);
  // Regeneration from the stored seed reproduces the loaded vectors.
  EXPECT_TRUE(Hierarchy::generate(back.dim(), back.num_classes(), back.branching(), back.seed()) == back);
}

TEST(Persistence, FileStartsWithMagic) {
  const std::string bytes = saved(Hierarchy::generate(16, 1, {2}, Seed{0}));
  ASSERT_GE(bytes.size(), 5U);
  EXPECT_EQ(bytes.substr(0, 4), "FHD1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), Hierarchy::kFormatVersion);
}

TEST(Persistence, TruncatedRejected) {
  const std::string bytes = saved(Hierarchy::generate(256, 3, {16}, Seed{6}));
  for (std::size_t cut : {std::size_t{2}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut));
    EXPECT_EQ(code_of([&] { (void)Hierarchy::load(in); }), ErrorCode::corrupt_codebook) << cut;
  }
}

TEST(Persistence, BadMagicOrVersionRejected) {
  std::string bytes = saved(Hierarchy::generate(32, 1, {2}, Seed{7}));
  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream a(magic);
  EXPECT_EQ(code_of([&] { (void)Hierarchy::load(a); }), ErrorCode::corrupt_codebook);
  std::string version = bytes;
  version[4] = 9;
  std::istringstream b(version);
  EXPECT_EQ(code_of([&] { (void)Hierarchy::load(b); }), ErrorCode::corrupt_codebook);
}

TEST(Persistence, MissingFile) {
  EXPECT_THROW((void)Hierarchy::load_file("/nonexistent/dir/codebook.bin"), Error);
}

TEST(Hierarchy, QuasiOrthogonalAtScale) {
  // sigma = 1/sqrt(2048) ~ 0.022; 0.1 is ~4.5 sigma and the max over 10^4
  // pairs sits near 3.9 sigma.
  const auto h = Hierarchy::generate(2048, 4, {64, 4}, Seed{8});
  std::vector<const Hypervector*> all;
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    all.push_back(&h.label(c));
    for (std::size_t d = 1; d <= h.levels(); ++d) {
      for (const auto& v : h.level_items(c, d)) {
        all.push_back(&v);
      }
    }
  }
  all.push_back(&h.null_hv());
  RandomStream s(Seed{80});
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto i = s.uniform(all.size());
    auto j = s.uniform(all.size() - 1);
    j += j >= i ? 1 : 0;
    worst = std::max(worst, std::abs(similarity(*all[i], *all[j])));
  }
  EXPECT_LT(worst, 0.1);
}

TEST(ItemPath, Formatting) {
  EXPECT_EQ(to_string(ItemPath::null_item()), to_string(ItemPath::null_item()));
  EXPECT_NE(to_string(ItemPath{0, {1}, false}), to_string(ItemPath{0, {2}, false}));
  EXPECT_TRUE(ItemPath::null_item() == (ItemPath{4, {}, true}));
}
