#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace bratteli;
using namespace testsupport;

TEST_CASE("pascal(2) level sizes and binomial dims") {
  auto g = families::pascal(2, 8);
  for (std::size_t n = 0; n <= 8; ++n) CHECK(g.level_size(n) == n + 1);
  auto dt = dims(g, 8);
  for (int n = 0; n <= 8; ++n)
    for (int k = 0; k <= n; ++k) CHECK(dt.at(n, k) == multinomial({n - k, k}));
}

TEST_CASE("pascal(3): six vertices at level 2, multinomial dims") {
  auto g = families::pascal(3, 4);
  CHECK(g.level_size(2) == 6);
  CHECK(g.level_size(1) == 3);
  auto dt = dims(g, 4);
  auto comps = families::pascal_compositions(3, 4);
  for (std::size_t v = 0; v < comps.size(); ++v) CHECK(dt.at(4, v) == multinomial(comps[v]));
}

TEST_CASE("pascal(2) with depth 1 has two vertices under the root") {
  auto g = families::pascal(2, 1);
  CHECK(g.depth() == 1);
  CHECK(g.level_size(1) == 2);
}

TEST_CASE("young level sizes are partition counts; hook dims to depth 10") {
  auto g = families::young(10);
  const std::size_t p[] = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42};
  for (std::size_t n = 0; n <= 10; ++n) CHECK(g.level_size(n) == p[n]);
  auto dt = dims(g, 10);
  for (int n = 1; n <= 10; ++n) {
    auto parts = families::partitions_of(n);
    for (std::size_t v = 0; v < parts.size(); ++v) CHECK(dt.at(n, v) == hook_length_dim(parts[v]));
  }
}

TEST_CASE("young: the single-column partition has one tableau") {
  auto g = families::young(9);
  auto dt = dims(g, 9);
  for (int n = 1; n <= 9; ++n) {
    auto parts = families::partitions_of(n);
    // descending lexicographic order puts the single column (1,...,1) last
    CHECK(parts.back() == std::vector<int>(n, 1));
    CHECK(dt.at(n, parts.size() - 1) == 1);
  }
}

TEST_CASE("unordered-pairs level sizes match the pair recurrences") {
  auto g4 = families::unordered_pairs(4, 4);
  CHECK(g4.level_size(1) == 4);
  CHECK(g4.level_size(2) == 6);
  CHECK(g4.level_size(3) == 15);
  CHECK(g4.level_size(4) == 105);

  auto g3 = families::unordered_pairs(3, 5);
  for (std::size_t n = 1; n <= 5; ++n) CHECK(g3.level_size(n) == 3);

  auto g2 = families::unordered_pairs(2, 4, /*include_equal=*/true);
  CHECK(g2.level_size(1) == 2);
  CHECK(g2.level_size(2) == 3);
  CHECK(g2.level_size(3) == 6);
  CHECK(g2.level_size(4) == 21);
}

TEST_CASE("unordered-pairs enforces the level-size bound, and {a,a} enters twice") {
  CHECK_THROWS_AS(families::unordered_pairs(4, 6), ResourceBoundError);  // 14.9M vertices
  CHECK_THROWS_AS(families::unordered_pairs(4, 5, false, 5000), ResourceBoundError);
  CHECK_NOTHROW(families::unordered_pairs(4, 5));  // 5460 fits the default bound
  CHECK_THROWS_AS(families::unordered_pairs(2, 3, false), ValidationError);
  auto g = families::unordered_pairs(2, 2, true);
  // level 2 = {p0,p0}, {p0,p1}, {p1,p1} in lexicographic order
  CHECK(g.mult(2, 0, 0) == 2);
  CHECK(g.mult(2, 0, 1) == 1);
  CHECK(g.mult(2, 1, 1) == 1);
  CHECK(g.mult(2, 1, 2) == 2);
}

TEST_CASE("stationary: 1x1 unit matrix behaves like the chain") {
  auto g = families::stationary({{1}}, 6);
  auto c = families::chain(6);
  REQUIRE(g.depth() == c.depth());
  auto dg = dims(g, 6), dc = dims(c, 6);
  for (std::size_t n = 0; n <= 6; ++n) CHECK(dg.at(n, 0) == dc.at(n, 0));
}

TEST_CASE("stationary validates its kernel") {
  CHECK_THROWS_AS(families::stationary({{1, 0}, {1, 0}}, 3), ValidationError);
  CHECK_THROWS_AS(families::stationary({{0, 0}, {1, 1}}, 3), ValidationError);
  CHECK_THROWS_AS(families::stationary({{1, 2, 3}}, 3), ValidationError);
  CHECK_NOTHROW(families::stationary({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 3));
}

TEST_CASE("width-2 all-ones dims double per level") {
  auto g = families::stationary({{1, 1}, {1, 1}}, 5);
  auto dt = dims(g, 5);
  for (std::size_t n = 1; n <= 5; ++n) {
    CHECK(dt.at(n, 0) == Int(1) << (n - 1));
    CHECK(dt.at(n, 0) == dt.at(n, 1));
  }
}

TEST_CASE("pascal_bernoulli rejects malformed probability vectors") {
  auto g = families::pascal(2, 4);
  auto k = cotransitions(g, dims(g, 4));
  CHECK_THROWS_AS(families::pascal_bernoulli(g, 2, k, {Rat(1, 2)}), ValidationError);
  CHECK_THROWS_AS(families::pascal_bernoulli(g, 2, k, {Rat(3, 4), Rat(3, 4)}), ValidationError);
  CHECK_NOTHROW(families::pascal_bernoulli(g, 2, k, {Rat(1), Rat(0)}));
}
