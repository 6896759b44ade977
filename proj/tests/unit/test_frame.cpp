#include <doctest.h>

#include <random>

#include "modalx/error.hpp"
#include "modalx/frame.hpp"
#include "oracles.hpp"

using namespace modalx;

namespace {

Frame data_frame(const char* name) { return load_frame(std::string(MODALX_DATA_DIR) + "/" + name); }

}  // namespace

TEST_CASE("edge * * declares the universal relation") {
  auto f = parse_frame("world w0\nworld a\ndesignated w0\nedge * *\n");
  REQUIRE(f.size() == 2);
  for (WorldIndex i = 0; i < 2; ++i)
    for (WorldIndex j = 0; j < 2; ++j) CHECK(f.related(i, j));
}

TEST_CASE("example 2 truncation parses to the two-block matrix") {
  auto f = data_frame("example2.frame");
  REQUIRE(f.size() == 6);
  const auto a = [&](int i) { return *f.find_world("a" + std::to_string(i)); };
  const auto b = [&](int i) { return *f.find_world("b" + std::to_string(i)); };
  for (WorldIndex v = 0; v < 6; ++v) CHECK(f.related(f.designated(), v));
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) CHECK(f.related(a(i), a(j)));
    for (int j = 1; j <= 2; ++j) {
      CHECK_FALSE(f.related(a(i), b(j)));
      CHECK_FALSE(f.related(b(j), a(i)));
    }
  }
  CHECK(f.related(b(1), b(1)));
  CHECK(f.related(b(2), b(2)));
  CHECK_FALSE(f.related(b(1), b(2)));
}

TEST_CASE("closed chain is the order relation") {
  auto f = data_frame("example3.frame");
  for (WorldIndex i = 0; i < 5; ++i)
    for (WorldIndex j = 0; j < 5; ++j) CHECK(f.related(i, j) == (i <= j));
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("unknown world in edge") {
    try {
      parse_frame("world a\ndesignated a\nedge a zz\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("duplicate world") {
    CHECK_THROWS_AS(parse_frame("world a\nworld a\ndesignated a\n"), ParseError);
  }
  SUBCASE("missing designated") { CHECK_THROWS_AS(parse_frame("world a\nedge a a\n"), ParseError); }
  SUBCASE("malformed line") {
    try {
      parse_frame("world a\n\n# comment\nedge a\ndesignated a\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
  SUBCASE("unknown directive") { CHECK_THROWS_AS(parse_frame("wrld a\n"), ParseError); }
  SUBCASE("content after end") {
    CHECK_THROWS_AS(parse_frame("world a\ndesignated a\nend\nworld b\n"), ParseError);
  }
}

TEST_CASE("classify") {
  CHECK(classify(data_frame("example1.frame")).label == FrameLabel::S5);
  CHECK(classify(data_frame("example2.frame")).label == FrameLabel::S4NotS5);
  CHECK(classify(data_frame("example3.frame")).label == FrameLabel::S4NotS5);
  auto irreflexive = parse_frame("world a\nworld b\ndesignated a\nedge a b\n");
  CHECK(classify(irreflexive).label == FrameLabel::NotS4);
}

TEST_CASE("accessible cluster") {
  CHECK(accessible_cluster(data_frame("example3.frame"), 2) == WorldSet{2, 3, 4});
  auto ex2 = data_frame("example2.frame");
  CHECK(accessible_cluster(ex2, ex2.designated()) == WorldSet{0, 1, 2, 3, 4, 5});
  auto ex1 = data_frame("example1.frame");
  for (WorldIndex w = 0; w < 5; ++w) CHECK(accessible_cluster(ex1, w).size() == 5);
  CHECK_THROWS_AS(accessible_cluster(ex1, 5), Error);
}

TEST_CASE("property: serialization round-trips, closure is transitive, flags match matrix algebra") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const bool preorder = trial % 2 == 0;
    auto f = oracle::random_frame(n, 0.35, rng, preorder);
    CHECK(parse_frame(serialize_frame(f)) == f);

    // R o R subset of R  <=>  transitive; R^T == R <=> symmetric.
    bool transitive = true, symmetric = true, reflexive = true;
    for (WorldIndex i = 0; i < n; ++i) {
      reflexive = reflexive && f.related(i, i);
      for (WorldIndex j = 0; j < n; ++j) {
        symmetric = symmetric && f.related(i, j) == f.related(j, i);
        bool composed = false;
        for (WorldIndex k = 0; k < n; ++k) composed = composed || (f.related(i, k) && f.related(k, j));
        if (composed && !f.related(i, j)) transitive = false;
      }
    }
    const auto fc = classify(f);
    CHECK(fc.reflexive == reflexive);
    CHECK(fc.transitive == transitive);
    CHECK(fc.symmetric == symmetric);
    if (preorder) CHECK(fc.transitive);
  }
}

TEST_CASE("close transitive reaches the fixpoint on long chains") {
  std::string doc = "designated w0\n";
  std::string decl;
  for (int i = 0; i < 12; ++i) decl += "world w" + std::to_string(i) + "\n";
  for (int i = 11; i > 0; --i)
    doc += "edge w" + std::to_string(i) + " w" + std::to_string(i - 1) + "\n";
  auto f = parse_frame(decl + doc + "close transitive\n");
  for (WorldIndex a = 0; a < 12; ++a)
    for (WorldIndex b = 0; b < 12; ++b)
      for (WorldIndex c = 0; c < 12; ++c)
        if (f.related(a, b) && f.related(b, c)) CHECK(f.related(a, c));
  CHECK(f.related(11, 0));
}
