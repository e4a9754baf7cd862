#include <cmath>
#include <sstream>

#include "doctest.h"
#include "eges/error.hpp"
#include "eges/walk.hpp"

using namespace eges;

namespace {

ItemGraph chain() {
  ItemGraph g;
  NodeId a = g.add_node("A"), b = g.add_node("B"), c = g.add_node("C");
  g.add_edge(a, b);
  g.add_edge(b, c);
  return g;
}

ItemGraph random_graph(std::uint64_t seed, int nodes, int edges) {
  Rng rng(seed);
  ItemGraph g;
  for (int i = 0; i < nodes; ++i) g.add_node("n" + std::to_string(i));
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(nodes - 1));
  std::uniform_int_distribution<std::uint64_t> weight(1, 5);
  for (int e = 0; e < edges; ++e) {
    NodeId a = pick(rng), b = pick(rng);
    if (a != b) g.add_edge(a, b, weight(rng));
  }
  return g;
}

}  // namespace

TEST_CASE("walk on a chain stops at the sink") {
  auto g = chain();
  Rng rng(1);
  CHECK(random_walk(g, g.index("A"), 5, rng) == Walk{0, 1, 2});
  CHECK(random_walk(g, g.index("C"), 10, rng) == Walk{2});
  CHECK(random_walk(g, g.index("A"), 1, rng) == Walk{0});
  CHECK_THROWS_AS(random_walk(g, 7, 3, rng), LookupError);
}

TEST_CASE("first steps follow the transition law") {
  ItemGraph g;
  NodeId v = g.add_node("v"), a = g.add_node("A"), b = g.add_node("B");
  g.add_edge(v, a, 3);
  g.add_edge(v, b, 1);
  TransitionSampler sampler(g);
  Rng rng(42);
  const int draws = 100000;
  int to_a = 0;
  for (int i = 0; i < draws; ++i) {
    NodeId next = 0;
    REQUIRE(sampler.step(v, rng, next));
    to_a += next == a;
  }
  const double frac = static_cast<double>(to_a) / draws;
  CHECK(std::abs(frac - 0.75) <= 0.01);
  // 3 sigma of the binomial
  CHECK(std::abs(frac - 0.75) <= 3.0 * std::sqrt(0.75 * 0.25 / draws));
}

TEST_CASE("generate_walks produces one walk per round and node") {
  auto g = random_graph(3, 3, 6);
  WalkConfig cfg;
  cfg.walks_per_node = 20;
  auto corpus = generate_walks(g, cfg);
  REQUIRE(corpus.walks.size() == 60);
  for (std::size_t i = 0; i < corpus.walks.size(); ++i) {
    CHECK(corpus.walks[i].front() == i % 3);
  }
}

TEST_CASE("generate_walks is reproducible and independent of threads") {
  auto g = random_graph(8, 200, 1200);
  WalkConfig cfg;
  cfg.seed = 99;
  auto a = generate_walks(g, cfg);
  auto b = generate_walks(g, cfg);
  auto c = generate_walks(g, cfg, 4);
  CHECK(a == b);
  CHECK(a == c);
  cfg.seed = 100;
  CHECK_FALSE(generate_walks(g, cfg) == a);
}

TEST_CASE("walks only follow graph edges and respect the length") {
  auto g = random_graph(21, 150, 600);
  WalkConfig cfg;
  cfg.walk_length = 7;
  cfg.walks_per_node = 5;
  auto corpus = generate_walks(g, cfg);
  CHECK(corpus.walks.size() == cfg.walks_per_node * g.num_nodes());
  for (const auto& walk : corpus.walks) {
    REQUIRE_FALSE(walk.empty());
    CHECK(walk.size() <= cfg.walk_length);
    for (std::size_t i = 1; i < walk.size(); ++i) {
      CHECK(g.has_edge(walk[i - 1], walk[i]));
    }
    if (walk.size() < cfg.walk_length) CHECK(g.out_edges(walk.back()).empty());
  }
}

TEST_CASE("empty graph yields an empty corpus") {
  CHECK(generate_walks(ItemGraph{}, WalkConfig{}).walks.empty());
}

TEST_CASE("walk config validation") {
  WalkConfig cfg;
  cfg.walk_length = 0;
  CHECK_THROWS_AS(generate_walks(chain(), cfg), ConfigError);
}

TEST_CASE("walks file format and round trip") {
  auto g = chain();
  WalkCorpus corpus{{Walk{0, 1, 2}, Walk{1}}};
  std::ostringstream out;
  write_walks(corpus, g, out);
  CHECK(out.str() == "A B C\nB\n");
  std::istringstream in(out.str());
  CHECK(read_walks(in, g) == corpus);

  std::istringstream in2(out.str());
  auto vc = read_walks(in2);
  CHECK(vc.vocabulary == std::vector<std::string>{"A", "B", "C"});
  CHECK(vc.corpus == corpus);
}

TEST_CASE("walks file with an unknown token names it") {
  auto g = chain();
  std::istringstream in("A B\nA Q\n");
  CHECK_THROWS_WITH_AS(read_walks(in, g), doctest::Contains("'Q'"), FormatError);
}
