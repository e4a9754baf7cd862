#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eges/graph.hpp"
#include "eges/random.hpp"

namespace eges {

struct WalkConfig {
  std::uint32_t walks_per_node = 20;
  std::uint32_t walk_length = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

using Walk = std::vector<NodeId>;

struct WalkCorpus {
  std::vector<Walk> walks;

  friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;
};

// Samples out-neighbors with probability proportional to integer edge weight.
// Built once per graph; immutable and shareable across threads afterwards.
class TransitionSampler {
 public:
  explicit TransitionSampler(const ItemGraph& g);

  // Returns false at a sink.
  bool step(NodeId from, Rng& rng, NodeId& to) const;

 private:
  const ItemGraph* graph_;
  std::vector<std::vector<std::uint64_t>> cumulative_;
};

// Walk of at most `length` nodes starting at `start`; stops early at a sink.
Walk random_walk(const ItemGraph& g, NodeId start, std::uint32_t length,
                 Rng& rng);
Walk random_walk(const TransitionSampler& sampler, NodeId start,
                 std::uint32_t length, Rng& rng);

// walks_per_node * |V| walks in (round, node) order. Each walk draws from its
// own stream derived from (seed, round, node), so the corpus does not depend
// on `threads`.
WalkCorpus generate_walks(const ItemGraph& g, const WalkConfig& cfg,
                          unsigned threads = 1);

// One walk per line, item ids separated by single spaces.
void write_walks(const WalkCorpus& corpus, const ItemGraph& g,
                 std::ostream& out);
// Tokens must be nodes of `g`; FormatError naming the first unknown token.
WalkCorpus read_walks(std::istream& in, const ItemGraph& g);

struct VocabularyCorpus {
  std::vector<std::string> vocabulary;  // node index -> item id
  WalkCorpus corpus;
};
// Without a graph the vocabulary is taken from the file in order of first
// appearance.
VocabularyCorpus read_walks(std::istream& in);

}  // namespace eges
