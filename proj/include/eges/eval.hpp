#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "eges/graph.hpp"
#include "eges/model.hpp"

namespace eges {

struct NodePair {
  NodeId first;
  NodeId second;

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct LinkPredSplit {
  ItemGraph train_graph;            // all nodes, held-out edges removed
  std::vector<NodePair> positives;  // removed directed edges
  std::vector<NodePair> negatives;  // unordered pairs with no edge either way
};

// Removes floor(ratio * |E|) edges chosen uniformly without replacement and
// draws as many distinct non-adjacent node pairs as negatives.
LinkPredSplit split_edges(const ItemGraph& g, double ratio, std::uint64_t seed);

// Hidden representations H_v of every item, precomputed for scoring.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, std::vector<float> rows);
  static EmbeddingTable from_model(const Model& m);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size() / dim_; }
  std::span<const float> row(NodeId v) const {
    return {rows_.data() + std::size_t{v} * dim_, dim_};
  }
  // Copy with every non-zero row scaled to unit length (cosine similarity).
  EmbeddingTable normalized() const;

 private:
  std::size_t dim_;
  std::vector<float> rows_;
};

// H_i . H_j accumulated in double.
double score_pair(const EmbeddingTable& table, NodeId i, NodeId j);
double score_pair(const Model& m, NodeId i, NodeId j);

// P(pos > neg) + 0.5 P(pos == neg) over all pairs; ConfigError on empty input.
double auc(std::span<const double> positives, std::span<const double> negatives);

double evaluate_link_prediction(const Model& m, const LinkPredSplit& split);

struct Scored {
  NodeId item;
  double score;
};

// Highest-scoring items other than v, descending; ties by ascending index.
std::vector<Scored> topk_similar(const EmbeddingTable& table, NodeId v,
                                 std::size_t k);
// Same ranking for an arbitrary query vector, over all items.
std::vector<Scored> topk_by_vector(const EmbeddingTable& table,
                                   std::span<const float> query,
                                   std::size_t k);

// Mean-centred projection onto the leading principal components. Each
// component is oriented so that its first non-zero loading is positive.
std::vector<std::vector<double>> pca_project(
    std::span<const std::vector<double>> vectors, std::size_t out_dim = 2);

// `i<TAB>j` per pair, by item id.
void write_pairs(std::span<const NodePair> pairs, const ItemGraph& g,
                 std::ostream& out);
std::vector<NodePair> read_pairs(std::istream& in, const ItemGraph& g);

// {"auc": ..., "positives": ..., "negatives": ..., "seed": ...}
void write_auc_report(std::ostream& out, double auc_value,
                      std::size_t positives, std::size_t negatives,
                      std::uint64_t seed);

}  // namespace eges
