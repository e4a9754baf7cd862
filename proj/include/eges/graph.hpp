#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eges/ingest.hpp"

namespace eges {

using NodeId = std::uint32_t;

struct Neighbor {
  NodeId node;
  std::uint64_t weight;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct Edge {
  NodeId src;
  NodeId dst;
  std::uint64_t weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Weighted directed item graph. Node indices are dense and assigned in order
// of first insertion; edge weights are positive transition counts and
// self-loops are rejected.
class ItemGraph {
 public:
  NodeId add_node(std::string_view item_id);
  // Adds `weight` to edge src->dst, creating it if absent.
  void add_edge(NodeId src, NodeId dst, std::uint64_t weight = 1);

  std::size_t num_nodes() const { return names_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::uint64_t total_weight() const { return total_weight_; }
  bool empty() const { return names_.empty(); }

  const std::string& name(NodeId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<NodeId> find(std::string_view item_id) const;
  // LookupError for unknown ids.
  NodeId index(std::string_view item_id) const;

  // Sorted by neighbor index.
  std::span<const Neighbor> out_edges(NodeId v) const { return out_.at(v); }
  std::uint64_t out_weight(NodeId v) const { return out_weight_.at(v); }
  std::uint64_t weight(NodeId src, NodeId dst) const;
  bool has_edge(NodeId src, NodeId dst) const { return weight(src, dst) > 0; }

  // All edges ordered by (src, dst).
  std::vector<Edge> edges() const;

  // Same node set and indices, no edges.
  ItemGraph without_edges() const;

  // Equality by item ids, independent of index assignment.
  friend bool operator==(const ItemGraph& a, const ItemGraph& b);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<Neighbor>> out_;
  std::vector<std::uint64_t> out_weight_;
  std::size_t num_edges_ = 0;
  std::uint64_t total_weight_ = 0;
};

// Every consecutive pair inside a session adds one to its edge; pairs never
// span session boundaries.
ItemGraph build_item_graph(std::span<const Session> sessions);

struct Transition {
  NodeId node;
  double probability;
};

// P(j | v) = M_vj / sum_k M_vk over out-neighbors; empty for sinks.
std::vector<Transition> transition_probabilities(const ItemGraph& g, NodeId v);
std::vector<Transition> transition_probabilities(const ItemGraph& g,
                                                 std::string_view item_id);

// `src<TAB>dst<TAB>weight` per edge. Nodes without any edge are written as a
// bare `item_id` line so that reading the file restores the full node set.
void write_edge_list(const ItemGraph& g, std::ostream& out);
ItemGraph read_edge_list(std::istream& in);

}  // namespace eges
