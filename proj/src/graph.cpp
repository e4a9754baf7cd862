#include "eges/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "eges/error.hpp"
#include "text_util.hpp"

namespace eges {

NodeId ItemGraph::add_node(std::string_view item_id) {
  if (auto found = find(item_id)) return *found;
  auto id = static_cast<NodeId>(names_.size());
  names_.emplace_back(item_id);
  index_.emplace(names_.back(), id);
  out_.emplace_back();
  out_weight_.push_back(0);
  return id;
}

void ItemGraph::add_edge(NodeId src, NodeId dst, std::uint64_t weight) {
  if (src >= num_nodes() || dst >= num_nodes()) {
    throw LookupError("edge endpoint out of range");
  }
  if (src == dst) throw FormatError("self-loop on " + names_[src]);
  if (weight == 0) return;
  auto& adj = out_[src];
  auto it = std::lower_bound(
      adj.begin(), adj.end(), dst,
      [](const Neighbor& n, NodeId target) { return n.node < target; });
  if (it != adj.end() && it->node == dst) {
    it->weight += weight;
  } else {
    adj.insert(it, Neighbor{dst, weight});
    ++num_edges_;
  }
  out_weight_[src] += weight;
  total_weight_ += weight;
}

std::optional<NodeId> ItemGraph::find(std::string_view item_id) const {
  auto it = index_.find(std::string(item_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId ItemGraph::index(std::string_view item_id) const {
  if (auto found = find(item_id)) return *found;
  throw LookupError("unknown item '" + std::string(item_id) + "'");
}

std::uint64_t ItemGraph::weight(NodeId src, NodeId dst) const {
  const auto& adj = out_.at(src);
  auto it = std::lower_bound(
      adj.begin(), adj.end(), dst,
      [](const Neighbor& n, NodeId target) { return n.node < target; });
  return (it != adj.end() && it->node == dst) ? it->weight : 0;
}

std::vector<Edge> ItemGraph::edges() const {
  std::vector<Edge> all;
  all.reserve(num_edges_);
  for (NodeId v = 0; v < num_nodes(); ++v) {
    for (const auto& n : out_[v]) all.push_back(Edge{v, n.node, n.weight});
  }
  return all;
}

ItemGraph ItemGraph::without_edges() const {
  ItemGraph g;
  for (const auto& name : names_) g.add_node(name);
  return g;
}

bool operator==(const ItemGraph& a, const ItemGraph& b) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) {
    return false;
  }
  using Named = std::tuple<std::string_view, std::string_view, std::uint64_t>;
  auto named = [](const ItemGraph& g) {
    std::vector<Named> out;
    for (const auto& e : g.edges()) {
      out.emplace_back(g.name(e.src), g.name(e.dst), e.weight);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::set<std::string_view> na(a.names_.begin(), a.names_.end());
  std::set<std::string_view> nb(b.names_.begin(), b.names_.end());
  return na == nb && named(a) == named(b);
}

ItemGraph build_item_graph(std::span<const Session> sessions) {
  ItemGraph g;
  for (const auto& s : sessions) {
    NodeId prev = 0;
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      NodeId cur = g.add_node(s.items[i]);
      // Collapsed sessions never repeat an item back to back; tolerate
      // hand-built input that does.
      if (i > 0 && cur != prev) g.add_edge(prev, cur);
      prev = cur;
    }
  }
  return g;
}

std::vector<Transition> transition_probabilities(const ItemGraph& g,
                                                 NodeId v) {
  if (v >= g.num_nodes()) throw LookupError("node index out of range");
  std::vector<Transition> out;
  const double total = static_cast<double>(g.out_weight(v));
  for (const auto& n : g.out_edges(v)) {
    out.push_back(Transition{n.node, static_cast<double>(n.weight) / total});
  }
  return out;
}

std::vector<Transition> transition_probabilities(const ItemGraph& g,
                                                 std::string_view item_id) {
  return transition_probabilities(g, g.index(item_id));
}

void write_edge_list(const ItemGraph& g, std::ostream& out) {
  std::vector<bool> touched(g.num_nodes(), false);
  for (const auto& e : g.edges()) touched[e.src] = touched[e.dst] = true;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!touched[v]) out << g.name(v) << '\n';
    for (const auto& n : g.out_edges(v)) {
      out << g.name(v) << '\t' << g.name(n.node) << '\t' << n.weight << '\n';
    }
  }
}

ItemGraph read_edge_list(std::istream& in) {
  ItemGraph g;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("edge list line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() == 1) {
      g.add_node(cols[0]);
      continue;
    }
    if (cols.size() != 3) fail("expected src<TAB>dst<TAB>weight");
    if (cols[0].empty() || cols[1].empty()) fail("empty item id");
    std::uint64_t w = 0;
    if (!detail::parse_int(cols[2], w) || w == 0) {
      fail("weight must be a positive integer, got '" + std::string(cols[2]) +
           "'");
    }
    if (cols[0] == cols[1]) fail("self-loop");
    NodeId src = g.add_node(cols[0]);
    NodeId dst = g.add_node(cols[1]);
    g.add_edge(src, dst, w);
  }
  if (in.bad()) throw IoError("failed reading edge list");
  return g;
}

}  // namespace eges
