#include "eges/walk.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "eges/error.hpp"
#include "text_util.hpp"

namespace eges {

void WalkConfig::validate() const {
  if (walks_per_node < 1) throw ConfigError("walks per node must be >= 1");
  if (walk_length < 1) throw ConfigError("walk length must be >= 1");
}

TransitionSampler::TransitionSampler(const ItemGraph& g)
    : graph_(&g), cumulative_(g.num_nodes()) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    std::uint64_t acc = 0;
    auto& cum = cumulative_[v];
    cum.reserve(g.out_edges(v).size());
    for (const auto& n : g.out_edges(v)) {
      acc += n.weight;
      cum.push_back(acc);
    }
  }
}

bool TransitionSampler::step(NodeId from, Rng& rng, NodeId& to) const {
  const auto& cum = cumulative_[from];
  if (cum.empty()) return false;
  std::uniform_int_distribution<std::uint64_t> pick(0, cum.back() - 1);
  const std::uint64_t r = pick(rng);
  auto it = std::upper_bound(cum.begin(), cum.end(), r);
  to = graph_->out_edges(from)[static_cast<std::size_t>(it - cum.begin())].node;
  return true;
}

Walk random_walk(const TransitionSampler& sampler, NodeId start,
                 std::uint32_t length, Rng& rng) {
  Walk walk;
  walk.reserve(length);
  walk.push_back(start);
  NodeId next = 0;
  while (walk.size() < length && sampler.step(walk.back(), rng, next)) {
    walk.push_back(next);
  }
  return walk;
}

Walk random_walk(const ItemGraph& g, NodeId start, std::uint32_t length,
                 Rng& rng) {
  if (start >= g.num_nodes()) throw LookupError("walk start out of range");
  if (length < 1) throw ConfigError("walk length must be >= 1");
  TransitionSampler sampler(g);
  return random_walk(sampler, start, length, rng);
}

WalkCorpus generate_walks(const ItemGraph& g, const WalkConfig& cfg,
                          unsigned threads) {
  cfg.validate();
  const std::size_t nodes = g.num_nodes();
  const std::size_t total = nodes * cfg.walks_per_node;
  WalkCorpus corpus;
  corpus.walks.resize(total);
  if (total == 0) return corpus;

  TransitionSampler sampler(g);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t round = i / nodes;
      const auto node = static_cast<NodeId>(i % nodes);
      Rng rng = derive_rng(cfg.seed, round, node);
      corpus.walks[i] = random_walk(sampler, node, cfg.walk_length, rng);
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, total);
    return corpus;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(total, t * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return corpus;
}

void write_walks(const WalkCorpus& corpus, const ItemGraph& g,
                 std::ostream& out) {
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i > 0) out << ' ';
      out << g.name(walk[i]);
    }
    out << '\n';
  }
}

namespace {

template <class Resolve>
WalkCorpus parse_walks(std::istream& in, Resolve&& resolve) {
  WalkCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    Walk walk;
    for (auto token : detail::split(line, ' ')) {
      if (token.empty()) {
        throw FormatError("walks line " + std::to_string(lineno) +
                          ": empty token");
      }
      walk.push_back(resolve(token, lineno));
    }
    corpus.walks.push_back(std::move(walk));
  }
  if (in.bad()) throw IoError("failed reading walks");
  return corpus;
}

}  // namespace

WalkCorpus read_walks(std::istream& in, const ItemGraph& g) {
  return parse_walks(in, [&](std::string_view token, std::size_t lineno) {
    auto found = g.find(token);
    if (!found) {
      throw FormatError("walks line " + std::to_string(lineno) +
                        ": unknown item '" + std::string(token) + "'");
    }
    return *found;
  });
}

VocabularyCorpus read_walks(std::istream& in) {
  VocabularyCorpus out;
  std::unordered_map<std::string, NodeId> index;
  out.corpus = parse_walks(in, [&](std::string_view token, std::size_t) {
    auto [it, inserted] = index.try_emplace(
        std::string(token), static_cast<NodeId>(out.vocabulary.size()));
    if (inserted) out.vocabulary.emplace_back(token);
    return it->second;
  });
  return out;
}

}  // namespace eges
