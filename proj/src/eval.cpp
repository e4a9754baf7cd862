#include "eges/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <Eigen/Dense>
#include "json.hpp"

#include "eges/error.hpp"
#include "eges/kernels.hpp"
#include "text_util.hpp"

namespace eges {

LinkPredSplit split_edges(const ItemGraph& g, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0, 1)");
  }
  if (g.num_edges() < 3) throw ConfigError("split needs at least 3 edges");

  Rng rng = derive_rng(seed, 0x73706c6974 /* "split" */);
  std::vector<Edge> edges = g.edges();
  const auto held_out =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(edges.size())));
  std::shuffle(edges.begin(), edges.end(), rng);

  LinkPredSplit split;
  split.train_graph = g.without_edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i < held_out) {
      split.positives.push_back({edges[i].src, edges[i].dst});
    } else {
      split.train_graph.add_edge(edges[i].src, edges[i].dst, edges[i].weight);
    }
  }

  auto adjacent = [&](NodeId a, NodeId b) {
    return g.has_edge(a, b) || g.has_edge(b, a);
  };
  const std::uint64_t n = g.num_nodes();
  std::set<NodePair> adjacent_pairs;
  for (const auto& e : edges) {
    adjacent_pairs.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
  }
  const std::uint64_t free_pairs = n * (n - 1) / 2 - adjacent_pairs.size();
  if (free_pairs < held_out) {
    throw ConfigError("graph too dense to draw " + std::to_string(held_out) +
                      " non-adjacent pairs");
  }

  if (held_out * 2 <= free_pairs) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::set<NodePair> seen;
    while (split.negatives.size() < held_out) {
      NodeId a = pick(rng);
      NodeId b = pick(rng);
      if (a == b || adjacent(a, b)) continue;
      NodePair p{std::min(a, b), std::max(a, b)};
      if (seen.insert(p).second) split.negatives.push_back(p);
    }
  } else {
    std::vector<NodePair> pool;
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        if (!adjacent(a, b)) pool.push_back({a, b});
      }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(held_out);
    split.negatives = std::move(pool);
  }
  return split;
}

EmbeddingTable::EmbeddingTable(std::size_t dim, std::vector<float> rows)
    : dim_(dim), rows_(std::move(rows)) {
  if (dim_ == 0 || rows_.size() % dim_ != 0) {
    throw ConfigError("embedding table shape mismatch");
  }
}

EmbeddingTable EmbeddingTable::from_model(const Model& m) {
  std::vector<float> rows;
  rows.reserve(m.num_items() * m.dim());
  for (NodeId v = 0; v < m.num_items(); ++v) {
    auto h = aggregate_hidden(m, v);
    rows.insert(rows.end(), h.begin(), h.end());
  }
  return EmbeddingTable(m.dim(), std::move(rows));
}

EmbeddingTable EmbeddingTable::normalized() const {
  std::vector<float> rows = rows_;
  for (std::size_t v = 0; v < size(); ++v) {
    float* r = rows.data() + v * dim_;
    const double norm = std::sqrt(kernels::active().dot_wide(r, r, dim_));
    if (norm > 0.0) {
      for (std::size_t i = 0; i < dim_; ++i) {
        r[i] = static_cast<float>(r[i] / norm);
      }
    }
  }
  return EmbeddingTable(dim_, std::move(rows));
}

double score_pair(const EmbeddingTable& table, NodeId i, NodeId j) {
  if (i >= table.size() || j >= table.size()) {
    throw LookupError("item index out of range");
  }
  return kernels::active().dot_wide(table.row(i).data(), table.row(j).data(),
                                    table.dim());
}

double score_pair(const Model& m, NodeId i, NodeId j) {
  const auto hi = aggregate_hidden(m, i);
  const auto hj = aggregate_hidden(m, j);
  return kernels::active().dot_wide(hi.data(), hj.data(), m.dim());
}

double auc(std::span<const double> positives,
           std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw ConfigError("AUC needs at least one positive and one negative");
  }
  std::vector<double> sorted(negatives.begin(), negatives.end());
  std::sort(sorted.begin(), sorted.end());
  // Twice the Mann-Whitney statistic, kept integral so the result is exact.
  std::uint64_t twice_wins = 0;
  for (double p : positives) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), p);
    auto hi = std::upper_bound(lo, sorted.end(), p);
    twice_wins += 2 * static_cast<std::uint64_t>(lo - sorted.begin()) +
                  static_cast<std::uint64_t>(hi - lo);
  }
  const double pairs = 2.0 * static_cast<double>(positives.size()) *
                       static_cast<double>(negatives.size());
  return static_cast<double>(twice_wins) / pairs;
}

double evaluate_link_prediction(const Model& m, const LinkPredSplit& split) {
  const EmbeddingTable table = EmbeddingTable::from_model(m);
  std::vector<double> pos;
  std::vector<double> neg;
  for (const auto& p : split.positives) {
    pos.push_back(score_pair(table, p.first, p.second));
  }
  for (const auto& p : split.negatives) {
    neg.push_back(score_pair(table, p.first, p.second));
  }
  return auc(pos, neg);
}

namespace {

std::vector<Scored> top_k(std::vector<Scored> all, std::size_t k) {
  auto better = [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.item < b.item;
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), better);
  all.resize(k);
  return all;
}

}  // namespace

std::vector<Scored> topk_similar(const EmbeddingTable& table, NodeId v,
                                 std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (v >= table.size()) throw LookupError("item index out of range");
  std::vector<Scored> all;
  all.reserve(table.size());
  for (NodeId j = 0; j < table.size(); ++j) {
    if (j != v) all.push_back({j, score_pair(table, v, j)});
  }
  return top_k(std::move(all), k);
}

std::vector<Scored> topk_by_vector(const EmbeddingTable& table,
                                   std::span<const float> query,
                                   std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (query.size() != table.dim()) throw ConfigError("query dimension mismatch");
  std::vector<Scored> all;
  all.reserve(table.size());
  for (NodeId j = 0; j < table.size(); ++j) {
    all.push_back({j, kernels::active().dot_wide(query.data(),
                                                 table.row(j).data(),
                                                 table.dim())});
  }
  return top_k(std::move(all), k);
}

std::vector<std::vector<double>> pca_project(
    std::span<const std::vector<double>> vectors, std::size_t out_dim) {
  if (vectors.size() < 2) throw ConfigError("PCA needs at least two vectors");
  const std::size_t d = vectors.front().size();
  if (d < out_dim || out_dim < 1) {
    throw ConfigError("PCA output dimension exceeds input dimension");
  }
  const auto rows = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& v = vectors[static_cast<std::size_t>(r)];
    if (v.size() != d) throw ConfigError("PCA vectors differ in dimension");
    for (std::size_t c = 0; c < d; ++c) x(r, static_cast<Eigen::Index>(c)) = v[c];
  }
  bool distinct = false;
  for (Eigen::Index r = 1; r < rows && !distinct; ++r) {
    distinct = x.row(r) != x.row(0);
  }
  if (!distinct) throw ConfigError("PCA needs at least two distinct vectors");

  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(rows - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues ascend; take the trailing columns in reverse.
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(d),
                        static_cast<Eigen::Index>(out_dim));
  for (std::size_t c = 0; c < out_dim; ++c) {
    Eigen::VectorXd axis =
        solver.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - c));
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      if (std::abs(axis(i)) > 1e-12) {
        if (axis(i) < 0) axis = -axis;
        break;
      }
    }
    basis.col(static_cast<Eigen::Index>(c)) = axis;
  }
  const Eigen::MatrixXd projected = x * basis;
  std::vector<std::vector<double>> out(vectors.size(),
                                       std::vector<double>(out_dim));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      out[static_cast<std::size_t>(r)][c] =
          projected(r, static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

void write_pairs(std::span<const NodePair> pairs, const ItemGraph& g,
                 std::ostream& out) {
  for (const auto& p : pairs) {
    out << g.name(p.first) << '\t' << g.name(p.second) << '\n';
  }
}

std::vector<NodePair> read_pairs(std::istream& in, const ItemGraph& g) {
  std::vector<NodePair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2) {
      throw FormatError("pairs line " + std::to_string(lineno) +
                        ": expected i<TAB>j");
    }
    pairs.push_back({g.index(cols[0]), g.index(cols[1])});
  }
  return pairs;
}

void write_auc_report(std::ostream& out, double auc_value,
                      std::size_t positives, std::size_t negatives,
                      std::uint64_t seed) {
  nlohmann::json report = {{"auc", auc_value},
                           {"positives", positives},
                           {"negatives", negatives},
                           {"seed", seed}};
  out << report.dump() << '\n';
}

}  // namespace eges
