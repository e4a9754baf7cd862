#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "eges/error.hpp"
#include "eges/eval.hpp"
#include "model_fixtures.hpp"

using namespace eges;

namespace {

// Directed graph with `edges` random edges over `nodes` nodes.
ItemGraph random_graph(std::size_t nodes, std::size_t edges, std::uint64_t seed) {
  ItemGraph g;
  for (std::size_t i = 0; i < nodes; ++i) g.add_node("n" + std::to_string(i));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(nodes - 1));
  while (g.num_edges() < edges) {
    NodeId a = pick(rng), b = pick(rng);
    if (a != b) g.add_edge(a, b);
  }
  return g;
}

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double total = 0.0;
  for (double p : pos) {
    for (double n : neg) total += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return total / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][i];
  std::sort(out.rbegin(), out.rend());
  return out;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("split_edges counts") {
  auto g = random_graph(12, 9, 1);
  auto split = split_edges(g, 1.0 / 3.0, 5);
  CHECK(split.positives.size() == 3);
  CHECK(split.negatives.size() == 3);
  CHECK(split.train_graph.num_edges() == 6);
  CHECK(split.train_graph.num_nodes() == 12);
}

TEST_CASE("split_edges invariants") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto g = random_graph(10 + seed * 2, 10 + seed * 2, seed);
    auto split = split_edges(g, 0.25, seed);
    const auto held = static_cast<std::size_t>(std::floor(0.25 * g.num_edges()));
    REQUIRE(split.positives.size() == held);
    REQUIRE(split.negatives.size() == held);
    CHECK(split.train_graph.num_edges() + held == g.num_edges());

    std::set<NodePair> pos(split.positives.begin(), split.positives.end());
    CHECK(pos.size() == held);
    for (const auto& p : split.positives) {
      CHECK(g.has_edge(p.first, p.second));
      CHECK_FALSE(split.train_graph.has_edge(p.first, p.second));
    }
    std::set<NodePair> neg;
    for (const auto& p : split.negatives) {
      CHECK(p.first != p.second);
      CHECK_FALSE(g.has_edge(p.first, p.second));
      CHECK_FALSE(g.has_edge(p.second, p.first));
      neg.insert({std::min(p.first, p.second), std::max(p.first, p.second)});
    }
    CHECK(neg.size() == held);
    for (const auto& e : split.train_graph.edges()) CHECK(g.has_edge(e.src, e.dst));
  }
}

TEST_CASE("split_edges is deterministic and validates input") {
  auto g = random_graph(30, 60, 3);
  auto a = split_edges(g, 0.2, 9);
  auto b = split_edges(g, 0.2, 9);
  CHECK(a.positives == b.positives);
  CHECK(a.negatives == b.negatives);
  CHECK(a.train_graph == b.train_graph);
  CHECK_THROWS_AS(split_edges(g, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split_edges(g, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(split_edges(random_graph(3, 2, 1), 0.5, 1), ConfigError);
  // Complete digraph on 3 nodes has no free pair.
  CHECK_THROWS_AS(split_edges(random_graph(3, 6, 1), 0.5, 1), ConfigError);
}

TEST_CASE("score_pair examples") {
  EmbeddingTable t(2, {1, 0, 0, 1, 3, 4});
  CHECK(score_pair(t, 0, 1) == 0.0);
  CHECK(score_pair(t, 0, 2) == 3.0);
  CHECK(score_pair(t, 2, 2) == 25.0);
  CHECK_THROWS_AS(score_pair(t, 0, 3), LookupError);
}

TEST_CASE("score_pair matches a direct dot product and is symmetric") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto m = fixtures::random_model<float>(Regime::kEges, 3 + seed * 5, 2, seed, 8);
    auto table = EmbeddingTable::from_model(m);
    for (NodeId i = 0; i < 8; ++i) {
      for (NodeId j = 0; j < 8; ++j) {
        auto hi = aggregate_hidden(m, i);
        auto hj = aggregate_hidden(m, j);
        double oracle = 0.0;
        for (std::size_t k = 0; k < hi.size(); ++k) oracle += double(hi[k]) * double(hj[k]);
        CHECK(std::abs(score_pair(table, i, j) - oracle) <= 1e-12 * (1 + std::abs(oracle)));
        CHECK(score_pair(table, i, j) == score_pair(table, j, i));
        CHECK(score_pair(m, i, j) == score_pair(table, i, j));
      }
    }
  }
}

TEST_CASE("auc examples") {
  const std::vector<double> pos{0.9, 0.8}, neg{0.1, 0.2};
  CHECK(auc(pos, neg) == 1.0);
  const std::vector<double> same{0.5, 0.5};
  CHECK(auc(same, same) == 0.5);
  const std::vector<double> p2{0.9, 0.3}, n2{0.5, 0.1};
  CHECK(auc(p2, n2) == 0.75);
  CHECK_THROWS_AS(auc(std::vector<double>{}, neg), ConfigError);
  CHECK_THROWS_AS(auc(pos, std::vector<double>{}), ConfigError);
}

TEST_CASE("auc equals the pairwise count and complements exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> size(1, 40), value(0, 9);
    std::vector<double> pos(size(rng)), neg(size(rng));
    for (auto& x : pos) x = value(rng) * 0.1;
    for (auto& x : neg) x = value(rng) * 0.1;
    const double a = auc(pos, neg);
    CHECK(a == brute_auc(pos, neg));
    CHECK(a + auc(neg, pos) == 1.0);
    std::vector<double> tp, tn;
    for (double x : pos) tp.push_back(std::exp(3 * x) - 7);
    for (double x : neg) tn.push_back(std::exp(3 * x) - 7);
    CHECK(auc(tp, tn) == a);
  }
}

TEST_CASE("link prediction with identical embeddings scores 0.5") {
  auto g = random_graph(20, 50, 4);
  auto split = split_edges(g, 0.2, 4);
  BasicModel<float> m(Regime::kBge, 4, g.names(), SideInfoCatalog::none(20));
  std::fill(m.embedding(0).begin(), m.embedding(0).end(), 0.25f);
  CHECK(evaluate_link_prediction(m, split) == 0.5);
}

TEST_CASE("topk_similar examples") {
  EmbeddingTable t(2, {1, 0, 0.9f, 0.1f, 0, 1, 1, 0});
  auto top = topk_similar(t, 0, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].item == 3);
  CHECK(top[1].item == 1);
  auto all = topk_similar(t, 0, 10);
  CHECK(all.size() == 3);
  CHECK(all.back().item == 2);
  CHECK_THROWS_AS(topk_similar(t, 0, 0), ConfigError);
  CHECK_THROWS_AS(topk_similar(t, 4, 1), LookupError);
}

TEST_CASE("topk_similar matches a full sort and ignores positive scaling") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> coarse(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 25, d = 3;
    std::vector<float> rows(n * d), scaled(n * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i] = static_cast<float>(coarse(rng));
      scaled[i] = rows[i] * 4.0f;
    }
    EmbeddingTable t(d, rows), s(d, scaled);
    const NodeId v = trial % n;
    std::vector<Scored> expected;
    for (NodeId u = 0; u < n; ++u) {
      if (u != v) expected.push_back({u, score_pair(t, v, u)});
    }
    std::stable_sort(expected.begin(), expected.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    auto got = topk_similar(t, v, 10);
    auto got_scaled = topk_similar(s, v, 10);
    REQUIRE(got.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(got[i].item == expected[i].item);
      CHECK(got[i].score == expected[i].score);
      CHECK(got_scaled[i].item == got[i].item);
    }
  }
}

TEST_CASE("normalized table gives cosine scores") {
  EmbeddingTable t(2, {3, 4, 0, 0, 0, 2});
  auto n = t.normalized();
  CHECK(score_pair(n, 0, 0) == doctest::Approx(1.0));
  CHECK(score_pair(n, 0, 2) == doctest::Approx(0.8));
  CHECK(score_pair(n, 1, 1) == 0.0);
}

TEST_CASE("pca of planar points preserves distances") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::vector<double> u{1, 2, 2, 0, 1}, w{0, 1, -1, 3, 1};
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 30; ++i) {
    const double a = normal(rng), b = normal(rng);
    std::vector<double> p(5);
    for (int k = 0; k < 5; ++k) p[k] = 4.0 + a * u[k] + b * w[k];
    points.push_back(p);
  }
  auto proj = pca_project(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      CHECK(std::abs(dist(proj[i], proj[j]) - dist(points[i], points[j])) <= 1e-9);
    }
  }
}

TEST_CASE("pca maps duplicates together and variances match the spectrum") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = 6;
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = normal(rng) * (1.0 + static_cast<double>(k));
    points.push_back(p);
  }
  points.push_back(points[3]);
  auto proj = pca_project(points, 3);
  CHECK(proj.back() == proj[3]);

  std::vector<double> mean(d, 0.0);
  for (const auto& p : points)
    for (std::size_t k = 0; k < d; ++k) mean[k] += p[k] / static_cast<double>(points.size());
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& p : points)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cov[a][b] += (p[a] - mean[a]) * (p[b] - mean[b]) / static_cast<double>(points.size() - 1);
  auto eig = jacobi_eigenvalues(cov);
  for (std::size_t c = 0; c < 3; ++c) {
    double var = 0.0;
    for (const auto& q : proj) var += q[c] * q[c];
    var /= static_cast<double>(points.size() - 1);
    CHECK(var == doctest::Approx(eig[c]).epsilon(1e-9));
  }
}

TEST_CASE("pca rejects degenerate input") {
  std::vector<std::vector<double>> one{{1.0, 2.0}};
  CHECK_THROWS_AS(pca_project(one), ConfigError);
  std::vector<std::vector<double>> same{{1.0, 2.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(pca_project(same), ConfigError);
  std::vector<std::vector<double>> narrow{{1.0}, {2.0}};
  CHECK_THROWS_AS(pca_project(narrow), ConfigError);
  std::vector<std::vector<double>> ragged{{1.0, 2.0}, {2.0}};
  CHECK_THROWS_AS(pca_project(ragged), ConfigError);
}

TEST_CASE("pairs round trip and AUC report") {
  auto g = random_graph(10, 20, 2);
  auto split = split_edges(g, 0.3, 2);
  std::ostringstream out;
  write_pairs(split.positives, g, out);
  std::istringstream in(out.str());
  CHECK(read_pairs(in, g) == split.positives);
  std::istringstream bad("n1\tzzz\n");
  CHECK_THROWS(read_pairs(bad, g));

  std::ostringstream report;
  write_auc_report(report, 0.75, 3, 3, 7);
  CHECK(report.str().find("\"auc\"") != std::string::npos);
  CHECK(report.str().find("\"seed\":7") != std::string::npos);
}
