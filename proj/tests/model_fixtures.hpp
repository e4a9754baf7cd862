#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eges/model.hpp"

namespace fixtures {

inline std::vector<std::string> item_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("item" + std::to_string(i));
  return out;
}

// Random catalog over `items` items with `types` types of `vocab` values.
inline eges::SideInfoCatalog random_catalog(std::size_t items, std::size_t types,
                                            std::uint32_t vocab,
                                            std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, vocab - 1);
  std::vector<std::uint32_t> values(items * types);
  for (auto& v : values) v = pick(rng);
  return eges::SideInfoCatalog::from_indices(
      items, std::vector<std::uint32_t>(types, vocab), std::move(values));
}

// Model with every parameter drawn from N(0, scale^2).
template <class T>
eges::BasicModel<T> random_model(eges::Regime regime, std::size_t dim,
                                 std::size_t types, std::uint64_t seed,
                                 std::size_t items = 6, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  auto catalog = random_catalog(items, types, 3, rng);
  eges::BasicModel<T> m(regime, dim, item_names(items), catalog);
  std::normal_distribution<double> normal(0.0, scale);
  for (std::size_t s = 0; s <= types; ++s) {
    for (auto& x : m.embedding(s)) x = static_cast<T>(normal(rng));
  }
  for (auto& x : m.context()) x = static_cast<T>(normal(rng));
  if (regime == eges::Regime::kEges) {
    for (auto& x : m.weights()) x = static_cast<T>(normal(rng));
  }
  return m;
}

// Loss recomputed from the raw parameters without library helpers.
inline double oracle_loss(const eges::BasicModel<double>& m, eges::NodeId v,
                          eges::NodeId u, int y) {
  const std::size_t d = m.dim();
  const std::size_t k = m.num_types() + 1;
  std::vector<double> coef(k, 1.0 / static_cast<double>(k));
  if (m.regime() == eges::Regime::kEges) {
    double total = 0.0;
    for (std::size_t s = 0; s < k; ++s) total += std::exp(m.weights()[v * k + s]);
    for (std::size_t s = 0; s < k; ++s) coef[s] = std::exp(m.weights()[v * k + s]) / total;
  }
  double x = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double h = coef[0] * m.embedding(0)[v * d + i];
    for (std::size_t s = 1; s < k; ++s) {
      const std::size_t row = m.catalog().values()[v * (k - 1) + (s - 1)];
      h += coef[s] * m.embedding(s)[row * d + i];
    }
    x += h * m.context()[u * d + i];
  }
  double sig = 1.0 / (1.0 + std::exp(-x));
  sig = std::min(std::max(sig, 1e-12), 1.0 - 1e-12);
  return -(y * std::log(sig) + (1 - y) * std::log(1.0 - sig));
}

}  // namespace fixtures
