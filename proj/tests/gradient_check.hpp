#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "model_fixtures.hpp"

namespace fixtures {

using eges::BasicModel;
using eges::NodeId;
using eges::Regime;

struct GradientCheck {
  double worst_relative = 0.0;
  double worst_absolute = 0.0;
  int checked = 0;
  int failures = 0;
};

// Central difference of pair_loss in one parameter.
inline double central_difference(BasicModel<double>& m, double& param, NodeId v,
                          NodeId u, int y, double h) {
  const double saved = param;
  param = saved + h;
  const double plus = pair_loss(m, v, u, y);
  param = saved - h;
  const double minus = pair_loss(m, v, u, y);
  param = saved;
  return (plus - minus) / (2.0 * h);
}

inline void compare(GradientCheck& check, double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  ++check.checked;
  check.worst_absolute = std::max(check.worst_absolute, diff);
  const double rel = scale > 0 ? diff / scale : 0.0;
  // Relative error is only meaningful away from zero.
  if (scale > 1e-3) check.worst_relative = std::max(check.worst_relative, rel);
  if (diff >= 1e-8 && rel >= 1e-5) ++check.failures;
}

inline GradientCheck check_instance(Regime regime, std::size_t d, std::size_t n,
                             std::uint64_t seed) {
  auto m = fixtures::random_model<double>(regime, d, n, seed);
  std::mt19937_64 rng(seed ^ 0xabcdef);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(m.num_items() - 1));
  const NodeId v = pick(rng);
  const NodeId u = pick(rng);
  const int y = static_cast<int>(seed % 2);
  const double h = 1e-5;
  const auto grad = compute_gradients(m, v, u, y);

  GradientCheck check;
  for (std::size_t i = 0; i < d; ++i) {
    compare(check, grad.context[i],
            central_difference(m, m.context()[u * d + i], v, u, y, h));
  }
  for (std::size_t s = 0; s <= n; ++s) {
    compare(check, grad.weights[s],
            central_difference(m, m.weights()[v * (n + 1) + s], v, u, y, h));
    const std::size_t row = s == 0 ? v : m.catalog().item_values(v)[s - 1];
    for (std::size_t i = 0; i < d; ++i) {
      compare(check, grad.embeddings[s][i],
              central_difference(m, m.embedding(s)[row * d + i], v, u, y, h));
    }
  }
  return check;
}

}  // namespace fixtures
