#include "eges/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eges/error.hpp"
#include "linalg.hpp"

namespace eges {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kBge:
      return "BGE";
    case Regime::kGes:
      return "GES";
    case Regime::kEges:
      return "EGES";
  }
  return "?";
}

Regime parse_regime(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "bge") return Regime::kBge;
  if (lower == "ges") return Regime::kGes;
  if (lower == "eges") return Regime::kEges;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
}

template <class T>
BasicModel<T>::BasicModel(Regime regime, std::size_t dim,
                          std::vector<std::string> item_ids,
                          SideInfoCatalog catalog)
    : regime_(regime),
      dim_(dim),
      item_ids_(std::move(item_ids)),
      catalog_(std::move(catalog)) {
  if (dim_ == 0) throw ConfigError("dimension must be >= 1");
  if (catalog_.num_items() != item_ids_.size()) {
    throw ConfigError("catalog has " + std::to_string(catalog_.num_items()) +
                      " items, model has " + std::to_string(item_ids_.size()));
  }
  if (regime_ == Regime::kBge && catalog_.num_types() != 0) {
    throw ConfigError("BGE takes no side information");
  }
  const std::size_t n = catalog_.num_types();
  embeddings_.emplace_back(num_items() * dim_, T{0});
  for (std::size_t s = 0; s < n; ++s) {
    embeddings_.emplace_back(std::size_t{catalog_.vocab_size(s)} * dim_, T{0});
  }
  weights_.assign(num_items() * (n + 1), T{0});
  context_.assign(num_items() * dim_, T{0});
}

template <class T>
NodeId BasicModel<T>::item_index(std::string_view item_id) const {
  auto it = std::find(item_ids_.begin(), item_ids_.end(), item_id);
  if (it == item_ids_.end()) {
    throw LookupError("unknown item '" + std::string(item_id) + "'");
  }
  return static_cast<NodeId>(it - item_ids_.begin());
}

template <class T>
T* BasicModel<T>::source_row(std::size_t type, NodeId v) {
  const std::size_t row = type == 0 ? v : catalog_.item_values(v)[type - 1];
  return embeddings_[type].data() + row * dim_;
}

template <class T>
const T* BasicModel<T>::source_row(std::size_t type, NodeId v) const {
  const std::size_t row = type == 0 ? v : catalog_.item_values(v)[type - 1];
  return embeddings_[type].data() + row * dim_;
}

template <class T>
bool BasicModel<T>::all_finite() const {
  auto finite = [](const std::vector<T>& xs) {
    return std::all_of(xs.begin(), xs.end(),
                       [](T x) { return std::isfinite(x); });
  };
  return finite(weights_) && finite(context_) &&
         std::all_of(embeddings_.begin(), embeddings_.end(), finite);
}

template <class T>
BasicModel<T> init_model(std::vector<std::string> item_ids,
                         const SideInfoCatalog& catalog,
                         const TrainConfig& cfg, Regime regime) {
  cfg.validate();
  const std::size_t num_items = item_ids.size();
  BasicModel<T> m(regime, cfg.dim, std::move(item_ids),
                  regime == Regime::kBge ? SideInfoCatalog::none(num_items)
                                         : catalog);
  m.set_seed(cfg.seed);
  Rng rng = derive_rng(cfg.seed, 0x696e6974 /* "init" */);
  const T bound = T(0.5) / static_cast<T>(cfg.dim);
  std::uniform_real_distribution<T> uniform(-bound, bound);
  for (std::size_t s = 0; s <= m.num_types(); ++s) {
    for (auto& x : m.embedding(s)) x = uniform(rng);
  }
  return m;
}

template <class T>
void aggregation_weights(const BasicModel<T>& m, NodeId v, std::span<T> out) {
  const std::size_t k = m.num_types() + 1;
  if (m.regime() != Regime::kEges) {
    std::fill(out.begin(), out.begin() + k, T(1) / static_cast<T>(k));
    return;
  }
  auto logits = m.weight_row(v);
  const T top = *std::max_element(logits.begin(), logits.end());
  T total = 0;
  for (std::size_t s = 0; s < k; ++s) {
    out[s] = std::exp(logits[s] - top);
    total += out[s];
  }
  for (std::size_t s = 0; s < k; ++s) out[s] /= total;
}

namespace {

template <class T>
void aggregate_into(const BasicModel<T>& m, NodeId v, std::vector<T>& alpha,
                    std::vector<T>& hidden) {
  const std::size_t k = m.num_types() + 1;
  const std::size_t d = m.dim();
  alpha.resize(k);
  hidden.assign(d, T{0});
  aggregation_weights<T>(m, v, alpha);
  for (std::size_t s = 0; s < k; ++s) {
    detail::axpy(alpha[s], m.source_row(s, v), hidden.data(), d);
  }
}

// Fills ws.rows, ws.alpha and ws.hidden for item v.
template <class T>
void forward(BasicModel<T>& m, NodeId v, UpdateWorkspace<T>& ws) {
  aggregate_into(m, v, ws.alpha, ws.hidden);
  ws.rows.resize(m.num_types() + 1);
  for (std::size_t s = 0; s < ws.rows.size(); ++s) {
    ws.rows[s] = m.source_row(s, v);
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

template <class T>
std::vector<T> aggregate_hidden(const BasicModel<T>& m, NodeId v) {
  if (v >= m.num_items()) throw LookupError("item index out of range");
  std::vector<T> alpha;
  std::vector<T> hidden;
  aggregate_into(m, v, alpha, hidden);
  return hidden;
}

template <class T>
double pair_loss(const BasicModel<T>& m, NodeId v, NodeId u, int y) {
  constexpr double kEps = 1e-12;
  static const double lo = std::log(kEps);
  static const double hi = std::log1p(-kEps);
  const auto hidden = aggregate_hidden(m, v);
  const double x = detail::dot(hidden.data(), m.context_row(u), m.dim());
  const double log_p = std::clamp(log_sigmoid(x), lo, hi);
  const double log_q = std::clamp(log_sigmoid(-x), lo, hi);
  return -(y * log_p + (1 - y) * log_q);
}

template <class T>
PairGradient<T> compute_gradients(const BasicModel<T>& m, NodeId v, NodeId u,
                                  int y) {
  const std::size_t k = m.num_types() + 1;
  const std::size_t d = m.dim();
  std::vector<T> alpha;
  std::vector<T> hidden;
  aggregate_into(m, v, alpha, hidden);
  const T* z = m.context_row(u);
  const T x = detail::dot(hidden.data(), z, d);
  const T g = static_cast<T>(sigmoid(x) - y);

  PairGradient<T> grad;
  grad.context.resize(d);
  for (std::size_t i = 0; i < d; ++i) grad.context[i] = g * hidden[i];
  grad.weights.assign(k, T{0});
  if (m.regime() == Regime::kEges) {
    for (std::size_t s = 0; s < k; ++s) {
      const T q = detail::dot(z, m.source_row(s, v), d);
      grad.weights[s] = alpha[s] * g * (q - x);
    }
  }
  grad.embeddings.resize(k);
  for (std::size_t s = 0; s < k; ++s) {
    grad.embeddings[s].resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      grad.embeddings[s][i] = alpha[s] * g * z[i];
    }
  }
  return grad;
}

namespace {

template <class T>
void update_simultaneous(BasicModel<T>& m, NodeId v, NodeId u, int y, T eta,
                         UpdateWorkspace<T>& ws) {
  const std::size_t k = m.num_types() + 1;
  const std::size_t d = m.dim();
  forward(m, v, ws);
  T* z = m.context_row(u);
  const T x = detail::dot(ws.hidden.data(), z, d);
  const T g = static_cast<T>(sigmoid(x) - y);
  if (m.regime() == Regime::kEges) {
    auto a = m.weight_row(v);
    for (std::size_t s = 0; s < k; ++s) {
      const T q = detail::dot(z, ws.rows[s], d);
      a[s] -= eta * ws.alpha[s] * g * (q - x);
    }
  }
  // Embedding rows first: their gradient needs Z_u before its update.
  for (std::size_t s = 0; s < k; ++s) {
    detail::axpy(-eta * ws.alpha[s] * g, z, ws.rows[s], d);
  }
  detail::axpy(-eta * g, ws.hidden.data(), z, d);
}

template <class T>
void update_sequential(BasicModel<T>& m, NodeId v, NodeId u, int y, T eta,
                       UpdateWorkspace<T>& ws) {
  const std::size_t k = m.num_types() + 1;
  const std::size_t d = m.dim();
  T* z = m.context_row(u);
  auto residual = [&] {
    forward(m, v, ws);
    const T x = detail::dot(ws.hidden.data(), z, d);
    return std::pair<T, T>{x, static_cast<T>(sigmoid(x) - y)};
  };
  auto [x0, g0] = residual();
  (void)x0;
  detail::axpy(-eta * g0, ws.hidden.data(), z, d);
  for (std::size_t s = 0; s < k; ++s) {
    if (m.regime() == Regime::kEges) {
      auto [x, g] = residual();
      const T q = detail::dot(z, ws.rows[s], d);
      m.weight_row(v)[s] -= eta * ws.alpha[s] * g * (q - x);
    }
    auto [x, g] = residual();
    (void)x;
    detail::axpy(-eta * ws.alpha[s] * g, z, ws.rows[s], d);
  }
}

}  // namespace

template <class T>
void sgd_update(BasicModel<T>& m, NodeId v, NodeId u, int y, double eta,
                UpdateWorkspace<T>& ws, bool sequential) {
  if (sequential) {
    update_sequential(m, v, u, y, static_cast<T>(eta), ws);
  } else {
    update_simultaneous(m, v, u, y, static_cast<T>(eta), ws);
  }
}

NodeId negative_sample(Rng& rng, std::size_t num_items, NodeId v, NodeId u) {
  NodeId lo = std::min(v, u);
  NodeId hi = std::max(v, u);
  const std::size_t excluded = lo == hi ? 1 : 2;
  if (num_items <= excluded) {
    throw ConfigError("no item left to sample as a negative");
  }
  std::uniform_int_distribution<std::size_t> pick(0, num_items - excluded - 1);
  auto r = static_cast<NodeId>(pick(rng));
  // Map [0, N - |excluded|) onto the items, skipping excluded ones in order.
  if (r >= lo) ++r;
  if (lo != hi && r >= hi) ++r;
  return r;
}

NegativeSampler::NegativeSampler(std::size_t num_items)
    : num_items_(num_items) {}

NegativeSampler::NegativeSampler(std::size_t num_items,
                                 const WalkCorpus& corpus)
    : num_items_(num_items) {
  std::vector<double> counts(num_items, 0.0);
  for (const auto& walk : corpus.walks) {
    for (NodeId v : walk) counts[v] += 1.0;
  }
  cumulative_.resize(num_items);
  double acc = 0.0;
  for (std::size_t i = 0; i < num_items; ++i) {
    acc += std::pow(counts[i], 0.75);
    cumulative_[i] = acc;
  }
  if (acc <= 0.0) cumulative_.clear();
}

bool NegativeSampler::can_sample(NodeId v, NodeId u) const {
  return num_items_ > (v == u ? 1u : 2u);
}

NodeId NegativeSampler::sample(Rng& rng, NodeId v, NodeId u) const {
  if (!cumulative_.empty()) {
    std::uniform_real_distribution<double> pick(0.0, cumulative_.back());
    // Rejection keeps the excluded pair out; fall back to uniform when the
    // remaining mass is tiny.
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(),
                                 pick(rng));
      if (it == cumulative_.end()) --it;
      auto c = static_cast<NodeId>(it - cumulative_.begin());
      if (c != v && c != u) return c;
    }
  }
  return negative_sample(rng, num_items_, v, u);
}

template <class T>
SkipGramStats weighted_skip_gram(BasicModel<T>& m, std::span<const NodeId> walk,
                                 const TrainConfig& cfg,
                                 const NegativeSampler& sampler, double eta,
                                 Rng& rng, UpdateWorkspace<T>& ws) {
  SkipGramStats stats;
  const std::size_t len = walk.size();
  const std::size_t k = cfg.window;
  for (std::size_t i = 0; i < len; ++i) {
    const NodeId v = walk[i];
    const std::size_t first = i > k ? i - k : 0;
    const std::size_t last = std::min(len - 1, i + k);
    for (std::size_t j = first; j <= last; ++j) {
      if (j == i) continue;
      const NodeId u = walk[j];
      sgd_update(m, v, u, 1, eta, ws, cfg.sequential_update);
      ++stats.positive;
      if (!sampler.can_sample(v, u)) continue;
      for (std::uint32_t t = 0; t < cfg.negatives; ++t) {
        const NodeId neg = sampler.sample(rng, v, u);
        sgd_update(m, v, neg, 0, eta, ws, cfg.sequential_update);
        ++stats.negative;
      }
    }
  }
  return stats;
}

template <class T>
std::vector<T> cold_start_embedding(
    const BasicModel<T>& m, std::span<const std::uint32_t> side_values) {
  if (m.regime() == Regime::kBge) {
    throw UnsupportedError("cold-start inference needs side information");
  }
  const std::size_t n = m.num_types();
  if (side_values.size() != n) {
    throw ConfigError("expected " + std::to_string(n) + " side values, got " +
                      std::to_string(side_values.size()));
  }
  const std::size_t d = m.dim();
  std::vector<T> out(d, T{0});
  const T scale = T(1) / static_cast<T>(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (side_values[s] >= m.catalog().vocab_size(s)) {
      throw LookupError("side value out of range for " +
                        m.catalog().type_names()[s]);
    }
    const T* row = m.embedding(s + 1).data() + std::size_t{side_values[s]} * d;
    detail::axpy(scale, row, out.data(), d);
  }
  return out;
}

template <class T>
std::vector<SideWeight> side_weights(const BasicModel<T>& m, NodeId v) {
  if (m.regime() != Regime::kEges) {
    throw UnsupportedError("side weights exist only for EGES models");
  }
  if (v >= m.num_items()) throw LookupError("item index out of range");
  auto logits = m.weight_row(v);
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<SideWeight> out;
  double total = 0.0;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    const double e = std::exp(static_cast<double>(logits[s]) - top);
    out.push_back({s == 0 ? "Item" : m.catalog().type_names()[s - 1], e});
    total += e;
  }
  for (auto& w : out) w.weight /= total;
  return out;
}

#define EGES_INSTANTIATE(T)                                                    \
  template class BasicModel<T>;                                                \
  template BasicModel<T> init_model<T>(std::vector<std::string>,               \
                                       const SideInfoCatalog&,                 \
                                       const TrainConfig&, Regime);            \
  template void aggregation_weights<T>(const BasicModel<T>&, NodeId,           \
                                       std::span<T>);                          \
  template std::vector<T> aggregate_hidden<T>(const BasicModel<T>&, NodeId);   \
  template double pair_loss<T>(const BasicModel<T>&, NodeId, NodeId, int);     \
  template PairGradient<T> compute_gradients<T>(const BasicModel<T>&, NodeId,  \
                                                NodeId, int);                  \
  template void sgd_update<T>(BasicModel<T>&, NodeId, NodeId, int, double,     \
                              UpdateWorkspace<T>&, bool);                      \
  template SkipGramStats weighted_skip_gram<T>(                                \
      BasicModel<T>&, std::span<const NodeId>, const TrainConfig&,             \
      const NegativeSampler&, double, Rng&, UpdateWorkspace<T>&);              \
  template std::vector<T> cold_start_embedding<T>(                             \
      const BasicModel<T>&, std::span<const std::uint32_t>);                   \
  template std::vector<SideWeight> side_weights<T>(const BasicModel<T>&, NodeId);

EGES_INSTANTIATE(float)
EGES_INSTANTIATE(double)

#undef EGES_INSTANTIATE

}  // namespace eges
