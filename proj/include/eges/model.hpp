#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eges/graph.hpp"
#include "eges/random.hpp"
#include "eges/side_info.hpp"
#include "eges/walk.hpp"

namespace eges {

// BGE: item embedding only. GES: plain mean of item and side-information
// embeddings. EGES: softmax-weighted mean with per-item learned weights.
enum class Regime : std::uint8_t { kBge = 0, kGes = 1, kEges = 2 };

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);  // ConfigError on bad names

enum class NegativeDistribution { kUniform, kUnigram };

struct TrainConfig {
  std::uint32_t dim = 160;
  std::uint32_t window = 5;
  std::uint32_t negatives = 5;
  double learning_rate = 0.025;
  std::uint32_t epochs = 1;
  std::uint64_t seed = 1;
  // Apply the context update before evaluating the item-side gradients
  // (and each type's weight before its embedding), instead of evaluating
  // every gradient at the pre-update parameters.
  bool sequential_update = false;
  // Linear decay of the learning rate to 1/100 of its start value.
  bool decay_learning_rate = false;
  NegativeDistribution negative_distribution = NegativeDistribution::kUniform;
  // 1 = deterministic reference mode; >1 = lock-free concurrent updates.
  unsigned threads = 1;

  void validate() const;
};

// Parameters of one embedding model. Matrices are row-major:
//   embedding(0)    |V| x d        item embeddings
//   embedding(s)    vocab_s x d    side-information type s = 1..n
//   weights         |V| x (n+1)    raw per-item aggregation logits
//   context         |V| x d        output-side embeddings
template <class T>
class BasicModel {
 public:
  BasicModel(Regime regime, std::size_t dim, std::vector<std::string> item_ids,
             SideInfoCatalog catalog);

  Regime regime() const { return regime_; }
  std::size_t dim() const { return dim_; }
  std::size_t num_items() const { return item_ids_.size(); }
  // n, the number of side-information types.
  std::size_t num_types() const { return catalog_.num_types(); }

  const std::vector<std::string>& item_ids() const { return item_ids_; }
  const SideInfoCatalog& catalog() const { return catalog_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // LookupError for unknown ids.
  NodeId item_index(std::string_view item_id) const;

  std::vector<T>& embedding(std::size_t type) { return embeddings_.at(type); }
  const std::vector<T>& embedding(std::size_t type) const {
    return embeddings_.at(type);
  }
  std::vector<T>& weights() { return weights_; }
  const std::vector<T>& weights() const { return weights_; }
  std::vector<T>& context() { return context_; }
  const std::vector<T>& context() const { return context_; }

  // Row of embedding(type) that item v uses (type 0 is the item itself).
  T* source_row(std::size_t type, NodeId v);
  const T* source_row(std::size_t type, NodeId v) const;
  T* context_row(NodeId u) { return context_.data() + std::size_t{u} * dim_; }
  const T* context_row(NodeId u) const {
    return context_.data() + std::size_t{u} * dim_;
  }
  std::span<T> weight_row(NodeId v) {
    return {weights_.data() + std::size_t{v} * (num_types() + 1),
            num_types() + 1};
  }
  std::span<const T> weight_row(NodeId v) const {
    return {weights_.data() + std::size_t{v} * (num_types() + 1),
            num_types() + 1};
  }

  bool all_finite() const;

  // Bitwise parameter equality plus equal labels.
  friend bool operator==(const BasicModel&, const BasicModel&) = default;

 private:
  Regime regime_;
  std::size_t dim_;
  std::vector<std::string> item_ids_;
  SideInfoCatalog catalog_;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<T>> embeddings_;
  std::vector<T> weights_;
  std::vector<T> context_;
};

using Model = BasicModel<float>;

// Embedding matrices uniform in [-0.5/d, 0.5/d]; context and weights zero.
// BGE ignores the catalog's side information.
template <class T>
BasicModel<T> init_model(std::vector<std::string> item_ids,
                         const SideInfoCatalog& catalog,
                         const TrainConfig& cfg, Regime regime);

// Aggregation coefficients for item v: softmax of its weight row (EGES) or
// 1/(n+1) each (GES, BGE).
template <class T>
void aggregation_weights(const BasicModel<T>& m, NodeId v, std::span<T> out);

// H_v, the hidden representation of item v.
template <class T>
std::vector<T> aggregate_hidden(const BasicModel<T>& m, NodeId v);

template <class T>
std::vector<T> item_embedding(const BasicModel<T>& m, NodeId v) {
  return aggregate_hidden(m, v);
}

// Logistic loss of the pair (v, u) with label y; sigma clamped to
// [1e-12, 1 - 1e-12].
template <class T>
double pair_loss(const BasicModel<T>& m, NodeId v, NodeId u, int y);

template <class T>
struct PairGradient {
  std::vector<T> context;                  // dL/dZ_u
  std::vector<T> weights;                  // dL/da_v^s, zero unless EGES
  std::vector<std::vector<T>> embeddings;  // dL/dW_v^s for s = 0..n
};

template <class T>
PairGradient<T> compute_gradients(const BasicModel<T>& m, NodeId v, NodeId u,
                                  int y);

// Scratch buffers reused across updates.
template <class T>
struct UpdateWorkspace {
  std::vector<T> hidden;
  std::vector<T> alpha;
  std::vector<T*> rows;
};

// One SGD step on L(v, u, y). Touches only Z_u, row v of the weights (EGES)
// and the n+1 embedding rows item v refers to.
template <class T>
void sgd_update(BasicModel<T>& m, NodeId v, NodeId u, int y, double eta,
                UpdateWorkspace<T>& ws, bool sequential = false);

// Uniform over [0, num_items) minus {v, u}. ConfigError if nothing remains.
NodeId negative_sample(Rng& rng, std::size_t num_items, NodeId v, NodeId u);

class NegativeSampler {
 public:
  // Uniform sampler.
  explicit NegativeSampler(std::size_t num_items);
  // Unigram^0.75 over walk-corpus frequencies.
  NegativeSampler(std::size_t num_items, const WalkCorpus& corpus);

  std::size_t num_items() const { return num_items_; }
  // False when every item is excluded.
  bool can_sample(NodeId v, NodeId u) const;
  NodeId sample(Rng& rng, NodeId v, NodeId u) const;

 private:
  std::size_t num_items_;
  std::vector<double> cumulative_;  // empty => uniform
};

struct SkipGramStats {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
};

// For every position i and in-window j != i (|i - j| <= window): one
// positive update (walk[i], walk[j]) followed by `negatives` negative ones.
template <class T>
SkipGramStats weighted_skip_gram(BasicModel<T>& m, std::span<const NodeId> walk,
                                 const TrainConfig& cfg,
                                 const NegativeSampler& sampler, double eta,
                                 Rng& rng, UpdateWorkspace<T>& ws);

struct TrainStats {
  std::uint64_t walks = 0;
  SkipGramStats updates;
};

// Trains on a precomputed corpus whose node indices address `item_ids`.
Model train_on_corpus(std::vector<std::string> item_ids,
                      const WalkCorpus& corpus, const SideInfoCatalog& catalog,
                      const TrainConfig& cfg, Regime regime,
                      TrainStats* stats = nullptr);

// Generates walks over `g` and trains on them. `catalog` must be aligned to
// the graph's node order.
Model train(const ItemGraph& g, const SideInfoCatalog& catalog,
            const WalkConfig& walk_cfg, const TrainConfig& train_cfg,
            Regime regime, TrainStats* stats = nullptr);

// Mean of the side-information embeddings selected by `side_values` (one
// index per type); the item embedding is not involved.
template <class T>
std::vector<T> cold_start_embedding(const BasicModel<T>& m,
                                    std::span<const std::uint32_t> side_values);

struct SideWeight {
  std::string label;  // "Item" for type 0, otherwise the type name
  double weight;
};

// Normalized aggregation weights of item v. EGES only.
template <class T>
std::vector<SideWeight> side_weights(const BasicModel<T>& m, NodeId v);

// Binary model file (little-endian):
//   "EGES0001", regime u8, d u32, n u32, |V| u32, vocab sizes u32 x n,
//   Z, W^0..W^n, A as row-major f32,
//   then seed u64, item ids, type names, per-type vocabularies (each a u32
//   length and UTF-8 bytes) and the u32 item x type assignment.
void save_model(const Model& m, std::ostream& out);
Model load_model(std::istream& in);
void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// `item_id<TAB>v1 v2 ... vd` of H_v for every item.
void write_embeddings(const Model& m, std::ostream& out);

}  // namespace eges
