#include <algorithm>
#include <atomic>
#include <thread>

#include "eges/error.hpp"
#include "eges/model.hpp"

namespace eges {
namespace {

constexpr std::uint64_t kTrainStream = 0x747261696eULL;  // "train"

double learning_rate_at(const TrainConfig& cfg, std::uint64_t done,
                        std::uint64_t total) {
  if (!cfg.decay_learning_rate || total == 0) return cfg.learning_rate;
  const double progress = static_cast<double>(done) / static_cast<double>(total);
  return cfg.learning_rate * std::max(0.01, 1.0 - 0.99 * progress);
}

}  // namespace

Model train_on_corpus(std::vector<std::string> item_ids,
                      const WalkCorpus& corpus, const SideInfoCatalog& catalog,
                      const TrainConfig& cfg, Regime regime,
                      TrainStats* stats) {
  if (item_ids.empty()) throw ConfigError("cannot train on an empty graph");
  if (regime != Regime::kBge && catalog.num_types() == 0) {
    throw ConfigError(std::string(to_string(regime)) +
                      " requires at least one side-information type");
  }
  Model m = init_model<float>(std::move(item_ids), catalog, cfg, regime);
  const std::size_t n_items = m.num_items();
  for (const auto& walk : corpus.walks) {
    for (NodeId v : walk) {
      if (v >= n_items) throw FormatError("walk references unknown node");
    }
  }
  const NegativeSampler sampler =
      cfg.negative_distribution == NegativeDistribution::kUnigram
          ? NegativeSampler(n_items, corpus)
          : NegativeSampler(n_items);

  const std::uint64_t per_epoch = corpus.walks.size();
  const std::uint64_t total = per_epoch * cfg.epochs;
  TrainStats local;
  local.walks = total;

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::uint64_t offset = std::uint64_t{epoch} * per_epoch;
    if (cfg.threads <= 1) {
      UpdateWorkspace<float> ws;
      for (std::uint64_t i = 0; i < per_epoch; ++i) {
        Rng rng = derive_rng(cfg.seed, kTrainStream + epoch, i);
        const double eta = learning_rate_at(cfg, offset + i, total);
        auto s = weighted_skip_gram(m, corpus.walks[i], cfg, sampler, eta, rng,
                                    ws);
        local.updates.positive += s.positive;
        local.updates.negative += s.negative;
      }
    } else {
      // Lock-free shared updates; walks are claimed from a common counter.
      std::atomic<std::uint64_t> next{0};
      std::atomic<std::uint64_t> positive{0};
      std::atomic<std::uint64_t> negative{0};
      auto worker = [&] {
        UpdateWorkspace<float> ws;
        SkipGramStats mine;
        for (std::uint64_t i = next++; i < per_epoch; i = next++) {
          Rng rng = derive_rng(cfg.seed, kTrainStream + epoch, i);
          const double eta = learning_rate_at(cfg, offset + i, total);
          auto s = weighted_skip_gram(m, corpus.walks[i], cfg, sampler, eta,
                                      rng, ws);
          mine.positive += s.positive;
          mine.negative += s.negative;
        }
        positive += mine.positive;
        negative += mine.negative;
      };
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
      local.updates.positive += positive;
      local.updates.negative += negative;
    }
    if (!m.all_finite()) {
      throw NumericError("non-finite parameters after epoch " +
                         std::to_string(epoch + 1));
    }
  }
  if (stats != nullptr) *stats = local;
  return m;
}

Model train(const ItemGraph& g, const SideInfoCatalog& catalog,
            const WalkConfig& walk_cfg, const TrainConfig& train_cfg,
            Regime regime, TrainStats* stats) {
  if (g.empty()) throw ConfigError("cannot train on an empty graph");
  train_cfg.validate();
  const WalkCorpus corpus =
      generate_walks(g, walk_cfg, std::max(1u, train_cfg.threads));
  return train_on_corpus(g.names(), corpus, catalog, train_cfg, regime, stats);
}

}  // namespace eges
